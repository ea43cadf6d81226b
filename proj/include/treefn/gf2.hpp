#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "tree.hpp"

namespace treefn {

namespace detail {

// Bit-vector of length 2^n shared by the truth-table and ANF views.
// Invariant: bits above 2^n are zero.
struct BitBlock {
  int n = 0;
  std::vector<uint64_t> words;

  explicit BitBlock(int arity) : n(arity) {
    if (arity < 0 || arity > 26) throw limit_error("arity out of supported range [0,26]");
    words.assign(word_count(), 0);
  }

  size_t size() const { return size_t(1) << n; }
  size_t word_count() const { return n <= 6 ? 1 : (size_t(1) << (n - 6)); }
  uint64_t top_mask() const { return n >= 6 ? ~uint64_t(0) : (uint64_t(1) << (1 << n)) - 1; }

  bool get(size_t i) const { return words[i >> 6] >> (i & 63) & 1; }
  void set(size_t i, bool v) {
    if (v)
      words[i >> 6] |= uint64_t(1) << (i & 63);
    else
      words[i >> 6] &= ~(uint64_t(1) << (i & 63));
  }

  bool any() const {
    for (uint64_t w : words)
      if (w) return true;
    return false;
  }

  void invert() {
    for (auto& w : words) w = ~w;
    words.back() &= top_mask();
    if (n < 6) words[0] &= top_mask();
  }

  void operator^=(const BitBlock& o) {
    for (size_t i = 0; i < words.size(); ++i) words[i] ^= o.words[i];
  }
  void operator&=(const BitBlock& o) {
    for (size_t i = 0; i < words.size(); ++i) words[i] &= o.words[i];
  }

  friend bool operator==(const BitBlock& a, const BitBlock& b) {
    return a.n == b.n && a.words == b.words;
  }

  // In-word butterfly masks: positions whose index bit i is zero.
  static constexpr uint64_t kLowMask[6] = {
      0x5555555555555555ull, 0x3333333333333333ull, 0x0f0f0f0f0f0f0f0full,
      0x00ff00ff00ff00ffull, 0x0000ffff0000ffffull, 0x00000000ffffffffull};

  // a[m] ^= a[m ^ e_i] for every m with bit i set -- one level of the
  // self-inverse Moebius/zeta butterfly over the subset lattice.
  void butterfly(int i) {
    if (i < 6) {
      uint64_t m = kLowMask[i];
      int s = 1 << i;
      for (auto& w : words) w ^= (w & m) << s;
    } else {
      size_t half = size_t(1) << (i - 6);
      for (size_t base = 0; base < words.size(); base += 2 * half)
        for (size_t k = 0; k < half; ++k) words[base + half + k] ^= words[base + k];
    }
  }

  void mobius() {
    for (int i = 0; i < n; ++i) butterfly(i);
  }

  // result[m] = bits[m | e_i] for m with bit i clear, zero elsewhere
  BitBlock shift_down(int i) const {
    BitBlock r(n);
    if (i < 6) {
      uint64_t m = kLowMask[i];
      int s = 1 << i;
      for (size_t k = 0; k < words.size(); ++k) r.words[k] = (words[k] >> s) & m;
    } else {
      size_t half = size_t(1) << (i - 6);
      for (size_t base = 0; base < words.size(); base += 2 * half)
        for (size_t k = 0; k < half; ++k) r.words[base + k] = words[base + half + k];
    }
    return r;
  }

  // result[m] = bits[m ^ e_i]
  BitBlock swap_level(int i) const {
    BitBlock r(n);
    if (i < 6) {
      uint64_t m = kLowMask[i];
      int s = 1 << i;
      for (size_t k = 0; k < words.size(); ++k)
        r.words[k] = ((words[k] & m) << s) | ((words[k] >> s) & m);
    } else {
      size_t half = size_t(1) << (i - 6);
      for (size_t base = 0; base < words.size(); base += 2 * half)
        for (size_t k = 0; k < half; ++k) {
          r.words[base + k] = words[base + half + k];
          r.words[base + half + k] = words[base + k];
        }
    }
    return r;
  }

  size_t hash() const {
    size_t h = std::hash<int>()(n);
    for (uint64_t w : words) h ^= std::hash<uint64_t>()(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace detail

class Gf2Poly;

/// Output table of a bit-valued function {0,1}^n -> {0,1}. Bit at index
/// b = sum x_i 2^(i-1) is the output at input (x_1,...,x_n).
class TruthTable {
public:
  explicit TruthTable(int n) : bits_(n) {}

  static TruthTable constant(int n, bool v) {
    TruthTable t(n);
    if (v) {
      for (auto& w : t.bits_.words) w = ~uint64_t(0);
      t.bits_.words.back() &= t.bits_.top_mask();
      if (n < 6) t.bits_.words[0] &= t.bits_.top_mask();
    }
    return t;
  }

  /// Projection onto variable i (0-based).
  static TruthTable variable(int n, int i) {
    TruthTable t(n);
    for (size_t b = 0; b < t.size(); ++b)
      if (b >> i & 1) t.bits_.set(b, true);
    return t;
  }

  /// Hex digits, most significant first; bit 0 (all-zeros input) is the least
  /// significant bit of the value.
  static TruthTable from_hex(int n, std::string_view hex) {
    TruthTable t(n);
    size_t digits = t.hex_digits();
    if (hex.size() != digits)
      throw parse_error("truth table hex: expected " + std::to_string(digits) + " digits", 0);
    for (size_t k = 0; k < hex.size(); ++k) {
      char c = hex[hex.size() - 1 - k];
      int v;
      if (c >= '0' && c <= '9')
        v = c - '0';
      else if (c >= 'a' && c <= 'f')
        v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F')
        v = c - 'A' + 10;
      else
        throw parse_error("truth table hex: bad digit", hex.size() - 1 - k);
      t.bits_.words[k / 16] |= uint64_t(v) << (4 * (k % 16));
    }
    if ((t.bits_.words[0] & ~t.bits_.top_mask()) && n < 6)
      throw parse_error("truth table hex: bits beyond table size", 0);
    return t;
  }

  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (size_t k = hex_digits(); k-- > 0;)
      s.push_back(digits[bits_.words[k / 16] >> (4 * (k % 16)) & 0xf]);
    return s;
  }

  int n() const { return bits_.n; }
  size_t size() const { return bits_.size(); }
  size_t hex_digits() const { return size() <= 4 ? 1 : size() / 4; }

  bool bit(size_t input) const { return bits_.get(input); }
  void set_bit(size_t input, bool v) { bits_.set(input, v); }

  /// Raw packed bits; valid only for n <= 6.
  uint64_t word() const {
    if (n() > 6) throw limit_error("truth table does not fit one word");
    return bits_.words[0];
  }
  static TruthTable from_word(int n, uint64_t w) {
    TruthTable t(n);
    t.bits_.words[0] = w & t.bits_.top_mask();
    return t;
  }

  TruthTable operator~() const {
    TruthTable r = *this;
    r.bits_.invert();
    return r;
  }
  friend TruthTable operator^(TruthTable a, const TruthTable& b) {
    check_same(a, b);
    a.bits_ ^= b.bits_;
    return a;
  }
  friend TruthTable operator&(TruthTable a, const TruthTable& b) {
    check_same(a, b);
    a.bits_ &= b.bits_;
    return a;
  }
  friend bool operator==(const TruthTable& a, const TruthTable& b) {
    return a.bits_ == b.bits_;
  }
  friend bool operator!=(const TruthTable& a, const TruthTable& b) { return !(a == b); }

  size_t hash() const { return bits_.hash(); }

  friend class Gf2Poly;

private:
  detail::BitBlock bits_;

  static void check_same(const TruthTable& a, const TruthTable& b) {
    if (a.n() != b.n()) throw domain_error("truth table arity mismatch");
  }
};

/// Multilinear polynomial over GF(2): the coefficient of the monomial
/// prod_{s in S} x_s is the bit at subset mask S. Identified one-to-one with
/// bit-valued functions through the Moebius transform.
class Gf2Poly {
public:
  explicit Gf2Poly(int n) : coeffs_(n) {}

  static Gf2Poly zero(int n) { return Gf2Poly(n); }
  static Gf2Poly one(int n) {
    Gf2Poly p(n);
    p.coeffs_.set(0, true);
    return p;
  }
  static Gf2Poly variable(int n, int i) {
    if (i < 0 || i >= n) throw domain_error("variable index out of range");
    Gf2Poly p(n);
    p.coeffs_.set(size_t(1) << i, true);
    return p;
  }

  int n() const { return coeffs_.n; }
  bool is_zero() const { return !coeffs_.any(); }
  bool is_constant() const {
    Gf2Poly t = *this;
    t.coeffs_.set(0, false);
    return !t.coeffs_.any();
  }

  bool coeff(size_t subset_mask) const { return coeffs_.get(subset_mask); }
  void set_coeff(size_t subset_mask, bool v) { coeffs_.set(subset_mask, v); }

  bool depends_on(int i) const {
    for (size_t m = 0; m < coeffs_.size(); ++m)
      if ((m >> i & 1) && coeffs_.get(m)) return true;
    return false;
  }

  /// Unique multilinear polynomial agreeing with `tt` on all of {0,1}^n.
  static Gf2Poly from_truth_table(const TruthTable& tt) {
    Gf2Poly p(tt.n());
    p.coeffs_ = tt.bits_;
    p.coeffs_.mobius();
    return p;
  }

  /// Pointwise evaluation at all binary vectors; inverse of from_truth_table.
  TruthTable truth_table() const {
    TruthTable t(n());
    t.bits_ = coeffs_;
    t.bits_.mobius();
    return t;
  }

  bool eval(size_t point_mask) const {
    bool acc = false;
    for (size_t m = 0; m < coeffs_.size(); ++m)
      if ((m & ~point_mask) == 0 && coeffs_.get(m)) acc = !acc;
    return acc;
  }

  /// Embeds into a polynomial on m >= n variables (same monomials).
  Gf2Poly extended(int m) const {
    if (m < n()) throw domain_error("extended: cannot shrink variable set");
    if (m == n()) return *this;
    Gf2Poly p(m);
    for (size_t w = 0; w < coeffs_.words.size(); ++w) p.coeffs_.words[w] = coeffs_.words[w];
    return p;
  }

  friend Gf2Poly operator+(Gf2Poly a, const Gf2Poly& b) {
    if (a.n() != b.n()) {
      int m = std::max(a.n(), b.n());
      return a.extended(m) + b.extended(m);
    }
    a.coeffs_ ^= b.coeffs_;
    return a;
  }

  /// Exact product in Z2[x1..xn]/(xi^2 - xi): computed pointwise, since the
  /// quotient ring is isomorphic to the function ring.
  friend Gf2Poly operator*(const Gf2Poly& a, const Gf2Poly& b) {
    if (a.n() != b.n()) {
      int m = std::max(a.n(), b.n());
      return a.extended(m) * b.extended(m);
    }
    return from_truth_table(a.truth_table() & b.truth_table());
  }

  /// Formal derivative: P(x + e_i) + P(x). Drops x_i from every monomial
  /// containing it, deletes the rest; the result is independent of x_i.
  Gf2Poly derivative(int i) const {
    if (i < 0 || i >= n()) throw domain_error("derivative: variable index out of range");
    Gf2Poly r(n());
    r.coeffs_ = coeffs_.shift_down(i);
    return r;
  }

  friend bool operator==(const Gf2Poly& a, const Gf2Poly& b) {
    return a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const Gf2Poly& a, const Gf2Poly& b) { return !(a == b); }

  /// Monomials joined by " + ", e.g. "1 + x1 + x1*x2"; "0" for the zero
  /// polynomial. Variables are 1-based.
  std::string to_string() const {
    std::string s;
    for (size_t m = 0; m < coeffs_.size(); ++m) {
      if (!coeffs_.get(m)) continue;
      if (!s.empty()) s += " + ";
      if (m == 0) {
        s += "1";
      } else {
        bool first = true;
        for (int i = 0; i < n(); ++i)
          if (m >> i & 1) {
            if (!first) s += "*";
            s += "x" + std::to_string(i + 1);
            first = false;
          }
      }
    }
    return s.empty() ? "0" : s;
  }

  /// Parses the to_string format; accepts any monomial order and repetition
  /// (x*x collapses to x, duplicate monomials cancel).
  static Gf2Poly parse(std::string_view text, int n) {
    Gf2Poly p(n);
    size_t pos = 0;
    auto skip_ws = [&] {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    bool expecting_term = true;
    while (true) {
      skip_ws();
      if (pos >= text.size()) break;
      if (!expecting_term) {
        if (text[pos] != '+') throw parse_error("expected '+'", pos);
        ++pos;
        expecting_term = true;
        continue;
      }
      size_t mask = 0;
      bool is_one = false;
      bool is_zero = false;
      while (true) {
        skip_ws();
        if (pos < text.size() && text[pos] == '0' && mask == 0 && !is_one && !is_zero) {
          ++pos;
          is_zero = true;
        } else if (pos < text.size() && text[pos] == '1' && mask == 0 && !is_one && !is_zero) {
          ++pos;
          is_one = true;
        } else if (pos < text.size() && (text[pos] == 'x' || text[pos] == 'X')) {
          size_t start = pos++;
          size_t num_start = pos;
          while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
          if (pos == num_start) throw parse_error("expected variable index after 'x'", start);
          int idx = std::stoi(std::string(text.substr(num_start, pos - num_start)));
          if (idx < 1 || idx > n)
            throw parse_error("variable index out of range 1.." + std::to_string(n), start);
          mask |= size_t(1) << (idx - 1);
        } else {
          throw parse_error("expected monomial", pos);
        }
        skip_ws();
        if (pos < text.size() && text[pos] == '*') {
          ++pos;
          continue;
        }
        break;
      }
      if ((is_one || is_zero) && mask != 0)
        throw parse_error("constants cannot be multiplied by variables here", pos);
      if (!is_zero) p.coeffs_.set(mask, !p.coeffs_.get(mask));
      expecting_term = false;
    }
    if (expecting_term) throw parse_error("empty polynomial", pos);
    return p;
  }

private:
  detail::BitBlock coeffs_;
};

inline Gf2Poly gf2_add(const Gf2Poly& a, const Gf2Poly& b) { return a + b; }
inline Gf2Poly gf2_mul(const Gf2Poly& a, const Gf2Poly& b) { return a * b; }

/// The discrete constraint d2P/dxi dxl * dP/dxj == d2P/dxj dxl * dP/dxi,
/// checked as an exact identity in the quotient ring. The second-order
/// derivative is a composition of two first derivatives.
inline bool discrete_constraint(const Gf2Poly& p, const Triple& t) {
  Gf2Poly d_il = p.derivative(t.i).derivative(t.l);
  Gf2Poly d_jl = p.derivative(t.j).derivative(t.l);
  return d_il * p.derivative(t.j) == d_jl * p.derivative(t.i);
}

}  // namespace treefn

template <>
struct std::hash<treefn::TruthTable> {
  size_t operator()(const treefn::TruthTable& t) const { return t.hash(); }
};

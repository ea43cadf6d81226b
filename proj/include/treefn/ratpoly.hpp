#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bigint.hpp"
#include "errors.hpp"

namespace treefn {

namespace detail {

/// Graded lexicographic order on exponent vectors (higher total degree first
/// when iterating from rbegin; std::map keeps the ascending order).
struct GrlexLess {
  bool operator()(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) const {
    uint64_t ta = 0, tb = 0;
    for (uint32_t e : a) ta += e;
    for (uint32_t e : b) tb += e;
    if (ta != tb) return ta < tb;
    return a < b;  // lexicographic tie-break
  }
};

}  // namespace detail

/// Multivariate polynomial with exact rational coefficients. Terms map
/// exponent vectors (length n) to nonzero coefficients in graded-lex order.
class RatPoly {
public:
  using Exponents = std::vector<uint32_t>;
  using TermMap = std::map<Exponents, Rational, detail::GrlexLess>;

  RatPoly() : n_(0) {}  // the zero polynomial on no variables
  explicit RatPoly(int n) : n_(n) {
    if (n < 0) throw domain_error("RatPoly: negative variable count");
  }

  static RatPoly zero(int n) { return RatPoly(n); }
  static RatPoly constant(int n, Rational c) {
    RatPoly p(n);
    if (!c.is_zero()) p.terms_[Exponents(n, 0)] = std::move(c);
    return p;
  }
  static RatPoly variable(int n, int i) {
    if (i < 0 || i >= n) throw domain_error("RatPoly: variable index out of range");
    RatPoly p(n);
    Exponents e(n, 0);
    e[i] = 1;
    p.terms_[std::move(e)] = Rational(1);
    return p;
  }

  int n() const { return n_; }
  const TermMap& terms() const { return terms_; }
  size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponents(n_, 0));
  }

  Rational constant_value() const {
    auto it = terms_.find(Exponents(n_, 0));
    return it == terms_.end() ? Rational(0) : it->second;
  }

  uint32_t total_degree() const {
    if (terms_.empty()) return 0;
    uint32_t d = 0;
    for (uint32_t e : terms_.rbegin()->first) d += e;  // grlex: last term has max degree
    return d;
  }

  uint32_t degree_in(int i) const {
    uint32_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
    return d;
  }

  bool depends_on(int i) const { return degree_in(i) > 0; }

  void add_term(Exponents e, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend RatPoly operator+(RatPoly a, const RatPoly& b) {
    check_same(a, b);
    for (const auto& [e, c] : b.terms_) a.add_term(e, c);
    return a;
  }
  friend RatPoly operator-(RatPoly a, const RatPoly& b) {
    check_same(a, b);
    for (const auto& [e, c] : b.terms_) a.add_term(e, -c);
    return a;
  }
  RatPoly operator-() const {
    RatPoly r(n_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }
  friend RatPoly operator*(const RatPoly& a, const RatPoly& b) {
    check_same(a, b);
    RatPoly r(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(a.n_);
        for (int i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
        r.add_term(std::move(e), ca * cb);
      }
    return r;
  }
  friend RatPoly operator*(const Rational& c, const RatPoly& p) {
    RatPoly r(p.n_);
    if (c.is_zero()) return r;
    for (const auto& [e, pc] : p.terms_) r.terms_[e] = c * pc;
    return r;
  }
  RatPoly& operator+=(const RatPoly& o) { return *this = *this + o; }
  RatPoly& operator-=(const RatPoly& o) { return *this = *this - o; }
  RatPoly& operator*=(const RatPoly& o) { return *this = *this * o; }

  friend bool operator==(const RatPoly& a, const RatPoly& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const RatPoly& a, const RatPoly& b) { return !(a == b); }

  /// Exact formal partial derivative with respect to variable i.
  RatPoly derivative(int i) const {
    if (i < 0 || i >= n_) throw domain_error("derivative: variable index out of range");
    RatPoly r(n_);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponents d = e;
      d[i] -= 1;
      r.terms_[std::move(d)] = c * Rational(static_cast<long long>(e[i]));
    }
    return r;
  }

  RatPoly derivative(const std::vector<int>& vars) const {
    RatPoly r = *this;
    for (int v : vars) r = r.derivative(v);
    return r;
  }

  Rational eval(const std::vector<Rational>& point) const {
    if (point.size() != static_cast<size_t>(n_)) throw domain_error("eval: point arity mismatch");
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (int i = 0; i < n_; ++i)
        for (uint32_t k = 0; k < e[i]; ++k) term *= point[i];
      acc += term;
    }
    return acc;
  }

  /// Substitutes `subs[i]` (all on a common variable set) for variable i.
  RatPoly compose(const std::vector<RatPoly>& subs) const {
    if (subs.size() != static_cast<size_t>(n_))
      throw domain_error("compose: substitution arity mismatch");
    int m = subs.empty() ? 0 : subs[0].n();
    for (const auto& s : subs)
      if (s.n() != m) throw domain_error("compose: substitutions on different variable sets");
    // cache powers of each substituted polynomial
    std::vector<std::vector<RatPoly>> powers(n_);
    for (int i = 0; i < n_; ++i) powers[i].push_back(RatPoly::constant(m, Rational(1)));
    RatPoly acc(m);
    for (const auto& [e, c] : terms_) {
      RatPoly term = RatPoly::constant(m, c);
      for (int i = 0; i < n_; ++i) {
        while (powers[i].size() <= e[i]) powers[i].push_back(powers[i].back() * subs[i]);
        if (e[i]) term *= powers[i][e[i]];
      }
      acc += term;
    }
    return acc;
  }

  /// Freezes variable i at a value; the result stays on n variables but no
  /// longer depends on x_i.
  RatPoly substitute(int i, const Rational& value) const {
    if (i < 0 || i >= n_) throw domain_error("substitute: variable index out of range");
    RatPoly r(n_);
    for (const auto& [e, c] : terms_) {
      Rational coeff = c;
      for (uint32_t k = 0; k < e[i]; ++k) coeff *= value;
      Exponents d = e;
      d[i] = 0;
      r.add_term(std::move(d), coeff);
    }
    return r;
  }

  /// Embeds into a polynomial on m >= n variables.
  RatPoly extended(int m) const {
    if (m < n_) throw domain_error("extended: cannot shrink variable set");
    RatPoly r(m);
    for (const auto& [e, c] : terms_) {
      Exponents d(m, 0);
      std::copy(e.begin(), e.end(), d.begin());
      r.terms_[std::move(d)] = c;
    }
    return r;
  }

  /// Text form: "+"-separated terms, each an optional rational coefficient
  /// followed by "x<i>^<e>" factors, e.g. "3/2*x1^2*x3 + -1*x2".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      if (!s.empty()) s += " + ";
      std::string factors;
      for (int i = 0; i < n_; ++i) {
        if (e[i] == 0) continue;
        if (!factors.empty()) factors += "*";
        factors += "x" + std::to_string(i + 1);
        if (e[i] > 1) factors += "^" + std::to_string(e[i]);
      }
      if (factors.empty()) {
        s += c.to_string();
      } else if (c.is_one()) {
        s += factors;
      } else {
        s += c.to_string() + "*" + factors;
      }
    }
    return s;
  }

  static RatPoly parse(std::string_view text, int n) {
    RatPoly p(n);
    size_t pos = 0;
    auto skip_ws = [&] {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto parse_factor = [&](Exponents& e) {
      if (pos >= text.size() || (text[pos] != 'x' && text[pos] != 'X'))
        throw parse_error("expected variable", pos);
      ++pos;
      size_t num_start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == num_start) throw parse_error("expected variable index", num_start);
      int idx = std::stoi(std::string(text.substr(num_start, pos - num_start)));
      if (idx < 1 || idx > n)
        throw parse_error("variable index out of range 1.." + std::to_string(n), num_start);
      uint32_t exp = 1;
      skip_ws();
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        skip_ws();
        size_t es = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == es) throw parse_error("expected exponent after '^'", es);
        exp = static_cast<uint32_t>(std::stoul(std::string(text.substr(es, pos - es))));
      }
      e[idx - 1] += exp;
    };

    skip_ws();
    if (pos >= text.size()) throw parse_error("empty polynomial", pos);
    bool first = true;
    while (pos < text.size()) {
      int sign = 1;
      if (!first) {
        if (text[pos] == '+') {
          ++pos;
        } else if (text[pos] == '-') {
          sign = -1;
          ++pos;
        } else {
          throw parse_error("expected '+' or '-' between terms", pos);
        }
        skip_ws();
      }
      first = false;
      // tolerate a signed coefficient after a separator, e.g. "+ -1*x2"
      while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        if (text[pos] == '-') sign = -sign;
        ++pos;
        skip_ws();
      }
      Rational coeff(sign);
      Exponents e(n, 0);
      bool want_vars = true;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
          ++pos;
        coeff = coeff * Rational::from_string(text.substr(start, pos - start));
        skip_ws();
        want_vars = false;
        if (pos < text.size() && text[pos] == '*') {
          ++pos;
          skip_ws();
          want_vars = true;
        }
      }
      if (want_vars) {
        parse_factor(e);
        skip_ws();
        while (pos < text.size() && text[pos] == '*') {
          ++pos;
          skip_ws();
          parse_factor(e);
          skip_ws();
        }
      }
      p.add_term(std::move(e), coeff);
      skip_ws();
    }
    return p;
  }

private:
  int n_;
  TermMap terms_;

  static void check_same(const RatPoly& a, const RatPoly& b) {
    if (a.n_ != b.n_) throw domain_error("RatPoly: variable count mismatch");
  }
};

}  // namespace treefn

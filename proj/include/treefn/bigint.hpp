#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treefn {

/// Arbitrary-precision signed integer. Magnitude is stored as little-endian
/// 32-bit limbs with no trailing zero limb; sign is -1, 0 or +1.
class BigInt {
public:
  BigInt() = default;
  BigInt(int v) : BigInt(static_cast<long long>(v)) {}
  BigInt(long v) : BigInt(static_cast<long long>(v)) {}
  BigInt(long long v) {
    unsigned long long m = v < 0 ? ~static_cast<unsigned long long>(v) + 1ull
                                 : static_cast<unsigned long long>(v);
    set_magnitude(m);
    sign_ = v < 0 ? -1 : (v > 0 ? 1 : 0);
  }
  BigInt(unsigned long long v) {
    set_magnitude(v);
    sign_ = v ? 1 : 0;
  }
  BigInt(unsigned long v) : BigInt(static_cast<unsigned long long>(v)) {}
  BigInt(unsigned int v) : BigInt(static_cast<unsigned long long>(v)) {}

  static BigInt from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("BigInt: empty string");
    int sign = 1;
    size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
      sign = s[0] == '-' ? -1 : 1;
      i = 1;
    }
    if (i == s.size()) throw std::invalid_argument("BigInt: no digits");
    BigInt r;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9')
        throw std::invalid_argument("BigInt: bad digit in \"" + std::string(s) + "\"");
      r = r * BigInt(10) + BigInt(int(s[i] - '0'));
    }
    if (!r.is_zero()) r.sign_ = sign;
    return r;
  }

  /// 2^k
  static BigInt pow2(uint64_t k) {
    BigInt r;
    r.mag_.assign(k / 32 + 1, 0u);
    r.mag_[k / 32] = 1u << (k % 32);
    r.sign_ = 1;
    return r;
  }

  bool is_zero() const { return sign_ == 0; }
  bool is_negative() const { return sign_ < 0; }
  int sign() const { return sign_; }

  BigInt operator-() const {
    BigInt r = *this;
    r.sign_ = -r.sign_;
    return r;
  }

  BigInt abs() const {
    BigInt r = *this;
    if (r.sign_ < 0) r.sign_ = 1;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt r;
    if (a.sign_ == b.sign_) {
      r.mag_ = add_mag(a.mag_, b.mag_);
      r.sign_ = a.sign_;
    } else {
      int c = cmp_mag(a.mag_, b.mag_);
      if (c == 0) return BigInt();
      if (c > 0) {
        r.mag_ = sub_mag(a.mag_, b.mag_);
        r.sign_ = a.sign_;
      } else {
        r.mag_ = sub_mag(b.mag_, a.mag_);
        r.sign_ = b.sign_;
      }
    }
    return r;
  }

  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
    BigInt r;
    r.mag_.assign(a.mag_.size() + b.mag_.size(), 0u);
    for (size_t i = 0; i < a.mag_.size(); ++i) {
      uint64_t carry = 0;
      uint64_t ai = a.mag_[i];
      for (size_t j = 0; j < b.mag_.size(); ++j) {
        uint64_t cur = r.mag_[i + j] + ai * b.mag_[j] + carry;
        r.mag_[i + j] = static_cast<uint32_t>(cur);
        carry = cur >> 32;
      }
      size_t k = i + b.mag_.size();
      while (carry) {
        uint64_t cur = r.mag_[k] + carry;
        r.mag_[k] = static_cast<uint32_t>(cur);
        carry = cur >> 32;
        ++k;
      }
    }
    r.trim();
    r.sign_ = a.sign_ * b.sign_;
    return r;
  }

  /// Truncated division: quotient rounds toward zero, |r| < |b|, sign(r) = sign(a).
  friend std::pair<BigInt, BigInt> divmod(const BigInt& a, const BigInt& b) {
    if (b.sign_ == 0) throw std::domain_error("BigInt: division by zero");
    auto [qm, rm] = divmod_mag(a.mag_, b.mag_);
    BigInt q, r;
    q.mag_ = std::move(qm);
    q.trim();
    q.sign_ = q.mag_.empty() ? 0 : a.sign_ * b.sign_;
    r.mag_ = std::move(rm);
    r.trim();
    r.sign_ = r.mag_.empty() ? 0 : a.sign_;
    return {q, r};
  }

  friend BigInt operator/(const BigInt& a, const BigInt& b) { return divmod(a, b).first; }
  friend BigInt operator%(const BigInt& a, const BigInt& b) { return divmod(a, b).second; }

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  friend int cmp(const BigInt& a, const BigInt& b) {
    if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
    int c = cmp_mag(a.mag_, b.mag_);
    return a.sign_ >= 0 ? c : -c;
  }
  friend bool operator==(const BigInt& a, const BigInt& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return cmp(a, b) != 0; }
  friend bool operator<(const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const BigInt& a, const BigInt& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const BigInt& a, const BigInt& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const BigInt& a, const BigInt& b) { return cmp(a, b) >= 0; }

  static BigInt pow(const BigInt& base, uint64_t e) {
    BigInt r(1), b = base;
    while (e) {
      if (e & 1) r *= b;
      e >>= 1;
      if (e) b *= b;
    }
    return r;
  }

  /// gcd of magnitudes (always >= 0); gcd(0, x) = |x|.
  static BigInt gcd(const BigInt& a, const BigInt& b) {
    if (a.is_zero()) return b.abs();
    if (b.is_zero()) return a.abs();
    if (a.mag_.size() <= 2 && b.mag_.size() <= 2) {
      uint64_t x = a.to_u64_mag(), y = b.to_u64_mag();
      while (y) {
        uint64_t t = x % y;
        x = y;
        y = t;
      }
      return BigInt(x);
    }
    // binary gcd on magnitudes
    std::vector<uint32_t> x = a.mag_, y = b.mag_;
    while (!x.empty() && !y.empty()) {
      shr_mag(x, ctz_mag(x));
      shr_mag(y, ctz_mag(y));
      int c = cmp_mag(x, y);
      if (c == 0) break;
      if (c > 0)
        x = sub_mag(x, y);
      else
        y = sub_mag(y, x);
      trim_mag(x);
      trim_mag(y);
    }
    BigInt r;
    r.mag_ = x.empty() ? y : x;
    trim_mag(r.mag_);
    r.sign_ = r.mag_.empty() ? 0 : 1;
    // restore the common power of two stripped up-front
    int common = std::min(ctz_or_zero(a.mag_), ctz_or_zero(b.mag_));
    if (common > 0) r = r * pow2(static_cast<uint64_t>(common));
    return r;
  }

  bool fits_u64() const { return sign_ >= 0 && mag_.size() <= 2; }
  uint64_t to_u64() const {
    if (!fits_u64()) throw std::overflow_error("BigInt: does not fit in uint64");
    return to_u64_mag();
  }

  double to_double() const {
    double r = 0;
    for (size_t i = mag_.size(); i-- > 0;) r = r * 4294967296.0 + mag_[i];
    return sign_ < 0 ? -r : r;
  }

  std::string to_string() const {
    if (sign_ == 0) return "0";
    std::vector<uint32_t> m = mag_;
    std::string digits;
    while (!m.empty()) {
      uint64_t rem = 0;
      for (size_t i = m.size(); i-- > 0;) {
        uint64_t cur = (rem << 32) | m[i];
        m[i] = static_cast<uint32_t>(cur / 1000000000ull);
        rem = cur % 1000000000ull;
      }
      trim_mag(m);
      for (int d = 0; d < 9; ++d) {
        digits.push_back(char('0' + rem % 10));
        rem /= 10;
      }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    if (sign_ < 0) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
  }

  size_t bit_length() const {
    if (mag_.empty()) return 0;
    uint32_t top = mag_.back();
    size_t bits = (mag_.size() - 1) * 32;
    while (top) {
      ++bits;
      top >>= 1;
    }
    return bits;
  }

private:
  int sign_ = 0;
  std::vector<uint32_t> mag_;

  void set_magnitude(unsigned long long m) {
    mag_.clear();
    while (m) {
      mag_.push_back(static_cast<uint32_t>(m));
      m >>= 32;
    }
  }

  uint64_t to_u64_mag() const {
    uint64_t v = 0;
    if (mag_.size() > 0) v = mag_[0];
    if (mag_.size() > 1) v |= static_cast<uint64_t>(mag_[1]) << 32;
    return v;
  }

  void trim() { trim_mag(mag_); if (mag_.empty()) sign_ = 0; }

  static void trim_mag(std::vector<uint32_t>& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
  }

  static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }

  static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    const auto& big = a.size() >= b.size() ? a : b;
    const auto& small = a.size() >= b.size() ? b : a;
    std::vector<uint32_t> r(big.size() + 1, 0u);
    uint64_t carry = 0;
    for (size_t i = 0; i < big.size(); ++i) {
      uint64_t cur = carry + big[i] + (i < small.size() ? small[i] : 0u);
      r[i] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
    }
    r[big.size()] = static_cast<uint32_t>(carry);
    trim_mag(r);
    return r;
  }

  // requires a >= b
  static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r(a.size(), 0u);
    int64_t borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      int64_t cur = int64_t(a[i]) - borrow - (i < b.size() ? int64_t(b[i]) : 0);
      if (cur < 0) {
        cur += int64_t(1) << 32;
        borrow = 1;
      } else {
        borrow = 0;
      }
      r[i] = static_cast<uint32_t>(cur);
    }
    trim_mag(r);
    return r;
  }

  static int ctz_or_zero(const std::vector<uint32_t>& m) {
    if (m.empty()) return 0;
    return ctz_mag(m);
  }

  static int ctz_mag(const std::vector<uint32_t>& m) {
    for (size_t i = 0; i < m.size(); ++i)
      if (m[i]) return int(i) * 32 + __builtin_ctz(m[i]);
    return 0;
  }

  static void shr_mag(std::vector<uint32_t>& m, int bits) {
    if (bits == 0 || m.empty()) return;
    size_t limb = bits / 32;
    int rem = bits % 32;
    if (limb >= m.size()) {
      m.clear();
      return;
    }
    m.erase(m.begin(), m.begin() + limb);
    if (rem) {
      for (size_t i = 0; i < m.size(); ++i) {
        m[i] >>= rem;
        if (i + 1 < m.size()) m[i] |= m[i + 1] << (32 - rem);
      }
    }
    trim_mag(m);
  }

  // shift-and-subtract long division on magnitudes; fast path for 1-limb divisor
  static std::pair<std::vector<uint32_t>, std::vector<uint32_t>>
  divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> q, r;
    if (b.empty()) throw std::domain_error("BigInt: division by zero");
    if (cmp_mag(a, b) < 0) return {q, a};
    if (b.size() == 1) {
      uint64_t d = b[0], rem = 0;
      q.assign(a.size(), 0u);
      for (size_t i = a.size(); i-- > 0;) {
        uint64_t cur = (rem << 32) | a[i];
        q[i] = static_cast<uint32_t>(cur / d);
        rem = cur % d;
      }
      trim_mag(q);
      if (rem) r.push_back(static_cast<uint32_t>(rem));
      return {q, r};
    }
    size_t abits = a.size() * 32;
    q.assign(a.size(), 0u);
    for (size_t i = abits; i-- > 0;) {
      // r = (r << 1) | bit i of a
      uint32_t carry = (a[i / 32] >> (i % 32)) & 1u;
      for (size_t j = 0; j < r.size(); ++j) {
        uint32_t nc = r[j] >> 31;
        r[j] = (r[j] << 1) | carry;
        carry = nc;
      }
      if (carry) r.push_back(carry);
      if (cmp_mag(r, b) >= 0) {
        r = sub_mag(r, b);
        q[i / 32] |= 1u << (i % 32);
      }
    }
    trim_mag(q);
    trim_mag(r);
    return {q, r};
  }
};

/// Exact rational number, always normalized: denominator > 0, gcd(|num|, den) = 1.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}
  Rational(int v) : num_(v), den_(1) {}
  Rational(BigInt n) : num_(std::move(n)), den_(1) {}
  Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

  static Rational from_string(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(BigInt::from_string(s));
    return Rational(BigInt::from_string(s.substr(0, slash)),
                    BigInt::from_string(s.substr(slash + 1)));
  }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_ == BigInt(1) && den_ == BigInt(1); }
  bool is_integer() const { return den_ == BigInt(1); }
  int sign() const { return num_.sign(); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend int cmp(const Rational& a, const Rational& b) {
    return cmp(a.num_ * b.den_, b.num_ * a.den_);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a, b) >= 0; }

  std::string to_string() const {
    if (den_ == BigInt(1)) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
  }

  double to_double() const { return num_.to_double() / den_.to_double(); }

  /// Decimal string rounded half-up to `places` fractional digits, e.g. 0.4308.
  std::string to_decimal_string(int places) const {
    BigInt scale = BigInt::pow(BigInt(10), static_cast<uint64_t>(places));
    BigInt scaled_num = num_.abs() * scale;
    auto [q, r] = divmod(scaled_num, den_);
    if (r + r >= den_) q += BigInt(1);
    std::string digits = q.to_string();
    if (digits.size() <= static_cast<size_t>(places))
      digits.insert(0, static_cast<size_t>(places) + 1 - digits.size(), '0');
    if (places > 0) digits.insert(digits.size() - places, ".");
    if (num_.is_negative()) digits.insert(0, "-");
    return digits;
  }

private:
  BigInt num_, den_;

  void normalize() {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    if (den_.is_negative()) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_.is_zero()) {
      den_ = BigInt(1);
      return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!(g == BigInt(1))) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
  }
};

}  // namespace treefn

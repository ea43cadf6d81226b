#include <doctest.h>

#include <treefn/bigint.hpp>

using treefn::BigInt;
using treefn::Rational;

TEST_CASE("BigInt round-trips decimal strings") {
  for (const char* s : {"0", "1", "-1", "4294967295", "4294967296", "18446744073709551616",
                        "-340282366920938463463374607431768211456"}) {
    CHECK(BigInt::from_string(s).to_string() == s);
  }
}

TEST_CASE("BigInt arithmetic agrees with 64-bit arithmetic on small values") {
  long long vals[] = {0, 1, -1, 7, -13, 1000003, -999999937, 123456789};
  for (long long a : vals)
    for (long long b : vals) {
      CHECK(BigInt(a) + BigInt(b) == BigInt(a + b));
      CHECK(BigInt(a) - BigInt(b) == BigInt(a - b));
      CHECK(BigInt(a) * BigInt(b) == BigInt(a * b));
      if (b != 0) {
        auto [q, r] = divmod(BigInt(a), BigInt(b));
        CHECK(q == BigInt(a / b));
        CHECK(r == BigInt(a % b));
      }
    }
}

TEST_CASE("BigInt multi-limb division and multiplication invert each other") {
  BigInt a = BigInt::from_string("123456789012345678901234567890123456789");
  BigInt b = BigInt::from_string("98765432109876543210");
  auto [q, r] = divmod(a, b);
  CHECK(q * b + r == a);
  CHECK(r >= BigInt(0));
  CHECK(r < b);
}

TEST_CASE("BigInt pow and pow2") {
  CHECK(BigInt::pow(BigInt(2), 10) == BigInt(1024));
  CHECK(BigInt::pow2(10) == BigInt(1024));
  CHECK(BigInt::pow(BigInt(6), 4) == BigInt(1296));
  CHECK(BigInt::pow2(128).to_string() == "340282366920938463463374607431768211456");
  CHECK(BigInt::pow(BigInt(10), 30) == BigInt::from_string("1000000000000000000000000000000"));
}

TEST_CASE("BigInt gcd") {
  CHECK(BigInt::gcd(BigInt(12), BigInt(18)) == BigInt(6));
  CHECK(BigInt::gcd(BigInt(-12), BigInt(18)) == BigInt(6));
  CHECK(BigInt::gcd(BigInt(0), BigInt(5)) == BigInt(5));
  BigInt big1 = BigInt::pow(BigInt(2), 100) * BigInt(9);
  BigInt big2 = BigInt::pow(BigInt(2), 90) * BigInt(15);
  CHECK(BigInt::gcd(big1, big2) == BigInt::pow(BigInt(2), 90) * BigInt(3));
}

TEST_CASE("Rational normalizes and orders") {
  CHECK(Rational(6, 4).to_string() == "3/2");
  CHECK(Rational(-6, 4).to_string() == "-3/2");
  CHECK(Rational(6, -4).to_string() == "-3/2");
  CHECK(Rational(0, 7).to_string() == "0");
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 3) * Rational(3, 5) == Rational(1, 5));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 3) > Rational(-1, 2));
  CHECK(Rational::from_string("3/2") == Rational(3, 2));
  CHECK(Rational::from_string("-7") == Rational(-7));
}

TEST_CASE("Rational decimal rendering rounds half up at 4 places") {
  CHECK(Rational(224, 520).to_decimal_string(4) == "0.4308");
  CHECK(Rational(416, 520).to_decimal_string(4) == "0.8000");
  CHECK(Rational(1, 3).to_decimal_string(4) == "0.3333");
  CHECK(Rational(1, 2).to_decimal_string(0) == "1");
  CHECK(Rational(0).to_decimal_string(4) == "0.0000");
}

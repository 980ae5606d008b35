#include <cmath>
#include <random>

#include "doctest.h"
#include "qclift/error.hpp"
#include "qclift/exact.hpp"

using namespace qclift;

TEST_CASE("rationals parse and print exactly") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK_THROWS_AS(parse_rational(""), ParseError);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK(to_string(ratio(4, 2)) == "2");
  CHECK(ratio(6, 4) == Rational(3, 2));
  CHECK(to_decimal(Rational(1, 4)) == "0.25");
  CHECK(to_decimal(Rational(1, 3)) == "~0.333333333333");
}

TEST_CASE("powers of two") {
  CHECK(pow2(3) == 8);
  CHECK(pow2(-2) == Rational(1, 4));
  CHECK(pow(Rational(2, 3), 3) == Rational(8, 27));
}

TEST_CASE("LogReal ordering is exact") {
  LogReal l3 = LogReal::log2_of(Rational(3));
  CHECK(l3 > LogReal(Rational(3, 2)));
  CHECK(l3 < LogReal(Rational(8, 5)));
  CHECK(LogReal::log2_of(Rational(8)) == LogReal(3));
  CHECK(LogReal::log2_of(Rational(1, 4)) == LogReal(-2));
  CHECK((l3 - l3).sign() == 0);
  CHECK(LogReal::log2_of(Rational(6)) == LogReal(1) + l3);
}

TEST_CASE("probability against dyadic thresholds") {
  // 1/3 against 2^(-3/2) ~ 0.354: less.
  CHECK(compare_prob_to_threshold(Rational(1, 3), Rational(3, 2)) == std::strong_ordering::less);
  CHECK(compare_prob_to_threshold(Rational(1, 4), Rational(2)) == std::strong_ordering::equal);
  CHECK(compare_prob_to_threshold(Rational(0), Rational(5)) == std::strong_ordering::less);
  CHECK(le_pow2(Rational(1, 4), LogReal(-2)));
  CHECK_FALSE(lt_pow2(Rational(1, 4), LogReal(-2)));
}

TEST_CASE("sign of u*v - q agrees with floating point away from ties") {
  std::mt19937_64 rng(11);
  int decided = 0;
  for (int k = 0; k < 300; ++k) {
    long base = 2 + static_cast<long>(rng() % 30);
    Rational a(static_cast<long>(rng() % 9) - 4, 4), c1(static_cast<long>(rng() % 5) + 1, 8);
    Rational a2(static_cast<long>(rng() % 9) - 4, 4), c2(static_cast<long>(rng() % 5), 8);
    a.canonicalize();
    c1.canonicalize();
    a2.canonicalize();
    c2.canonicalize();
    LogReal u = LogReal(a) + LogReal::log2_of(Rational(base)) * c1;
    LogReal v = LogReal(a2) + LogReal::log2_of(Rational(base)) * c2;
    Rational q(static_cast<long>(rng() % 17) - 8, 4);
    q.canonicalize();
    double exact = u.approx() * v.approx() - q.get_d();
    auto s = sign_of_product_minus(u, v, q);
    if (std::abs(exact) < 1e-9) continue;
    REQUIRE(s.has_value());
    CHECK(*s == (exact > 0 ? 1 : -1));
    ++decided;
  }
  CHECK(decided > 200);
}

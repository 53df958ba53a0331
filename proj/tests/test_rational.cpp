#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gauntlet/rational.hpp"

using namespace gauntlet;

TEST_CASE("rationals are stored reduced with positive denominators") {
  Rational r = make_rational(BigInt(4), BigInt(-6));
  CHECK(numerator(r) == -2);
  CHECK(denominator(r) == 3);
  CHECK(rat(2, 4) == Rational(1, 2));
  CHECK(rat_str(rat(-2, 4)) == "-1/2");
  CHECK(rat_str(rat(8)) == "8");
}

TEST_CASE("arithmetic is exact") {
  Rational third(1, 3), sixth(1, 6);
  CHECK(third + sixth == Rational(1, 2));
  CHECK(rat_pow(Rational(1, 2), 10) == Rational(1, 1024));
  // No drift over many operations.
  Rational acc(0);
  for (int i = 0; i < 1000; ++i) acc += Rational(1, 1000);
  CHECK(acc == 1);
}

TEST_CASE("parsing accepts canonical forms only") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK(parse_rational("17") == 17);
  CHECK_THROWS_AS(parse_rational("4/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("4/6"), std::invalid_argument);   // unreduced
  CHECK_THROWS_AS(parse_rational("1/-2"), std::invalid_argument);  // sign on denominator
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("a/b"), std::invalid_argument);
}

TEST_CASE("printing round-trips") {
  for (const auto& s : {"0", "1", "-1", "1/2", "-355/113", "1000000"}) {
    CHECK(rat_str(parse_rational(s)) == s);
  }
}

TEST_CASE("big integers do not overflow") {
  Rational big = rat_pow(Rational(2), 200);
  CHECK(big > 0);
  CHECK(rat_str(big * Rational(1, 2)) == rat_str(rat_pow(Rational(2), 199)));
}

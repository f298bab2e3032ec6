#include "doctest.h"
#include "support.hpp"

#include "wfdeploy/rational.hpp"

#include <random>

using namespace wfdeploy;
using wfdeploy::testing::q;

TEST_CASE("rationals parse from integers, decimals and fractions") {
  CHECK(parse_rational("12") == q(12));
  CHECK(parse_rational("0.4") == q(2, 5));
  CHECK(parse_rational(".5") == q(1, 2));
  CHECK(parse_rational("3.") == q(3));
  CHECK(parse_rational("6/4") == q(3, 2));
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1e3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("."), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("99999999999999999999999999999999999999999"),
                  std::invalid_argument);
}

TEST_CASE("rationals format as exact decimals when they terminate") {
  CHECK(format_rational(q(10)) == "10");
  CHECK(format_rational(q(2, 5)) == "0.4");
  CHECK(format_rational(q(9, 5)) == "1.8");
  CHECK(format_rational(q(1, 40)) == "0.025");
  CHECK(format_rational(q(1, 3)) == "1/3");
  CHECK(format_rational(q(0)) == "0");
}

TEST_CASE("format then parse is the identity") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long long> num(0, 1'000'000);
  std::uniform_int_distribution<long long> den(1, 4000);
  for (int i = 0; i < 500; ++i) {
    Rational v(num(rng), den(rng));
    CHECK(parse_rational(format_rational(v)) == v);
  }
}

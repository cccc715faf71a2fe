#include <doctest.h>

#include "ccl/error.hpp"
#include "ccl/value.hpp"

using namespace ccl;

TEST_CASE("rational normalizes sign and gcd") {
  Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(r.to_string() == "-1.5");
  CHECK(Rational(1, 3).to_string() == "1/3");
  CHECK(Rational(0).to_string() == "0.0");
  CHECK(Rational(7).to_string() == "7.0");
}

TEST_CASE("rational arithmetic is exact") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(Rational(1, 2) < Rational(2, 3));
}

TEST_CASE("overflow is reported") {
  Rational big(INT64_MAX);
  CHECK_THROWS_AS(big + Rational(1), Error);
  try {
    (void)(big * Rational(2));
  } catch (const Error &e) {
    CHECK(e.code() == "OVERFLOW");
  }
  CHECK_THROWS_AS(checked_add(INT64_MAX, 1), Error);
  CHECK(checked_mul(-3, 4) == -12);
}

TEST_CASE("decimal parsing") {
  CHECK(*Rational::parse_decimal("1.5") == Rational(3, 2));
  CHECK(*Rational::parse_decimal("-0.25") == Rational(-1, 4));
  CHECK(*Rational::parse_decimal("350000") == Rational(350000));
}

TEST_CASE("value typing") {
  CHECK(Value::of_int(3).fits(TypeTag::rat()));
  CHECK_FALSE(Value::of_rat(Rational(1, 2)).fits(TypeTag::int_()));
  CHECK(Value().fits(TypeTag::str()));
  CHECK(Value::of_str("a\"b").to_string() == "\"a\\\"b\"");
  CHECK(Value::of_enum("E", "V").to_string() == "E::V");
  CHECK(Value::default_of(TypeTag::rat(), "").to_string() == "0.0");
}

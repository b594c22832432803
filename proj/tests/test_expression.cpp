#include <doctest.h>

#include <cmath>
#include <string>

#include "critwave/errors.hpp"
#include "critwave/expression.hpp"

using critwave::Expression;
using critwave::ParseError;

TEST_CASE("expression: arithmetic and precedence") {
  CHECK(Expression::parse("2+3*4")(0.0) == 14.0);
  CHECK(Expression::parse("(2+3)*4")(0.0) == 20.0);
  CHECK(Expression::parse("6/4")(0.0) == 1.5);
  CHECK(Expression::parse("2^3^2")(0.0) == 512.0);   // right associative
  CHECK(Expression::parse("-2^2")(0.0) == -4.0);     // ^ binds over unary -
  CHECK(Expression::parse("2^-1")(0.0) == 0.5);
  CHECK(Expression::parse("1 - 2 - 3")(0.0) == -4.0);
  CHECK(Expression::parse("rho^2 - rho")(3.0) == 6.0);
  CHECK(Expression::parse("  rho * ( rho + 1 ) ")(2.0) == 6.0);
}

TEST_CASE("expression: functions and constants") {
  CHECK(Expression::parse("sin(pi/2)")(0.0) == doctest::Approx(1.0));
  CHECK(Expression::parse("cos(0)")(0.0) == 1.0);
  CHECK(Expression::parse("ln(exp(2))")(0.0) == doctest::Approx(2.0));
  CHECK(Expression::parse("sinh(rho)")(0.7) == doctest::Approx(std::sinh(0.7)));
  CHECK(Expression::parse("cosh(rho)")(0.7) == doctest::Approx(std::cosh(0.7)));
  CHECK(Expression::parse("sin(rho)*cos(rho)")(0.8) ==
        doctest::Approx(0.49978680152075258).epsilon(1e-15));
  CHECK(Expression::parse("exp(-rho^2)")(1.5) ==
        doctest::Approx(std::exp(-2.25)));
}

TEST_CASE("expression: numeric literals") {
  CHECK(Expression::parse("1e-3")(0.0) == 1e-3);
  CHECK(Expression::parse("2.5E2")(0.0) == 250.0);
  CHECK(Expression::parse(".5 + 0.25")(0.0) == 0.75);
}

TEST_CASE("expression: division by zero follows IEEE") {
  CHECK(std::isinf(Expression::parse("1/rho")(0.0)));
}

TEST_CASE("expression: source is preserved") {
  Expression e = Expression::parse("rho*(2-rho)");
  CHECK(e.source() == "rho*(2-rho)");
}

TEST_CASE("expression: parse errors") {
  CHECK_THROWS_AS(Expression::parse(""), ParseError);
  CHECK_THROWS_AS(Expression::parse("2 +"), ParseError);
  CHECK_THROWS_AS(Expression::parse("2 + * 3"), ParseError);
  CHECK_THROWS_AS(Expression::parse("(1 + 2"), ParseError);
  CHECK_THROWS_AS(Expression::parse("1 + 2)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(2)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("sin 2"), ParseError);
  CHECK_THROWS_AS(Expression::parse("rho rho"), ParseError);
  CHECK_THROWS_AS(Expression::parse("1..2"), ParseError);
}

TEST_CASE("expression: nesting depth is bounded") {
  std::string deep(80, '(');
  deep += "1";
  deep += std::string(80, ')');
  CHECK_THROWS_AS(Expression::parse(deep), ParseError);

  std::string fine(40, '(');
  fine += "1";
  fine += std::string(40, ')');
  CHECK(Expression::parse(fine)(0.0) == 1.0);
}

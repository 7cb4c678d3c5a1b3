#include <catch2/catch_amalgamated.hpp>

#include "difflab/expr/parser.hpp"

#include <cmath>

using namespace difflab;
using Catch::Approx;

TEST_CASE("parse and evaluate arithmetic", "[expr_parser]") {
  auto e = parse_expression("x^2 + 3*x - 1");
  CHECK(evaluate(e, {{"x", 2.0}}) == 9.0);
  CHECK(evaluate(parse_expression("-x^2"), {{"x", 3.0}}) == -9.0);
  CHECK(evaluate(parse_expression("2^-1"), {}) == 0.5);
  CHECK(evaluate(parse_expression("2^3^2"), {}) == 512.0);
  CHECK(evaluate(parse_expression("pow(x, 3)"), {{"x", -2.0}}) == -8.0);
  CHECK(evaluate(parse_expression("sin(pi/2)"), {}) == Approx(1.0));
  CHECK(evaluate(parse_expression("1.5e2"), {}) == 150.0);
}

TEST_CASE("variables are sorted and unique", "[expr_parser]") {
  auto e = parse_expression("y*x + x");
  CHECK(variables(e) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("guards raise DomainError", "[expr_parser]") {
  CHECK_THROWS_AS(evaluate(parse_expression("1/x"), {{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("log(x)"), {{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("sqrt(x)"), {{"x", -1.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("x^0.5"), {{"x", -1.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse_expression("x"), {}), DomainError);
  CHECK(evaluate(parse_expression("sqrt(x)"), {{"x", 0.0}}) == 0.0);
}

TEST_CASE("atzero overrides only at the exact origin", "[expr_parser]") {
  auto f = parse_expression("atzero(x*y^2/(x^2+y^2), 0)");
  CHECK(evaluate(f, {{"x", 0.0}, {"y", 0.0}}) == 0.0);
  CHECK(evaluate(f, {{"x", 1.0}, {"y", 1.0}}) == Approx(0.5));
  CHECK(evaluate(f, {{"x", 0.0}, {"y", 1.0}}) == 0.0);
  auto g = parse_expression("atzero(sin(t)/t, 1, t)");
  CHECK(evaluate(g, {{"t", 0.0}}) == 1.0);
  CHECK_THROWS_AS(evaluate(parse_expression("atzero(x/y, 0)"), {{"x", 1.0}, {"y", 0.0}}), DomainError);
}

TEST_CASE("parse errors carry positions", "[expr_parser]") {
  CHECK_THROWS_AS(parse_expression("x +"), ParseError);
  CHECK_THROWS_AS(parse_expression("foo(x)"), ParseError);
  CHECK_THROWS_AS(parse_expression("sin(x, y)"), ParseError);
  CHECK_THROWS_AS(parse_expression("(x"), ParseError);
  CHECK_THROWS_AS(parse_expression("atzero(x, y)"), ParseError);
  try {
    parse_expression("x + * y");
  } catch (const ParseError& e) {
    CHECK(e.position == 4);
  }
}

TEST_CASE("printing round-trips through the parser", "[expr_parser]") {
  for (const char* text : {"x^2 + 3*x - 1", "-(x - y)^2", "x/(y*z)", "x - (y - z)", "2^-x", "(-2)^x",
                           "atzero(x*y^2/(x^2+y^4), 0)", "atzero(sin(t)/t, 1, t)", "relu(-x) + abs(x - 1)"}) {
    auto e = parse_expression(text);
    auto back = parse_expression(to_string(e));
    CHECK(to_string(back) == to_string(e));
    for (double x : {-0.7, 0.3, 1.9}) {
      Env env{{"x", x}, {"y", 0.5 * x + 1}, {"z", 2.0}, {"t", x}};
      double a = 0, b = 0;
      bool ea = false, eb = false;
      try { a = evaluate(e, env); } catch (const DomainError&) { ea = true; }
      try { b = evaluate(back, env); } catch (const DomainError&) { eb = true; }
      CHECK(ea == eb);
      if (!ea) CHECK(a == b);
    }
  }
}

TEST_CASE("substitution keeps atzero guards attached", "[expr_parser]") {
  auto f = parse_expression("atzero(x*y^2/(x^2+y^2), 0)");
  auto fp = substitute(f, {{"x", parse_expression("t")}, {"y", parse_expression("t^2")}});
  CHECK(variables(fp) == std::vector<std::string>{"t"});
  CHECK(evaluate(fp, {{"t", 0.0}}) == 0.0);
  CHECK(evaluate(fp, {{"t", 1.0}}) == Approx(0.5));
}

#include <catch2/catch_amalgamated.hpp>

#include "difflab/expr/parser.hpp"
#include "difflab/jet/multi_series.hpp"
#include "difflab/jet/taylor.hpp"
#include "oracles.hpp"

using namespace difflab;
using Catch::Approx;

namespace {
Jet along(const char* text, PolynomialPath path, int k) { return taylor_eval(parse_expression(text), path, k); }
void check_coeffs(const Jet& j, std::vector<double> expect, double tol = 1e-14) {
  REQUIRE(j.c.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(std::fabs(j.c[i] - expect[i]) <= tol);
}
} // namespace

TEST_CASE("polynomial identity", "[jet_taylor]") {
  check_coeffs(along("x^2", {{"x", {3, 1}}}, 2), {9, 6, 1});
}

TEST_CASE("sin of s^2", "[jet_taylor]") {
  // sin(u) = u - u^3/6 + ..., u = s^2
  check_coeffs(along("sin(x)", {{"x", {0, 0, 1}}}, 6), {0, 0, 1, 0, 0, 0, -1.0 / 6});
}

TEST_CASE("elementary functions against closed forms", "[jet_taylor]") {
  check_coeffs(along("exp(x)", {{"x", {0, 1}}}, 4), {1, 1, 0.5, 1.0 / 6, 1.0 / 24});
  check_coeffs(along("log(x)", {{"x", {1, 1}}}, 4), {0, 1, -0.5, 1.0 / 3, -0.25});
  check_coeffs(along("1/(1-x)", {{"x", {0, 1}}}, 5), {1, 1, 1, 1, 1, 1});
  check_coeffs(along("sqrt(x)", {{"x", {1, 1}}}, 3), {1, 0.5, -0.125, 0.0625});
  check_coeffs(along("cos(x)", {{"x", {0, 1}}}, 4), {1, 0, -0.5, 0, 1.0 / 24});
  check_coeffs(along("x^-2", {{"x", {1, 1}}}, 3), {1, -2, 3, -4});
  check_coeffs(along("2^x", {{"x", {0, 1}}}, 2), {1, std::log(2.0), std::log(2.0) * std::log(2.0) / 2}, 1e-15);
}

TEST_CASE("removable singularities cancel", "[jet_taylor]") {
  check_coeffs(along("atzero(sin(t)/t, 1, t)", {{"t", {0, 1}}}, 4), {1, 0, -1.0 / 6, 0, 1.0 / 120}, 1e-15);
  check_coeffs(along("atzero(x*y^2/(x^2+y^2), 0)", {{"x", {0, 1}}, {"y", {0, 1}}}, 1), {0, 0.5});
  check_coeffs(along("atzero(x*y^2/(x^2+y^4), 0)", {{"x", {0, 0, 1}}, {"y", {0, 1}}}, 0), {0.5}, 1e-15 + 1);
}

TEST_CASE("atzero discontinuity along a path is a kink", "[jet_taylor]") {
  CHECK_THROWS_AS(along("atzero(x*y^2/(x^2+y^4), 0)", {{"x", {0, 0, 1}}, {"y", {0, 1}}}, 1), KinkError);
  // identically at the override point: constant jet
  check_coeffs(along("atzero(x*y^2/(x^2+y^4), 0)", {{"x", {0}}, {"y", {0}}}, 2), {0, 0, 0});
}

TEST_CASE("unguarded 0/0 is a domain error", "[jet_taylor]") {
  CHECK_THROWS_AS(along("sin(t)/t", {{"t", {0, 1}}}, 2), DomainError);
  CHECK_THROWS_AS(along("log(x)", {{"x", {0, 1}}}, 2), DomainError);
}

TEST_CASE("kinks are checked from both sides", "[jet_taylor]") {
  CHECK_THROWS_AS(along("abs(x)", {{"x", {0, 1}}}, 1), KinkError);
  check_coeffs(along("abs(x)", {{"x", {0, 1}}}, 0), {0});
  check_coeffs(along("x*abs(x)", {{"x", {0, 1}}}, 1), {0, 0});
  CHECK_THROWS_AS(along("x*abs(x)", {{"x", {0, 1}}}, 2), KinkError);
  check_coeffs(along("abs(x)", {{"x", {0, 0, 1}}}, 3), {0, 0, 1, 0});
  check_coeffs(along("relu(x)", {{"x", {0, 0, -1}}}, 3), {0, 0, 0, 0});
  check_coeffs(along("sqrt(x^2)", {{"x", {0, 0, 1}}}, 2), {0, 0, 1});
  CHECK_THROWS_AS(along("sqrt(abs(x))", {{"x", {0, 1}}}, 1), KinkError);
  check_coeffs(along("abs(x)", {{"x", {-2, 1}}}, 2), {2, -1, 0});
  check_coeffs(along("sqrt(abs(x*y))", {{"x", {0, 1}}, {"y", {0}}}, 3), {0, 0, 0, 0});
}

TEST_CASE("order cap", "[jet_taylor]") {
  CHECK_THROWS_AS(along("x", {{"x", {0, 1}}}, K_MAX + 1), DomainError);
}

TEST_CASE("compose_jets examples", "[jet_taylor]") {
  Jet inner{0.0, {0, 1, 1, 0, 0}};
  Jet square{0.0, {0, 0, 1, 0, 0}};
  check_coeffs(compose_jets(square, inner), {0, 0, 1, 2, 1});
  Jet id{2.0, {2, 1, 0}};
  Jet j{0.0, {2, 3, -1}};
  check_coeffs(compose_jets(id, j), {2, 3, -1});
  CHECK_THROWS_AS(compose_jets(Jet{0.0, {0, 1}}, Jet{0.0, {0, 1, 2}}), OrderMismatch);
}

TEST_CASE("chain rule on random polynomial pairs", "[jet_taylor]") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int k = static_cast<int>(rng.integer(1, 4));
    auto f = oracle::random_int_poly(rng, static_cast<int>(rng.integer(1, 4)), 3);
    auto p = oracle::random_int_poly(rng, static_cast<int>(rng.integer(1, 3)), 3);
    auto fs = oracle::shift(f, p[0], k + 1);
    auto expect = oracle::compose(fs, p, k + 1);
    Jet composed = compose_jets(Jet{p[0], fs}, Jet{0.0, [&] { auto q = p; q.resize(k + 1, 0.0); return q; }()});
    Jet direct = taylor_eval(substitute(oracle::poly_expr(f, "u"), {{"u", oracle::poly_expr(p, "s")}}), {{"s", {0, 1}}}, k);
    for (int i = 0; i <= k; ++i) {
      CHECK(composed.c[i] == expect[i]);
      CHECK(direct.c[i] == expect[i]);
    }
  }
}

TEST_CASE("multivariate series partial derivatives", "[jet_taylor]") {
  auto e = parse_expression("x^2*y + exp(x)*sin(y)");
  auto s = multi_taylor_at(e, {"x", "y"}, {0.0, 0.0}, 3);
  CHECK(partial_derivative(s, {1, 0}) == Approx(0.0).margin(1e-15));
  CHECK(partial_derivative(s, {0, 1}) == Approx(1.0));
  CHECK(partial_derivative(s, {1, 1}) == Approx(1.0));
  CHECK(partial_derivative(s, {2, 1}) == Approx(3.0));
  CHECK(partial_derivative(s, {0, 3}) == Approx(-1.0));
  auto t = MonomialTable::get(2, 2);
  REQUIRE(t->size() == 6);
  CHECK(t->exponent(1) == MultiIndex{1, 0});
  CHECK(t->exponent(3) == MultiIndex{2, 0});
  CHECK(t->exponent(4) == MultiIndex{1, 1});
  CHECK_THROWS_AS(multi_taylor_at(parse_expression("abs(x)"), {"x"}, {0.0}, 1), KinkError);
}

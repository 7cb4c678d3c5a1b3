#include <catch2/catch_amalgamated.hpp>

#include "difflab/convenient/lipk.hpp"
#include "difflab/convenient/mackey.hpp"
#include "difflab/convenient/weak.hpp"
#include "difflab/expr/parser.hpp"

using namespace difflab;

namespace {
SampledCurve curve(std::vector<std::string> exprs, double lo = -1.0, double hi = 1.0) {
  SampledCurve c;
  for (const auto& e : exprs) c.components.push_back(parse_expression(e));
  c.lo = lo;
  c.hi = hi;
  return c;
}
DualPair full2() { return make_dual_pair({"x", "y"}, {{1, 0}, {0, 1}}); }
DualPair sum2() { return make_dual_pair({"x", "y"}, {{1, 1}}); }

VectorSequence closed(std::vector<std::string> terms, std::vector<double> limit,
                      VectorSequence::Kind kind = VectorSequence::Kind::ClosedForm) {
  VectorSequence s;
  s.kind = kind;
  for (const auto& t : terms) s.terms.push_back(parse_expression(t));
  s.limit = std::move(limit);
  return s;
}
} // namespace

TEST_CASE("separation examples", "[convenient]") {
  CHECK(separation_check(full2()).passed());
  auto v = separation_check(sum2());
  REQUIRE(v.failed());
  CHECK(v.witness()->direction == std::vector<double>{1, -1});
  CHECK(separation_check(make_dual_pair({"x", "y"}, {{1, 0}, {1, 1}})).passed());
}

TEST_CASE("weak derivative examples", "[convenient]") {
  auto a = weak_derivative(curve({"t", "t^2"}), 0.0, full2());
  CHECK(a.value == std::vector<double>{1, 0});
  CHECK(a.unique);
  auto b = weak_derivative(curve({"t", "t"}), 0.0, sum2());
  CHECK_FALSE(b.unique);
  CHECK(b.value[0] == Catch::Approx(1.0));
  CHECK(b.value[1] == Catch::Approx(1.0));
  REQUIRE(b.kernel.size() == 1);
  CHECK(b.kernel[0] == std::vector<double>{1, -1});
  auto c = weak_derivative(curve({"t*abs(t)", "0"}), 0.0, full2());
  CHECK(c.value == std::vector<double>{0, 0});
  CHECK_THROWS_AS(weak_derivative(curve({"abs(t)", "0"}), 0.0, full2()), NotDifferentiable);
}

TEST_CASE("over-determined families reproduce the derivative", "[convenient]") {
  auto pair = make_dual_pair({"x", "y"}, {{1, 0}, {0, 1}, {1, 1}});
  auto ok = weak_derivative(curve({"sin(t)", "t^3"}), 0.3, pair);
  CHECK(ok.unique);
  CHECK(ok.residual < 1e-12);
  Eigen::VectorXd b(3);
  b << 1.0, 1.0, 3.0;
  CHECK_THROWS_AS(detail::solve_pairings(pair, b, "derivative", default_tolerances()), NoWeakDerivative);
}

TEST_CASE("weak integral examples", "[convenient]") {
  auto a = weak_integral(curve({"1", "2*t"}), 0.0, 1.0, full2());
  CHECK(a.value[0] == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(a.value[1] == Catch::Approx(1.0).epsilon(1e-12));
  auto b = weak_integral(curve({"cos(t)", "sin(t)"}), 0.0, 3.141592653589793, full2());
  CHECK(std::fabs(b.value[0]) < 1e-12);
  CHECK(b.value[1] == Catch::Approx(2.0).epsilon(1e-12));
  auto c = weak_integral(curve({"t", "-t"}), 0.0, 1.0, sum2());
  CHECK_FALSE(c.unique);
  CHECK(c.value == std::vector<double>{0, 0});
}

TEST_CASE("Mackey convergence examples", "[convenient]") {
  auto p = full2();
  CHECK(mackey_convergence_probe(closed({"2^(-n)", "2^(-n)"}, {0, 0}), p, 10000).passed());
  auto alt = mackey_convergence_probe(closed({"(-1)^n", "0"}, {0, 0}), p, 10000);
  REQUIRE(alt.failed());
  CHECK(alt.witness()->values.at("tail_min") == Catch::Approx(1.0));
  CHECK(mackey_convergence_probe(closed({"3", "-1"}, {3, -1}), p, 10000).passed());
}

TEST_CASE("Mackey Cauchy examples", "[convenient]") {
  auto p = full2();
  CHECK(mackey_cauchy_probe(closed({"1/n", "0"}, {0, 0}, VectorSequence::Kind::PartialProducts), p, 10000).passed());
  auto h = mackey_cauchy_probe(closed({"1/n", "0"}, {0, 0}, VectorSequence::Kind::PartialSums), p, 10000);
  CHECK(h.inconclusive());
  CHECK(h.reason().find("divergence") != std::string::npos);
  CHECK(mackey_cauchy_probe(closed({"(-1)^n", "0"}, {0, 0}), p, 10000).failed());
}

TEST_CASE("Lip^k examples", "[convenient]") {
  auto a = lipk_probe(curve({"abs(t)"}), 1);
  REQUIRE(a.failed());
  CHECK(std::fabs(a.witness()->point[0]) < 0.01);
  CHECK(lipk_probe(curve({"t*abs(t)"}), 1).passed());
  CHECK(lipk_probe(curve({"t*abs(t)"}), 2).failed());
  for (int k = 0; k <= 4; ++k) CHECK(lipk_probe(curve({"1 - 2*t + 3*t^3", "t^2"}), k).passed());
  CHECK(lipk_probe(curve({"sin(3*t)", "exp(t)"}), 2).passed());
}

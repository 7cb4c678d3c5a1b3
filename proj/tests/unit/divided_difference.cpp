#include <catch2/catch_amalgamated.hpp>

#include "difflab/expr/parser.hpp"
#include "difflab/jet/divided_difference.hpp"
#include "oracles.hpp"

using namespace difflab;
using oracle::Rat;

TEST_CASE("delta^0 is evaluation", "[divided_difference]") {
  CHECK(delta_k(parse_expression("t^2 + 1"), "t", {3.0}) == 10.0);
}

TEST_CASE("delta^2 of t^2 is 2", "[divided_difference]") {
  CHECK(delta_k(parse_expression("t^2"), "t", {0.0, 1.0, 2.0}) == 2.0);
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> nodes{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    CHECK(std::fabs(delta_k(parse_expression("t^2"), "t", nodes) - 2.0) <= 1e-12);
  }
}

TEST_CASE("coincident nodes are rejected", "[divided_difference]") {
  CHECK_THROWS_AS(delta_k(parse_expression("t"), "t", {1.0, 2.0, 1.0}), CoincidentNodes);
}

TEST_CASE("delta^k annihilates polynomials of degree below k", "[divided_difference]") {
  Rng rng(5);
  for (int k = 1; k <= 6; ++k)
    for (int trial = 0; trial < 20; ++trial) {
      auto p = oracle::random_poly(rng, k - 1, 1.0);
      std::vector<double> nodes;
      for (int i = 0; i <= k; ++i) nodes.push_back(-1.0 + 2.0 * i / k + rng.uniform(-0.05, 0.05));
      CHECK(std::fabs(delta_k(oracle::poly_expr(p, "t"), "t", nodes)) <= 1e-10);
    }
}

TEST_CASE("delta^k equals k! times the classical divided difference exactly", "[divided_difference]") {
  Rng rng(3);
  for (int degree = 0; degree <= 6; ++degree)
    for (int k = 0; k <= 6; ++k)
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<long long> coeffs(degree + 1);
        for (auto& c : coeffs) c = rng.integer(-5, 5);
        auto f = [&](const Rat& t) {
          Rat acc(0);
          for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + Rat(coeffs[i]);
          return acc;
        };
        std::vector<Rat> nodes;
        while (static_cast<int>(nodes.size()) <= k) {
          Rat t = Rat(rng.integer(-20, 20)) / Rat(rng.integer(1, 7));
          if (std::find(nodes.begin(), nodes.end(), t) == nodes.end()) nodes.push_back(t);
        }
        Rat recursive = delta_k<Rat>(f, nodes);
        CHECK(recursive == oracle::factorial(k) * oracle::lagrange_divided_difference(f, nodes));
        // leading coefficient rule: delta^degree p = degree! * lead
        if (k == degree) CHECK(recursive == oracle::factorial(k) * Rat(coeffs.back()));
      }
}

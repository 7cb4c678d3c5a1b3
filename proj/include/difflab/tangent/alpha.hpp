#pragma once

#include "difflab/convenient/dual_pair.hpp"
#include "difflab/core/random.hpp"
#include "difflab/core/verdict.hpp"
#include "difflab/tangent/classes.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace difflab {

inline JetContext functional_context(const DualPair& pair) { return {pair.coords, pair.functions(), 1}; }

/// alpha(v) = [F + t v], jets taken against the functionals.
inline TangentClass alpha(const std::vector<double>& v, const std::vector<double>& F, const DualPair& pair,
                          const Tolerances& tol = default_tolerances()) {
  if (v.size() != pair.dim() || F.size() != pair.dim()) throw SchemaError("alpha: vector length differs from the carrier");
  return make_class(line_plaque(F, v), F, functional_context(pair), false, tol);
}

/// alpha is injective iff the functionals separate points. Rank decides; random
/// pairs u, u + k with k in the kernel confirm collisions, random distinct pairs
/// confirm injectivity.
inline Verdict alpha_injectivity_probe(const DualPair& pair, int trials, const Tolerances& tol = default_tolerances()) {
  const auto m = static_cast<Eigen::Index>(pair.dim());
  std::vector<Residual> trace;
  int rank = 0;
  Eigen::VectorXd sv;
  if (pair.L.rows() > 0) {
    sv = Eigen::JacobiSVD<Eigen::MatrixXd>(pair.L).singularValues();
    if (sv.size() > 0 && sv[0] > 0.0)
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol.rank * sv[0]) ++rank;
  }
  for (Eigen::Index i = 0; i < sv.size(); ++i) trace.push_back({"singular_value", static_cast<double>(i), sv[i]});
  const std::vector<double> F(static_cast<std::size_t>(m), 0.0);
  Rng rng(tol.seed);
  auto random_vec = [&] {
    std::vector<double> v(static_cast<std::size_t>(m));
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
  };
  if (rank == m) {
    for (int t = 0; t < trials; ++t) {
      auto u = random_vec(), v = random_vec();
      auto a = alpha(u, F, pair, tol), b = alpha(v, F, pair, tol);
      trace.push_back({"collision_gap", static_cast<double>(t), jet_gap(a.jet.entries, b.jet.entries)});
      if (jets_equal(a.jet.entries, b.jet.entries, tol)) {
        Witness w;
        w.kind = "collision";
        w.point = u;
        w.direction = v;
        w.note = "full rank but two sampled vectors share a class";
        return Verdict::fail(w, trace);
      }
    }
    Verdict v = Verdict::pass(trace);
    v.note("functional matrix has full column rank " + std::to_string(rank));
    return v;
  }
  const std::vector<double> k = kernel_vector(pair);
  const std::vector<double> zero(static_cast<std::size_t>(m), 0.0);
  auto ak = alpha(k, F, pair, tol), a0 = alpha(zero, F, pair, tol);
  bool confirmed = jets_equal(ak.jet.entries, a0.jet.entries, tol);
  for (int t = 0; t < trials && confirmed; ++t) {
    auto u = random_vec(), v = u;
    double s = rng.uniform(-2.0, 2.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * k[i];
    confirmed = jets_equal(alpha(u, F, pair, tol).jet.entries, alpha(v, F, pair, tol).jet.entries, tol);
  }
  Witness w;
  w.kind = "kernel-vector";
  w.direction = k;
  w.point = zero;
  w.values["rank"] = rank;
  w.values["dimension"] = static_cast<double>(m);
  w.note = confirmed ? "alpha(v) = alpha(0)" : "kernel vector did not reproduce a collision";
  return Verdict::fail(w, trace);
}

} // namespace difflab

#pragma once

#include "difflab/core/config.hpp"
#include "difflab/core/random.hpp"
#include "difflab/core/verdict.hpp"
#include "difflab/diffeology/model_space.hpp"
#include "difflab/diffeology/reparam.hpp"
#include "difflab/jet/smoothness.hpp"

#include <string>
#include <vector>

namespace difflab {

/// Is f in Phi(C)? Every composite f o p must pass the C^k probe on the plaque domain.
inline Verdict phi_probe(const std::vector<Plaque>& C, const std::vector<std::string>& coords, const Expression& f,
                         int k, const Tolerances& tol = default_tolerances()) {
  VerdictAccumulator acc;
  for (const auto& p : C) {
    Verdict v = smoothness_probe(compose(f, coords, p), p.domain, k, tol);
    if (v.failed()) {
      Witness w = *v.witness();
      w.label = p.label;
      w.note = "composite with plaque " + p.label + " is not C^" + std::to_string(k) + "; " + w.note;
      return Verdict::fail(std::move(w), v.diagnostics());
    }
    if (v.inconclusive()) v.note("plaque " + p.label + ": " + v.reason());
    acc.add(v);
  }
  return acc.result();
}

inline Verdict phi_probe(const GeneratedDiffeology& D, const Expression& f, const Tolerances& tol = default_tolerances()) {
  return phi_probe(D.sampled_generators(), D.space.coords, f, D.k, tol);
}

/// Is p in Gamma(F)? Every composite f o p must pass the C^k probe.
inline Verdict gamma_probe(const FunctionFamily& F, const std::vector<std::string>& coords, const Plaque& p, int k,
                           const Tolerances& tol = default_tolerances()) {
  VerdictAccumulator acc;
  for (const auto& f : F) {
    Verdict v = smoothness_probe(compose(f.expr, coords, p), p.domain, k, tol);
    if (v.failed()) {
      Witness w = *v.witness();
      w.label = f.label;
      w.note = f.label + " o " + p.label + " is not C^" + std::to_string(k) + "; " + w.note;
      return Verdict::fail(std::move(w), v.diagnostics());
    }
    if (v.inconclusive()) v.note("function " + f.label + ": " + v.reason());
    acc.add(v);
  }
  return acc.result();
}

/// Witnesses usable for refutation: coordinates and declared witnesses that pass
/// phi_probe against the generators, plus extra witnesses (which must pass).
inline FunctionFamily validated_witnesses(const GeneratedDiffeology& D, const FunctionFamily& extra,
                                          const Tolerances& tol = default_tolerances()) {
  FunctionFamily out;
  for (const auto& f : extra) {
    Verdict v = phi_probe(D, f.expr, tol);
    if (!v.passed())
      throw InvalidWitness("witness " + f.label + " is not smooth along the generators (" + to_string(v.status()) + ")");
    out.push_back(f);
  }
  FunctionFamily candidates = coordinate_functions(D.space.coords);
  candidates.insert(candidates.end(), D.witnesses.begin(), D.witnesses.end());
  for (const auto& f : candidates)
    if (phi_probe(D, f.expr, tol).passed()) out.push_back(f);
  return out;
}

/// Membership of p in the diffeology generated by D.generators.
///
/// PASS: a local factorization p = p0 o phi was found at every sample point.
/// FAIL: a validated f in Phi(P0) has f o p not C^k (then p is not in Gamma Phi P0).
/// INCONCLUSIVE: neither.
inline Verdict membership_probe(const GeneratedDiffeology& D, const FunctionFamily& extra, const Plaque& p,
                                const Tolerances& tol = default_tolerances()) {
  const FunctionFamily witnesses = validated_witnesses(D, extra, tol);
  Rng rng(tol.seed);
  std::vector<Residual> trace;
  bool all_found = true;
  std::vector<double> unfactored;
  const auto samples = probe_points(p.domain, std::min(tol.grid, 5));
  for (const auto& r : samples) {
    auto fac = find_local_factorization(D, p, r, rng);
    trace.push_back({"factorization_residual", r.empty() ? 0.0 : r[0], fac.residual});
    if (!fac.found) {
      all_found = false;
      unfactored = r;
      break;
    }
  }
  if (all_found) {
    Verdict v = Verdict::pass(trace);
    v.note("local factorization through the generators at " + std::to_string(samples.size()) + " sample points");
    return v;
  }
  for (const auto& f : witnesses) {
    Verdict v = smoothness_probe(compose(f.expr, D.space.coords, p), p.domain, D.k, tol);
    if (v.failed()) {
      Witness w = *v.witness();
      w.kind = "phi-witness";
      w.label = f.label;
      w.note = f.label + " is smooth along every generator but " + f.label + " o " + p.label + " is not C^" +
               std::to_string(D.k) + "; " + w.note;
      auto diag = v.diagnostics();
      diag.insert(diag.begin(), trace.begin(), trace.end());
      return Verdict::fail(std::move(w), diag);
    }
  }
  std::string at;
  for (double c : unfactored) at += (at.empty() ? "" : ", ") + detail::format_number(c);
  return Verdict::inconclusive(trace, "no factorization through the generators near (" + at +
                                          ") and no validated witness separates the plaque");
}

} // namespace difflab

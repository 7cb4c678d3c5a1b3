#pragma once

#include "difflab/core/verdict.hpp"
#include "difflab/diffeology/probes.hpp"
#include "difflab/diffeology/reparam.hpp"

#include <functional>
#include <string>
#include <vector>

namespace difflab {

/// Output of psi: the diffeology of plaques along which every f in F is smooth,
/// with the curve family C recorded as its 1-plaques.
struct PsiDescriptor {
  GeneratedDiffeology diffeology;  // generators = C, witnesses = F
  std::vector<Plaque> curves;      // P_1 = C
  FunctionFamily functions;        // F
  /// Membership oracle: gamma_probe against F.
  Verdict member(const Plaque& p, const Tolerances& tol = default_tolerances()) const {
    return gamma_probe(functions, diffeology.space.coords, p, diffeology.k, tol);
  }
};

/// Output of upsilon: curves C = 1-plaques of D and the oracle F = Phi(C).
struct UpsilonDescriptor {
  ModelSpace space;
  int k = 1;
  std::vector<Plaque> curves;
  Verdict in_F(const Expression& f, const Tolerances& tol = default_tolerances()) const {
    return phi_probe(curves, space.coords, f, k, tol);
  }
};

/// Every M-structure (C, F) defines a diffeology. The pair must be consistent:
/// phi_probe(C, f) may not FAIL for any f in F.
inline PsiDescriptor psi(const ModelSpace& space, const std::vector<Plaque>& C, const FunctionFamily& F, int k,
                         const Tolerances& tol = default_tolerances()) {
  std::vector<Plaque> sampled;
  for (const auto& c : C) {
    if (c.dim() != 1) throw InconsistentPair("psi expects curves; " + c.label + " has dimension " + std::to_string(c.dim()));
    for (auto& m : c.instances(9)) sampled.push_back(std::move(m));
  }
  for (const auto& f : F) {
    Verdict v = phi_probe(sampled, space.coords, f.expr, k, tol);
    if (v.failed())
      throw InconsistentPair("function " + f.label + " is not smooth along curve " + v.witness()->label);
  }
  PsiDescriptor d;
  d.diffeology.name = "psi(" + space.name + ")";
  d.diffeology.space = space;
  d.diffeology.generators = C;
  d.diffeology.witnesses = F;
  d.diffeology.k = k;
  d.curves = C;
  d.functions = F;
  return d;
}

/// Affine lines through sample points of a generator domain, in axis and diagonal directions.
inline std::vector<Plaque> line_restrictions(const Plaque& g, int grid = 3) {
  std::vector<Plaque> out;
  const std::size_t n = g.dim();
  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[i] = e[j] = 1.0;
      dirs.push_back(e);
    }
  const std::string t = "t";
  int idx = 0;
  for (const auto& c : probe_points(g.domain, grid))
    for (const auto& d : dirs) {
      // largest symmetric interval keeping c + t d inside the domain
      double reach = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i)
        if (d[i] != 0.0) reach = std::min(reach, std::min(c[i] - g.domain.lo[i], g.domain.hi[i] - c[i]) / std::fabs(d[i]));
      PolyMap phi;
      phi.center = {0.0};
      phi.out_dim = static_cast<int>(n);
      phi.degree = 1;
      for (std::size_t i = 0; i < n; ++i) phi.coeffs.push_back({c[i], d[i]});
      Box dom = make_box({t}, -0.99 * reach, 0.99 * reach);
      Plaque line = precompose(g, phi, dom);
      line.label = g.label + "|line" + std::to_string(idx++);
      out.push_back(std::move(line));
    }
  return out;
}

/// The smooth M-structure generated by the 1-plaques of D.
inline UpsilonDescriptor upsilon(const GeneratedDiffeology& D) {
  UpsilonDescriptor u;
  u.space = D.space;
  u.k = D.k;
  for (const auto& g : D.generators) {
    for (const auto& member : g.instances(D.family_samples)) {
      if (member.dim() == 1) u.curves.push_back(member);
      else
        for (auto& line : line_restrictions(member)) u.curves.push_back(std::move(line));
    }
  }
  if (u.curves.empty()) throw NoCurves("diffeology " + D.name + " has no generators to restrict to curves");
  return u;
}

} // namespace difflab

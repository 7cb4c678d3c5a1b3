#pragma once

#include "difflab/core/errors.hpp"
#include "difflab/diffeology/functors.hpp"
#include "difflab/diffeology/probes.hpp"

#include <map>
#include <string>
#include <vector>

namespace difflab {

enum class MorphismMode { PlaquesToPlaques, PullbackFunctions, Composites };

inline const char* to_string(MorphismMode m) {
  switch (m) {
  case MorphismMode::PlaquesToPlaques: return "i";
  case MorphismMode::PullbackFunctions: return "ii";
  case MorphismMode::Composites: return "iii";
  }
  return "?";
}

inline MorphismMode parse_morphism_mode(const std::string& s) {
  if (s == "i") return MorphismMode::PlaquesToPlaques;
  if (s == "ii") return MorphismMode::PullbackFunctions;
  if (s == "iii") return MorphismMode::Composites;
  throw SchemaError("morphism mode must be i, ii or iii, got '" + s + "'");
}

/// A map X -> Y given by one expression per Y coordinate in X coordinates.
struct SpaceMap {
  std::string label;
  std::vector<Expression> components;

  Plaque after(const Plaque& p, const std::vector<std::string>& x_coords) const {
    Plaque q;
    q.label = label + " o " + p.label;
    q.domain = p.domain;
    q.family = p.family;
    q.family_lo = p.family_lo;
    q.family_hi = p.family_hi;
    for (const auto& c : components) q.map.push_back(compose(c, x_coords, p));
    return q;
  }
  Expression pullback(const Expression& g, const std::vector<std::string>& y_coords) const {
    std::map<std::string, Expression> sub;
    for (std::size_t i = 0; i < y_coords.size(); ++i) sub[y_coords[i]] = components.at(i);
    return substitute(g, sub);
  }
};

namespace detail {

// Shrinks a generator member about its domain centre until sampled images stay in
// the closed ambient box of X, so that composites are probed where X is modelled.
inline Plaque restrict_to_ambient(const Plaque& p, const ModelSpace& X) {
  if (X.ambient.dims() != X.dim()) return p;
  auto inside = [&](const Plaque& q) {
    for (const auto& u : probe_points(q.domain, 5)) {
      auto x = q.eval(u);
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < X.ambient.lo[i] - 1e-12 || x[i] > X.ambient.hi[i] + 1e-12) return false;
    }
    return true;
  };
  if (inside(p)) return p;
  const auto c = p.domain.center();
  for (double s = 0.5; s > 1e-3; s *= 0.5) {
    Plaque q = p;
    for (std::size_t i = 0; i < c.size(); ++i) {
      q.domain.lo[i] = c[i] - s * (c[i] - p.domain.lo[i]);
      q.domain.hi[i] = c[i] + s * (p.domain.hi[i] - c[i]);
    }
    if (inside(q)) return q;
  }
  return p;
}

inline std::vector<Plaque> source_plaques(const GeneratedDiffeology& DX) {
  std::vector<Plaque> out;
  for (const auto& p : DX.sampled_generators()) out.push_back(restrict_to_ambient(p, DX.space));
  return out;
}

inline void check_maps_into(const SpaceMap& f, const GeneratedDiffeology& DX, const GeneratedDiffeology& DY) {
  if (f.components.size() != DY.space.dim())
    throw SchemaError("map has " + std::to_string(f.components.size()) + " components but Y has dimension " +
                      std::to_string(DY.space.dim()));
  for (const auto& p : source_plaques(DX))
    for (const auto& u : probe_points(p.domain, 3)) {
      auto x = p.eval(u);
      Env env(DX.space.coords, x);
      std::vector<double> y;
      for (const auto& c : f.components) y.push_back(evaluate(c, env));
      if (!DY.space.contains(y)) throw DomainError("map " + f.label + " leaves the model space of " + DY.name);
    }
}

} // namespace detail

/// Mode i: f o p is a plaque of Y for every generator p of X.
inline Verdict morphism_mode_i(const SpaceMap& f, const GeneratedDiffeology& DX, const GeneratedDiffeology& DY,
                               const Tolerances& tol = default_tolerances()) {
  VerdictAccumulator acc;
  for (const auto& p : detail::source_plaques(DX)) {
    Verdict v = membership_probe(DY, {}, f.after(p, DX.space.coords), tol);
    if (v.failed()) return v;
    acc.add(v);
  }
  return acc.result();
}

/// Mode ii: g o f is in Phi(P0(X)) for every validated g in D(Y).
inline Verdict morphism_mode_ii(const SpaceMap& f, const GeneratedDiffeology& DX, const GeneratedDiffeology& DY,
                                const Tolerances& tol = default_tolerances()) {
  VerdictAccumulator acc;
  for (const auto& g : validated_witnesses(DY, {}, tol)) {
    Verdict v = phi_probe(detail::source_plaques(DX), DX.space.coords, f.pullback(g.expr, DY.space.coords), DX.k, tol);
    if (v.failed()) {
      Witness w = *v.witness();
      w.label = g.label;
      w.note = g.label + " o " + f.label + " is not smooth along " + w.note;
      return Verdict::fail(std::move(w), v.diagnostics());
    }
    acc.add(v);
  }
  return acc.result();
}

/// Mode iii: g o f o p is C^k for every generator p of X and validated g in D(Y).
inline Verdict morphism_mode_iii(const SpaceMap& f, const GeneratedDiffeology& DX, const GeneratedDiffeology& DY,
                                 const Tolerances& tol = default_tolerances()) {
  VerdictAccumulator acc;
  const auto gs = validated_witnesses(DY, {}, tol);
  for (const auto& p : detail::source_plaques(DX)) {
    Plaque fp = f.after(p, DX.space.coords);
    for (const auto& g : gs) {
      Verdict v = smoothness_probe(compose(g.expr, DY.space.coords, fp), fp.domain, DX.k, tol);
      if (v.failed()) {
        Witness w = *v.witness();
        w.label = g.label;
        w.note = g.label + " o " + fp.label + " is not C^" + std::to_string(DX.k) + "; " + w.note;
        return Verdict::fail(std::move(w), v.diagnostics());
      }
      acc.add(v);
    }
  }
  return acc.result();
}

inline Verdict morphism_probe(const SpaceMap& f, const GeneratedDiffeology& DX, const GeneratedDiffeology& DY,
                              MorphismMode mode, const Tolerances& tol = default_tolerances()) {
  detail::check_maps_into(f, DX, DY);
  switch (mode) {
  case MorphismMode::PlaquesToPlaques: return morphism_mode_i(f, DX, DY, tol);
  case MorphismMode::PullbackFunctions: return morphism_mode_ii(f, DX, DY, tol);
  case MorphismMode::Composites: return morphism_mode_iii(f, DX, DY, tol);
  }
  throw SchemaError("unknown morphism mode");
}

struct MorphismReport {
  Verdict i = Verdict::pass();
  Verdict ii = Verdict::pass();
  Verdict iii = Verdict::pass();
  bool ii_iii_agree() const { return ii.status() == iii.status(); }
};

/// All three modes; mode ii and iii must agree on every bundled case.
inline MorphismReport morphism_all(const SpaceMap& f, const GeneratedDiffeology& DX, const GeneratedDiffeology& DY,
                                   const Tolerances& tol = default_tolerances()) {
  detail::check_maps_into(f, DX, DY);
  MorphismReport r;
  r.i = morphism_mode_i(f, DX, DY, tol);
  r.ii = morphism_mode_ii(f, DX, DY, tol);
  r.iii = morphism_mode_iii(f, DX, DY, tol);
  return r;
}

} // namespace difflab

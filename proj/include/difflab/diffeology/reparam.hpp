#pragma once

#include "difflab/core/least_squares.hpp"
#include "difflab/core/random.hpp"
#include "difflab/diffeology/model_space.hpp"
#include "difflab/jet/multi_series.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace difflab {

/// Polynomial map phi: R^n -> R^n0 in powers of (u - center), total degree <= d.
struct PolyMap {
  std::vector<double> center;
  int out_dim = 0;
  int degree = 0;
  std::vector<std::vector<double>> coeffs; // [out][monomial], graded-lex monomials

  const MonomialTable& table() const { return *MonomialTable::get(static_cast<int>(center.size()), degree); }

  std::vector<double> eval(const std::vector<double>& u) const {
    const auto& t = table();
    std::vector<double> mono(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      double v = 1.0;
      for (std::size_t j = 0; j < center.size(); ++j) v *= std::pow(u[j] - center[j], t.exponent(i)[j]);
      mono[i] = v;
    }
    std::vector<double> out(out_dim, 0.0);
    for (int o = 0; o < out_dim; ++o)
      for (std::size_t i = 0; i < t.size(); ++i) out[o] += coeffs[o][i] * mono[i];
    return out;
  }

  std::vector<Expression> expressions(const std::vector<std::string>& params) const {
    const auto& t = table();
    std::vector<Expression> out;
    for (int o = 0; o < out_dim; ++o) {
      Expression e(0.0);
      bool first = true;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (coeffs[o][i] == 0.0) continue;
        Expression term(coeffs[o][i]);
        for (std::size_t j = 0; j < params.size(); ++j) {
          int p = t.exponent(i)[j];
          if (p == 0) continue;
          Expression base = center[j] == 0.0 ? var(params[j]) : var(params[j]) - Expression(center[j]);
          term = term * (p == 1 ? base : pow(base, p));
        }
        e = first ? term : e + term;
        first = false;
      }
      out.push_back(e);
    }
    return out;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& row : coeffs)
      for (double c : row) m = std::max(m, std::fabs(c));
    return m;
  }
};

/// p o phi on a new parameter box with the given parameter names.
inline Plaque precompose(const Plaque& p, const PolyMap& phi, const Box& domain) {
  Plaque q;
  q.label = p.label + " o phi";
  q.domain = domain;
  q.family = p.family;
  q.family_lo = p.family_lo;
  q.family_hi = p.family_hi;
  auto comps = phi.expressions(domain.names);
  std::map<std::string, Expression> sub;
  for (std::size_t i = 0; i < p.domain.names.size(); ++i) sub[p.domain.names[i]] = comps.at(i);
  for (const auto& m : p.map) q.map.push_back(substitute(m, sub));
  return q;
}

/// A generator member passing through a point, with the parameter where it does.
struct CurveSeed {
  Plaque plaque;             // family parameters already fixed
  std::vector<double> u0;    // plaque(u0) = F
};

namespace detail {

inline bool inside_closed(const std::vector<double>& a, const std::vector<double>& lo, const std::vector<double>& hi) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < lo[i] - 1e-12 || a[i] > hi[i] + 1e-12) return false;
  return true;
}

inline double point_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

// Solves g(w, a) = F over plaque parameters w (and family parameters a when free).
inline std::optional<std::pair<std::vector<double>, std::vector<double>>>
solve_through(const Plaque& g, const std::vector<double>& F, bool free_family, const std::vector<double>& a_fixed,
              double eps) {
  const std::size_t n = g.dim(), nf = free_family ? g.family.size() : 0;
  // coarse start from a grid over the domain (and family ranges)
  std::vector<double> best_w, best_a = a_fixed;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<double>& w, const std::vector<double>& a) {
    try {
      double d = point_distance(g.eval(w, a), F);
      if (d < best) {
        best = d;
        best_w = w;
        best_a = a;
      }
    } catch (const DomainError&) {
    }
  };
  auto ws = probe_points(g.domain, n == 1 ? 41 : 9);
  std::vector<std::vector<double>> as{a_fixed};
  if (nf > 0) {
    as.clear();
    for (int i = 0; i <= 16; ++i) {
      std::vector<double> a(nf);
      for (std::size_t j = 0; j < nf; ++j) a[j] = g.family_lo[j] + i * (g.family_hi[j] - g.family_lo[j]) / 16.0;
      as.push_back(a);
    }
  }
  for (const auto& a : as)
    for (const auto& w : ws) consider(w, a);
  if (best_w.empty()) return std::nullopt;

  const std::size_t unknowns = n + nf;
  const int values = static_cast<int>(std::max(F.size(), unknowns));
  auto residual = [&](const Eigen::VectorXd& x) {
    std::vector<double> w(x.data(), x.data() + n), a = a_fixed;
    for (std::size_t j = 0; j < nf; ++j) a[j] = x[n + j];
    Eigen::VectorXd r = Eigen::VectorXd::Zero(values);
    try {
      auto p = g.eval(w, a);
      for (std::size_t i = 0; i < F.size(); ++i) r[i] = p[i] - F[i];
    } catch (const DomainError&) {
      r.setConstant(1e6);
    }
    return r;
  };
  Eigen::VectorXd x0(unknowns);
  for (std::size_t i = 0; i < n; ++i) x0[i] = best_w[i];
  for (std::size_t j = 0; j < nf; ++j) x0[n + j] = best_a[j];
  auto res = least_squares(residual, x0, values);
  if (res.max_residual > eps) return std::nullopt;
  std::vector<double> w(res.x.data(), res.x.data() + n), a = a_fixed;
  for (std::size_t j = 0; j < nf; ++j) a[j] = res.x[n + j];
  if (!g.domain.contains(w)) return std::nullopt;
  if (nf > 0 && !inside_closed(a, g.family_lo, g.family_hi)) return std::nullopt;
  return std::make_pair(w, a);
}

} // namespace detail

/// Generator members passing through F: every sampled family member that hits F,
/// plus members found with the family parameters left free.
inline std::vector<CurveSeed> curves_through(const GeneratedDiffeology& D, const std::vector<double>& F) {
  std::vector<CurveSeed> out;
  const double eps = D.space.eps_pt;
  auto add = [&](const Plaque& g, const std::vector<double>& w, const std::vector<double>& a) {
    Plaque member = g.is_family() ? g.instance(a) : g;
    for (const auto& s : out)
      if (s.plaque.label == member.label && detail::point_distance(s.u0, w) <= 1e-9) return;
    out.push_back({member, w});
  };
  for (const auto& g : D.generators) {
    if (!g.is_family()) {
      if (auto sol = detail::solve_through(g, F, false, {}, eps)) add(g, sol->first, {});
      continue;
    }
    for (const auto& member : g.instances(D.family_samples)) {
      if (auto sol = detail::solve_through(member, F, false, {}, eps)) out.push_back({member, sol->first});
    }
    std::vector<double> mid(g.family.size());
    for (std::size_t j = 0; j < mid.size(); ++j) mid[j] = 0.5 * (g.family_lo[j] + g.family_hi[j]);
    if (auto sol = detail::solve_through(g, F, true, mid, eps)) add(g, sol->first, sol->second);
  }
  return out;
}

/// Result of a local factorization search p = p0 o phi near a parameter point.
struct Factorization {
  bool found = false;
  std::string generator;
  std::vector<double> family;
  PolyMap phi;
  double residual = std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::vector<std::vector<double>> neighbourhood(const std::vector<double>& r, double rho, int per_dim) {
  std::vector<std::vector<double>> pts;
  const std::size_t n = r.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_dim);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> u = r;
    std::size_t k = idx;
    for (std::size_t i = 0; i < n; ++i) {
      int gi = static_cast<int>(k % per_dim);
      k /= per_dim;
      u[i] += rho * (-1.0 + 2.0 * gi / (per_dim - 1));
    }
    pts.push_back(u);
  }
  return pts;
}

} // namespace detail

namespace detail {

inline Factorization fit_factorization(const GeneratedDiffeology& D, const Plaque& p, const std::vector<double>& r,
                                       double rho, Rng& rng) {
  Factorization best;
  const std::size_t n = p.dim(), m = D.space.dim();
  const auto fit_pts = detail::neighbourhood(r, rho, n == 1 ? 9 : 5);
  const auto check_pts = detail::neighbourhood(r, rho / 4, n == 1 ? 9 : 5);
  std::vector<std::vector<double>> targets, check_targets;
  for (const auto& u : fit_pts) targets.push_back(p.eval(u));
  for (const auto& u : check_pts) check_targets.push_back(p.eval(u));
  const auto table = MonomialTable::get(static_cast<int>(n), D.library.degree);
  const std::size_t M = table->size();

  for (const auto& g : D.generators) {
    const std::size_t n0 = g.dim(), nf = g.family.size();
    const std::size_t unknowns = n0 * M + nf;
    const int values = static_cast<int>(std::max(fit_pts.size() * m, unknowns));
    // coefficients are fitted in the scaled variable (u - r)/rho
    auto unpack = [&](const Eigen::VectorXd& x, std::vector<double>& a) {
      PolyMap phi;
      phi.center = r;
      phi.out_dim = static_cast<int>(n0);
      phi.degree = D.library.degree;
      phi.coeffs.assign(n0, std::vector<double>(M));
      for (std::size_t o = 0; o < n0; ++o)
        for (std::size_t i = 0; i < M; ++i) phi.coeffs[o][i] = x[o * M + i] / std::pow(rho, table->degree(i));
      a.assign(nf, 0.0);
      for (std::size_t j = 0; j < nf; ++j) a[j] = x[n0 * M + j];
      return phi;
    };
    auto mismatch = [&](const PolyMap& phi, const std::vector<double>& a, const std::vector<std::vector<double>>& pts,
                        const std::vector<std::vector<double>>& tgt, Eigen::VectorXd* out) {
      double worst = 0.0;
      for (std::size_t s = 0; s < pts.size(); ++s) {
        auto x = g.eval(phi.eval(pts[s]), a);
        for (std::size_t c = 0; c < m; ++c) {
          double d = x[c] - tgt[s][c];
          if (out) (*out)[static_cast<Eigen::Index>(s * m + c)] = d;
          worst = std::max(worst, std::fabs(d));
        }
      }
      return worst;
    };
    auto residual = [&](const Eigen::VectorXd& x) {
      std::vector<double> a;
      PolyMap phi = unpack(x, a);
      Eigen::VectorXd out = Eigen::VectorXd::Zero(values);
      try {
        mismatch(phi, a, fit_pts, targets, &out);
      } catch (const DomainError&) {
        out.setConstant(1e6);
      }
      return out;
    };

    // start: constant term from a point of g nearest to p(r)
    std::vector<double> mid(nf);
    for (std::size_t j = 0; j < nf; ++j) mid[j] = 0.5 * (g.family_lo[j] + g.family_hi[j]);
    auto seed = detail::solve_through(g, p.eval(r), nf > 0, mid, std::numeric_limits<double>::infinity());
    if (!seed) continue;
    for (int start = 0; start < 3; ++start) {
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns));
      for (std::size_t o = 0; o < n0; ++o) {
        x0[o * M] = seed->first[o];
        if (start > 0)
          for (std::size_t i = 1; i <= n && i < M; ++i) x0[o * M + i] = rho * rng.uniform(-2.0, 2.0);
      }
      for (std::size_t j = 0; j < nf; ++j) x0[n0 * M + j] = seed->second[j];
      auto res = least_squares(residual, x0, values);
      std::vector<double> a;
      PolyMap phi = unpack(res.x, a);
      double err;
      try {
        err = std::max(res.max_residual, mismatch(phi, a, check_pts, check_targets, nullptr));
      } catch (const DomainError&) {
        continue;
      }
      bool admissible = phi.max_abs_coefficient() <= D.library.bound &&
                        (nf == 0 || detail::inside_closed(a, g.family_lo, g.family_hi));
      for (const auto* pts : {&fit_pts, &check_pts})
        for (const auto& u : *pts) admissible = admissible && g.domain.contains(phi.eval(u));
      if (admissible && err < best.residual) {
        best.residual = err;
        best.generator = g.label;
        best.family = a;
        best.phi = phi;
      }
      if (best.residual <= D.space.eps_pt) {
        best.found = true;
        return best;
      }
    }
  }
  return best;
}

} // namespace detail

/// Searches the reparametrization library for p = p0 o phi on a neighbourhood of r.
/// Each fit uses samples at radius rho and is validated at rho/4; rho shrinks
/// geometrically because a polynomial phi only needs to match p locally.
inline Factorization find_local_factorization(const GeneratedDiffeology& D, const Plaque& p,
                                              const std::vector<double>& r, Rng& rng) {
  double rho = 0.1 * p.domain.min_half_width();
  for (std::size_t i = 0; i < p.dim(); ++i)
    rho = std::min(rho, 0.5 * std::min(r[i] - p.domain.lo[i], p.domain.hi[i] - r[i]));
  Factorization best;
  if (!(rho > 0.0)) return best;
  for (int level = 0; level < 4; ++level, rho /= 4.0) {
    auto f = detail::fit_factorization(D, p, r, rho, rng);
    if (f.found) return f;
    if (f.residual < best.residual) best = f;
  }
  return best;
}

} // namespace difflab

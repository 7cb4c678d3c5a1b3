#pragma once

#include "difflab/core/least_squares.hpp"
#include "difflab/diffeology/reparam.hpp"
#include "difflab/tangent/jet_vector.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace difflab {

/// Class [p]_F of a curve with p(0) = F, carried by a representative and its jet.
struct TangentClass {
  Plaque representative;
  JetVector jet;
};

/// Function family and order against which classes are compared.
struct JetContext {
  std::vector<std::string> coords;
  FunctionFamily functions;
  int order = 1;
};

inline TangentClass make_class(const Plaque& p, const std::vector<double>& F, const JetContext& ctx,
                               bool fd_check = false, const Tolerances& tol = default_tolerances()) {
  return {p, jet_vector(p, F, ctx.coords, ctx.functions, ctx.order, fd_check, tol)};
}

inline bool equivalent(const Plaque& p1, const Plaque& p2, const std::vector<double>& F, const JetContext& ctx,
                       const Tolerances& tol = default_tolerances()) {
  return jets_equal(jet_vector(p1, F, ctx.coords, ctx.functions, ctx.order, false, tol).entries,
                    jet_vector(p2, F, ctx.coords, ctx.functions, ctx.order, false, tol).entries, tol);
}

/// The straight line F + t v as a 1-plaque.
inline Plaque line_plaque(const std::vector<double>& F, const std::vector<double>& v, double reach = 1.0,
                          const std::string& param = "t") {
  Plaque p;
  p.label = "line";
  p.domain = make_box({param}, -reach, reach);
  for (std::size_t i = 0; i < F.size(); ++i) {
    Expression e = v[i] == 0.0 ? Expression(F[i]) : Expression(F[i]) + Expression(v[i]) * var(param);
    p.map.push_back(e);
  }
  return p;
}

/// p(c t) for a curve p; c = 0 gives the constant curve at p(0).
inline Plaque rescale_curve(const Plaque& p, double c) {
  PolyMap phi;
  phi.center = {0.0};
  phi.out_dim = 1;
  phi.degree = 1;
  phi.coeffs = {{0.0, c}};
  double reach = c == 0.0 ? 1.0 : std::min(-p.domain.lo[0], p.domain.hi[0]) / std::fabs(c);
  Plaque q = precompose(p, phi, make_box(p.domain.names, -reach, reach));
  q.label = detail::format_number(c) + "*" + p.label;
  if (c == 0.0) {
    q.map.clear();
    for (double x : p.eval({0.0})) q.map.push_back(Expression(x));
  }
  return q;
}

inline TangentClass scalar_mult(double c, const TangentClass& cls, const JetContext& ctx,
                                const Tolerances& tol = default_tolerances()) {
  return make_class(rescale_curve(cls.representative, c), cls.jet.base, ctx, false, tol);
}

/// Outcome of add_classes: a witness class or the smallest jet gap seen.
struct ClassSum {
  bool found = false;
  std::optional<TangentClass> sum;
  std::string source;  // "summand", "linear-model" or the generator label
  double gap = 0.0;    // NoWitness: smallest max-abs jet mismatch over the search
  std::vector<double> target;
};

namespace detail {

// Univariate coefficients (order n) of sum_alpha c_alpha prod_j w_j(t)^alpha_j, w_j(0) = 0.
inline std::vector<double> substitute_series(const std::vector<double>& c, const MonomialTable& table,
                                             const std::vector<std::vector<double>>& w, int n) {
  const std::size_t d = w.size();
  // powers[j][e] = w_j^e truncated
  std::vector<std::vector<std::vector<double>>> powers(d);
  for (std::size_t j = 0; j < d; ++j) {
    powers[j].push_back(std::vector<double>(n + 1, 0.0));
    powers[j][0][0] = 1.0;
    for (int e = 1; e <= n; ++e) {
      std::vector<double> next(n + 1, 0.0);
      for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) next[a + b] += powers[j][e - 1][a] * w[j][b];
      powers[j].push_back(std::move(next));
    }
  }
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (c[i] == 0.0) continue;
    std::vector<double> term(n + 1, 0.0);
    term[0] = c[i];
    for (std::size_t j = 0; j < d; ++j) {
      int e = table.exponent(i)[j];
      if (e == 0) continue;
      std::vector<double> next(n + 1, 0.0);
      for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) next[a + b] += term[a] * powers[j][e][b];
      term.swap(next);
    }
    for (int a = 0; a <= n; ++a) out[a] += term[a];
  }
  return out;
}

// Searches phi(t) = u0 + A_1 t + ... + A_n t^n so that g o phi has the target jet.
inline std::optional<std::pair<PolyMap, double>> fit_curve_jet(const CurveSeed& seed, const JetContext& ctx,
                                                               const std::vector<double>& target, double& gap,
                                                               const Tolerances& tol) {
  const Plaque& g = seed.plaque;
  const std::size_t n0 = g.dim();
  const int n = ctx.order;
  const auto table = MonomialTable::get(static_cast<int>(n0), n);
  std::vector<std::vector<double>> expansions;
  try {
    for (const auto& f : ctx.functions)
      expansions.push_back(local_expansion(compose(f.expr, ctx.coords, g), g.domain.names, seed.u0, n));
  } catch (const Error&) {
    return std::nullopt; // kinked composite at u0: this seed cannot represent a class
  }
  const std::size_t q = expansions.size();
  auto jets_of = [&](const Eigen::VectorXd& A) {
    std::vector<std::vector<double>> w(n0, std::vector<double>(n + 1, 0.0));
    for (std::size_t j = 0; j < n0; ++j)
      for (int k = 1; k <= n; ++k) w[j][k] = A[static_cast<Eigen::Index>(j * n + (k - 1))];
    std::vector<double> out;
    for (const auto& c : expansions) {
      auto s = substitute_series(c, *table, w, n);
      double fact = 1.0;
      for (int k = 1; k <= n; ++k) {
        fact *= k;
        out.push_back(fact * s[k]);
      }
    }
    return out;
  };
  const int unknowns = static_cast<int>(n0) * n;
  const int values = std::max(static_cast<int>(target.size()), unknowns);
  auto residual = [&](const Eigen::VectorXd& A) {
    auto j = jets_of(A);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(values);
    for (std::size_t i = 0; i < j.size(); ++i) r[static_cast<Eigen::Index>(i)] = j[i] - target[i];
    return r;
  };
  // linear start: first-order entries are J A_1 with J the gradient matrix
  Eigen::MatrixXd J(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(n0));
  Eigen::VectorXd b(static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < q; ++i) {
    b[static_cast<Eigen::Index>(i)] = target[i * n];
    for (std::size_t j = 0; j < n0; ++j) {
      MultiIndex e(n0, 0);
      e[j] = 1;
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = n >= 1 ? expansions[i][table->index(e)] : 0.0;
    }
  }
  Eigen::VectorXd A = Eigen::VectorXd::Zero(unknowns);
  if (q > 0 && n >= 1) {
    Eigen::VectorXd a1 = J.completeOrthogonalDecomposition().solve(b);
    for (std::size_t j = 0; j < n0; ++j) A[static_cast<Eigen::Index>(j * n)] = a1[static_cast<Eigen::Index>(j)];
  }
  if (n > 1 || !jets_equal(jets_of(A), target, tol)) A = least_squares(residual, A, values).x;
  auto got = jets_of(A);
  gap = jet_gap(got, target);
  if (!jets_equal(got, target, tol)) return std::nullopt;
  PolyMap phi;
  phi.center = {0.0};
  phi.out_dim = static_cast<int>(n0);
  phi.degree = n;
  phi.coeffs.assign(n0, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j < n0; ++j) {
    phi.coeffs[j][0] = seed.u0[j];
    for (int k = 1; k <= n; ++k) phi.coeffs[j][k] = A[static_cast<Eigen::Index>(j * n + (k - 1))];
  }
  return std::make_pair(phi, gap);
}

// Largest symmetric t-interval on which phi stays in the generator's domain.
inline double curve_reach(const PolyMap& phi, const Box& domain) {
  for (double r = 1.0; r > 1e-6; r *= 0.5) {
    bool ok = true;
    for (int s = -8; s <= 8 && ok; ++s) ok = domain.contains(phi.eval({r * s / 8.0}));
    if (ok) return r;
  }
  return 1e-6;
}

inline Plaque sum_of_curves(const Plaque& p1, const Plaque& p2, const std::vector<double>& F) {
  const std::string t = p1.domain.names[0];
  std::map<std::string, Expression> rename{{p2.domain.names[0], var(t)}};
  Plaque c;
  c.label = p1.label + "+" + p2.label;
  double reach = std::min({-p1.domain.lo[0], p1.domain.hi[0], -p2.domain.lo[0], p2.domain.hi[0]});
  c.domain = make_box({t}, -reach, reach);
  for (std::size_t i = 0; i < F.size(); ++i) c.map.push_back(p1.map[i] + substitute(p2.map[i], rename) - Expression(F[i]));
  return c;
}

} // namespace detail

/// Searches D's plaque family for a curve whose jet is the sum of the two jets.
inline ClassSum add_classes(const TangentClass& c1, const TangentClass& c2, const GeneratedDiffeology& D,
                            const JetContext& ctx, const Tolerances& tol = default_tolerances()) {
  ClassSum out;
  const auto& F = c1.jet.base;
  if (detail::point_distance(F, c2.jet.base) > tol.point) throw BasePointMismatch("classes live at different points");
  out.target = c1.jet.entries;
  for (std::size_t i = 0; i < out.target.size(); ++i) out.target[i] += c2.jet.entries.at(i);

  if (c2.jet.is_zero(tol) || c1.jet.is_zero(tol)) {
    out.found = true;
    out.sum = c2.jet.is_zero(tol) ? c1 : c2;
    out.source = "summand";
    return out;
  }
  if (D.space.is_vector_space()) {
    Plaque c = detail::sum_of_curves(c1.representative, c2.representative, F);
    TangentClass cls = make_class(c, F, ctx, false, tol);
    if (jets_equal(cls.jet.entries, out.target, tol)) {
      out.found = true;
      out.sum = cls;
      out.source = "linear-model";
      return out;
    }
  }
  out.gap = std::numeric_limits<double>::infinity();
  for (const auto& seed : curves_through(D, F)) {
    double gap = std::numeric_limits<double>::infinity();
    auto fit = detail::fit_curve_jet(seed, ctx, out.target, gap, tol);
    out.gap = std::min(out.gap, gap);
    if (!fit) continue;
    const PolyMap& phi = fit->first;
    double reach = detail::curve_reach(phi, seed.plaque.domain);
    Plaque w = precompose(seed.plaque, phi, make_box({"t"}, -reach, reach));
    w.label = seed.plaque.label + " o phi";
    out.found = true;
    out.sum = make_class(w, F, ctx, false, tol);
    out.source = seed.plaque.label;
    out.gap = fit->second;
    return out;
  }
  return out;
}

} // namespace difflab

#pragma once

#include "difflab/core/random.hpp"
#include "difflab/core/verdict.hpp"
#include "difflab/tangent/classes.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace difflab {

/// One linear piece of the tangent set: the span of jets through a single generator.
struct TangentPiece {
  std::string generator;
  std::vector<std::vector<double>> basis; // orthonormal, in jet coordinates
};

struct TangentSpaceEstimate {
  std::vector<double> point;
  std::vector<std::vector<double>> jets;  // sampled first-order jet vectors (rows)
  std::vector<double> singular_values;
  int dim = 0;
  bool cone = false;
  std::vector<TangentPiece> pieces;
  std::vector<std::string> skipped;       // seeds whose composites are kinked at the point
  std::optional<ClassSum> certificate;    // NoWitness for a pair of classes when cone
  std::string certificate_pair;
};

namespace detail {

struct SeedGradient {
  CurveSeed seed;
  Eigen::MatrixXd J; // q x n0: first-order jets of f_i o g at u0
};

inline std::optional<SeedGradient> seed_gradient(const CurveSeed& seed, const JetContext& ctx) {
  const Plaque& g = seed.plaque;
  const std::size_t n0 = g.dim();
  SeedGradient sg{seed, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ctx.functions.size()), static_cast<Eigen::Index>(n0))};
  const auto table = MonomialTable::get(static_cast<int>(n0), 1);
  try {
    for (std::size_t i = 0; i < ctx.functions.size(); ++i) {
      auto c = local_expansion(compose(ctx.functions[i].expr, ctx.coords, g), g.domain.names, seed.u0, 1);
      for (std::size_t j = 0; j < n0; ++j) {
        MultiIndex e(n0, 0);
        e[j] = 1;
        sg.J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[table->index(e)];
      }
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return sg;
}

inline int numerical_rank(const Eigen::VectorXd& sv, const Tolerances& tol) {
  if (sv.size() == 0 || sv[0] <= tol.jet_abs) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol.rank * sv[0]) ++r;
  return r;
}

// Curve t -> g(u0 + a t) with its domain kept inside g's.
inline Plaque seed_curve(const CurveSeed& s, const std::vector<double>& a, const std::string& label) {
  PolyMap phi;
  phi.center = {0.0};
  phi.out_dim = static_cast<int>(s.plaque.dim());
  phi.degree = 1;
  for (std::size_t j = 0; j < a.size(); ++j) phi.coeffs.push_back({s.u0[j], a[j]});
  double reach = curve_reach(phi, s.plaque.domain);
  Plaque c = precompose(s.plaque, phi, make_box({"t"}, -reach, reach));
  c.label = label;
  return c;
}

inline std::vector<SeedGradient> gradients_through(const GeneratedDiffeology& D, const std::vector<double>& F,
                                                   const JetContext& ctx, std::vector<std::string>* skipped) {
  auto seeds = curves_through(D, F);
  if (seeds.empty()) throw NoCurveThroughPoint("no generator of " + D.name + " passes through the point");
  std::vector<SeedGradient> out;
  for (const auto& s : seeds) {
    if (auto g = seed_gradient(s, ctx)) out.push_back(std::move(*g));
    else if (skipped) skipped->push_back(s.plaque.label);
  }
  return out;
}

// Axis classes g(u0 + e_j t) with nonzero first-order jet.
inline std::vector<TangentClass> axis_classes(const SeedGradient& sg, const std::vector<double>& F, const JetContext& ctx,
                                              const Tolerances& tol) {
  std::vector<TangentClass> out;
  const std::size_t n0 = sg.seed.plaque.dim();
  for (std::size_t j = 0; j < n0; ++j) {
    if (sg.J.col(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff() <= tol.jet_abs) continue;
    std::vector<double> a(n0, 0.0);
    a[j] = 1.0;
    auto c = seed_curve(sg.seed, a, sg.seed.plaque.label + (n0 > 1 ? "/e" + std::to_string(j + 1) : ""));
    out.push_back(make_class(c, F, ctx, false, tol));
  }
  return out;
}

} // namespace detail

/// Numerical dimension of the first-order tangent set at F from s sampled curves.
inline TangentSpaceEstimate tangent_dim(const std::vector<double>& F, const GeneratedDiffeology& D, JetContext ctx,
                                        int samples, const Tolerances& tol = default_tolerances()) {
  ctx.order = 1;
  TangentSpaceEstimate est;
  est.point = F;
  auto grads = detail::gradients_through(D, F, ctx, &est.skipped);
  const auto q = static_cast<Eigen::Index>(ctx.functions.size());
  Rng rng(tol.seed);
  if (!grads.empty()) {
    for (int i = 0; i < samples; ++i) {
      const auto& sg = grads[static_cast<std::size_t>(i) % grads.size()];
      auto a = rng.unit_vector(sg.seed.plaque.dim());
      Eigen::VectorXd av = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
      Eigen::VectorXd jet = sg.J * av;
      est.jets.emplace_back(jet.data(), jet.data() + jet.size());
    }
  }
  Eigen::MatrixXd M(static_cast<Eigen::Index>(est.jets.size()), q);
  for (std::size_t i = 0; i < est.jets.size(); ++i)
    for (Eigen::Index j = 0; j < q; ++j) M(static_cast<Eigen::Index>(i), j) = est.jets[i][static_cast<std::size_t>(j)];
  Eigen::VectorXd sv = M.rows() > 0 ? Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues() : Eigen::VectorXd();
  est.singular_values.assign(sv.data(), sv.data() + sv.size());
  est.dim = detail::numerical_rank(sv, tol);

  // pieces: column spaces of the seed gradients, deduplicated
  std::vector<std::size_t> piece_seed;
  for (std::size_t s = 0; s < grads.size(); ++s) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(grads[s].J, Eigen::ComputeThinU);
    int r = detail::numerical_rank(svd.singularValues(), tol);
    if (r == 0) continue;
    Eigen::MatrixXd U = svd.matrixU().leftCols(r);
    bool duplicate = false;
    for (const auto& p : est.pieces) {
      if (static_cast<int>(p.basis.size()) != r) continue;
      Eigen::MatrixXd B(q, r);
      for (int c = 0; c < r; ++c)
        for (Eigen::Index i = 0; i < q; ++i) B(i, c) = p.basis[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
      if ((U - B * (B.transpose() * U)).norm() <= 1e-8) duplicate = true;
    }
    if (duplicate) continue;
    TangentPiece piece;
    piece.generator = grads[s].seed.plaque.label;
    for (int c = 0; c < r; ++c) piece.basis.emplace_back(U.col(c).data(), U.col(c).data() + q);
    est.pieces.push_back(std::move(piece));
    piece_seed.push_back(s);
  }
  // a cone is declared only with a NoWitness certificate for a pair from different pieces
  if (est.pieces.size() > 1) {
    std::vector<std::vector<TangentClass>> cls;
    for (std::size_t s : piece_seed) cls.push_back(detail::axis_classes(grads[s], F, ctx, tol));
    for (std::size_t a = 0; a < cls.size() && !est.cone; ++a)
      for (std::size_t b = a + 1; b < cls.size() && !est.cone; ++b)
        for (const auto& ca : cls[a])
          for (const auto& cb : cls[b]) {
            if (est.cone) break;
            auto sum = add_classes(ca, cb, D, ctx, tol);
            if (!sum.found) {
              est.cone = true;
              est.certificate = sum;
              est.certificate_pair = ca.representative.label + " + " + cb.representative.label;
            }
          }
  }
  return est;
}

/// Are the first-order classes at F closed under addition and scaling?
inline Verdict linearity_probe(const GeneratedDiffeology& D, const std::vector<double>& F, JetContext ctx, int trials,
                               const Tolerances& tol = default_tolerances()) {
  ctx.order = 1;
  auto grads = detail::gradients_through(D, F, ctx, nullptr);
  std::vector<TangentClass> classes;
  for (const auto& sg : grads)
    for (auto& c : detail::axis_classes(sg, F, ctx, tol)) classes.push_back(std::move(c));
  Rng rng(tol.seed);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = i; j < classes.size(); ++j) pairs.emplace_back(i, j);
  for (int t = 0; t < trials && !grads.empty(); ++t) {
    const auto& sg = grads[static_cast<std::size_t>(rng.integer(0, static_cast<long>(grads.size()) - 1))];
    auto a = rng.unit_vector(sg.seed.plaque.dim());
    for (auto& x : a) x *= rng.uniform(0.5, 2.0);
    classes.push_back(make_class(detail::seed_curve(sg.seed, a, sg.seed.plaque.label + "/random" + std::to_string(t)), F,
                                 ctx, false, tol));
    if (classes.size() >= 2)
      pairs.emplace_back(static_cast<std::size_t>(rng.integer(0, static_cast<long>(classes.size()) - 2)),
                         classes.size() - 1);
  }
  std::vector<Residual> trace;
  for (const auto& [i, j] : pairs) {
    auto sum = add_classes(classes[i], classes[j], D, ctx, tol);
    trace.push_back({"sum_gap", static_cast<double>(trace.size()), sum.gap});
    if (!sum.found) {
      Witness w;
      w.kind = "no-sum-witness";
      w.label = classes[i].representative.label + " + " + classes[j].representative.label;
      w.point = F;
      w.direction = sum.target;
      w.values["gap"] = sum.gap;
      w.note = "no plaque of " + D.name + " through the point has the summed jet";
      return Verdict::fail(w, trace);
    }
  }
  for (const auto& cls : classes)
    for (double c : {-2.0, 0.5, 3.0}) {
      auto scaled = scalar_mult(c, cls, ctx, tol);
      std::vector<double> expect = cls.jet.entries;
      for (auto& e : expect) e *= c;
      if (!jets_equal(scaled.jet.entries, expect, tol)) {
        Witness w;
        w.kind = "scalar-mismatch";
        w.label = cls.representative.label;
        w.point = F;
        w.values["c"] = c;
        return Verdict::fail(w, trace);
      }
    }
  Verdict v = Verdict::pass(trace);
  v.note(std::to_string(pairs.size()) + " sums and " + std::to_string(3 * classes.size()) + " rescalings witnessed");
  return v;
}

/// Per-parameter record of the continuity witness p(r, t) = p1(r, 0) + t (v1(r) + v2(r)).
struct ContinuitySample {
  std::vector<double> r;
  std::vector<double> base;
  std::vector<double> velocity;
};

struct ContinuityReport {
  Verdict verdict = Verdict::pass();
  std::vector<ContinuitySample> samples;
};

namespace detail {

inline Plaque slice(const Plaque& p, const std::vector<double>& r) {
  Plaque c;
  const std::size_t n = p.dim() - 1;
  std::map<std::string, Expression> sub;
  std::string suffix;
  for (std::size_t i = 0; i < n; ++i) {
    sub[p.domain.names[i]] = Expression(r[i]);
    suffix += (i ? "," : "") + format_number(r[i]);
  }
  const std::string s = p.domain.names[n];
  double reach = std::min(-p.domain.lo[n], p.domain.hi[n]);
  c.domain = make_box({s}, -reach, reach);
  for (const auto& m : p.map) c.map.push_back(substitute(m, sub));
  c.label = p.label + "(" + suffix + ",.)";
  return c;
}

} // namespace detail

/// Continuity of addition along the first parameters r of two plaques p(r, s).
inline ContinuityReport continuity_probe(const GeneratedDiffeology& D, const Plaque& p1, const Plaque& p2, JetContext ctx,
                                         const Tolerances& tol = default_tolerances()) {
  ctx.order = 1;
  if (p1.dim() != p2.dim() || p1.dim() < 1) throw SchemaError("continuity_probe needs plaques of equal dimension");
  const std::size_t n = p1.dim() - 1;
  if (p1.domain.lo[n] >= 0.0 || p1.domain.hi[n] <= 0.0 || p2.domain.lo[n] >= 0.0 || p2.domain.hi[n] <= 0.0)
    throw DomainError("the last parameter range must contain 0");
  std::vector<std::vector<double>> rs{{}};
  if (n > 0) {
    Box rbox;
    for (std::size_t i = 0; i < n; ++i) {
      rbox.names.push_back(p1.domain.names[i]);
      rbox.lo.push_back(std::max(p1.domain.lo[i], p2.domain.lo[i]));
      rbox.hi.push_back(std::min(p1.domain.hi[i], p2.domain.hi[i]));
    }
    rs = probe_points(rbox, std::min(tol.grid, 5));
  }
  ContinuityReport rep;
  std::vector<Residual> trace;
  bool all_found = true;
  for (const auto& r : rs) {
    Plaque c1 = detail::slice(p1, r), c2 = detail::slice(p2, r);
    auto F = c1.eval({0.0});
    if (detail::point_distance(F, c2.eval({0.0})) > tol.point)
      throw DomainError("plaques disagree at s = 0 for r = " + (r.empty() ? std::string("()") : detail::format_number(r[0])));
    auto k1 = make_class(c1, F, ctx, false, tol), k2 = make_class(c2, F, ctx, false, tol);
    std::vector<double> target = k1.jet.entries;
    for (std::size_t i = 0; i < target.size(); ++i) target[i] += k2.jet.entries[i];
    const double rr = r.empty() ? 0.0 : r[0];
    if (D.space.is_vector_space()) {
      ContinuitySample smp{r, F, std::vector<double>(F.size())};
      for (std::size_t i = 0; i < F.size(); ++i) {
        const std::vector<std::string> s_name{c1.domain.names[0]};
        smp.velocity[i] = taylor_eval(c1.map[i], line_path(s_name, {0.0}, {1.0}), 1).c[1] +
                          taylor_eval(c2.map[i], line_path({c2.domain.names[0]}, {0.0}, {1.0}), 1).c[1];
      }
      auto w = make_class(line_plaque(F, smp.velocity), F, ctx, false, tol);
      double gap = jet_gap(w.jet.entries, target);
      trace.push_back({"witness_gap", rr, gap});
      if (!jets_equal(w.jet.entries, target, tol)) {
        Witness wt;
        wt.kind = "jet-identity";
        wt.point = r;
        wt.values["gap"] = gap;
        wt.note = "line witness does not carry the summed jet";
        rep.verdict = Verdict::fail(wt, trace);
        return rep;
      }
      rep.samples.push_back(std::move(smp));
    } else {
      auto sum = add_classes(k1, k2, D, ctx, tol);
      trace.push_back({"sum_gap", rr, sum.gap});
      if (!sum.found) {
        Witness wt;
        wt.kind = "no-sum-witness";
        wt.point = r;
        wt.direction = target;
        wt.values["gap"] = sum.gap;
        wt.note = "no plaque through p1(r,0) carries the summed jet";
        rep.verdict = Verdict::fail(wt, trace);
        return rep;
      }
      all_found = all_found && sum.found;
    }
  }
  if (D.space.is_vector_space()) {
    rep.verdict = Verdict::pass(trace);
    rep.verdict.note("witness p(r,t) = p1(r,0) + t(v1(r)+v2(r)) verified at " + std::to_string(rs.size()) + " values of r");
  } else {
    rep.verdict = Verdict::inconclusive(trace, "sums witnessed at every sampled r; no joint plaque in r was constructed");
  }
  return rep;
}

} // namespace difflab

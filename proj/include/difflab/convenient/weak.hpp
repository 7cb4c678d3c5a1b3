#pragma once

#include "difflab/convenient/dual_pair.hpp"
#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/core/verdict.hpp"
#include "difflab/jet/taylor.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace difflab {

/// Curve t -> (c_1(t), ..., c_m(t)) in the carrier.
struct SampledCurve {
  std::string param = "t";
  std::vector<Expression> components;
  double lo = -1.0, hi = 1.0;
};

namespace detail {

inline int functional_rank(const Eigen::MatrixXd& L, const Tolerances& tol) {
  if (L.rows() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(L);
  qr.setThreshold(tol.rank);
  return static_cast<int>(qr.rank());
}

// Kernel basis, each vector scaled to max-abs 1 with its first nonzero entry positive.
inline std::vector<std::vector<double>> kernel_basis(const DualPair& pair) {
  std::vector<std::vector<double>> out;
  const auto m = static_cast<Eigen::Index>(pair.dim());
  Eigen::MatrixXd K;
  if (pair.L.rows() == 0) K = Eigen::MatrixXd::Identity(m, m);
  else K = Eigen::FullPivLU<Eigen::MatrixXd>(pair.L).kernel();
  if (K.cols() == 1 && K.col(0).isZero()) return out;
  if (K.cols() == 1 && pair.L.rows() > 0) return {kernel_vector(pair)};
  for (Eigen::Index c = 0; c < K.cols(); ++c) {
    Eigen::VectorXd v = K.col(c);
    v /= v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::fabs(v[i]) > 1e-14) {
        if (v[i] < 0) v = -v;
        break;
      }
    out.emplace_back(v.data(), v.data() + v.size());
  }
  return out;
}

} // namespace detail

/// X' separates points iff the functional matrix has full column rank.
inline Verdict separation_check(const DualPair& pair, const Tolerances& tol = default_tolerances()) {
  const int rank = detail::functional_rank(pair.L, tol);
  std::vector<Residual> trace{{"rank", 0.0, static_cast<double>(rank)}};
  if (rank == static_cast<int>(pair.dim())) return Verdict::pass(trace).note("rank " + std::to_string(rank));
  Witness w;
  w.kind = "kernel-vector";
  w.direction = kernel_vector(pair);
  w.values["rank"] = rank;
  w.values["dimension"] = static_cast<double>(pair.dim());
  w.note = "every functional vanishes on the kernel vector";
  return Verdict::fail(w, trace);
}

/// Vector v with l_i(v) = b_i for all functionals; minimum-norm when not unique.
struct WeakSolution {
  std::vector<double> value;
  bool unique = true;
  double residual = 0.0;
  std::vector<std::vector<double>> kernel;
  std::vector<double> pairings; // b_i
};

namespace detail {

inline WeakSolution solve_pairings(const DualPair& pair, const Eigen::VectorXd& b, const std::string& what,
                                   const Tolerances& tol) {
  WeakSolution s;
  s.pairings.assign(b.data(), b.data() + b.size());
  Eigen::VectorXd v = pair.L.completeOrthogonalDecomposition().solve(b);
  s.residual = (pair.L * v - b).cwiseAbs().maxCoeff();
  if (s.residual > 1e-8 * std::max(1.0, b.cwiseAbs().maxCoeff()))
    throw NoWeakDerivative("no vector reproduces the " + what + " of every functional (residual " +
                           format_number(s.residual) + ")");
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::fabs(v[i]) < 1e-15) v[i] = 0.0;
  s.value.assign(v.data(), v.data() + v.size());
  s.unique = separation_check(pair, tol).passed();
  if (!s.unique) s.kernel = kernel_basis(pair);
  return s;
}

inline Expression paired(const DualPair& pair, Eigen::Index row, const SampledCurve& c) {
  Expression e(0.0);
  bool first = true;
  for (Eigen::Index j = 0; j < pair.L.cols(); ++j) {
    double a = pair.L(row, j);
    if (a == 0.0) continue;
    Expression term = a == 1.0 ? c.components.at(static_cast<std::size_t>(j)) : Expression(a) * c.components.at(static_cast<std::size_t>(j));
    e = first ? term : e + term;
    first = false;
  }
  return e;
}

} // namespace detail

/// c'(t) in the weak sense: (l o c)'(t) = l(c'(t)) for every functional.
inline WeakSolution weak_derivative(const SampledCurve& c, double t, const DualPair& pair,
                                    const Tolerances& tol = default_tolerances()) {
  if (c.components.size() != pair.dim()) throw SchemaError("curve dimension differs from the carrier");
  Eigen::VectorXd b(pair.L.rows());
  for (Eigen::Index i = 0; i < pair.L.rows(); ++i) {
    try {
      b[i] = taylor_eval(detail::paired(pair, i, c), line_path({c.param}, {t}, {1.0}), 1).c[1];
    } catch (const KinkError& e) {
      throw NotDifferentiable(pair.labels[static_cast<std::size_t>(i)] + " o c is not differentiable at t: " + e.what());
    }
  }
  return detail::solve_pairings(pair, b, "derivative", tol);
}

/// Integral of c over [a, b] in the weak sense, each pairing by adaptive Gauss-Kronrod.
inline WeakSolution weak_integral(const SampledCurve& c, double a, double b, const DualPair& pair,
                                  const Tolerances& tol = default_tolerances()) {
  if (c.components.size() != pair.dim()) throw SchemaError("curve dimension differs from the carrier");
  Eigen::VectorXd rhs(pair.L.rows());
  for (Eigen::Index i = 0; i < pair.L.rows(); ++i) {
    Expression e = detail::paired(pair, i, c);
    auto f = [&](double s) { return evaluate(e, Env({c.param}, {s})); };
    double err = 0.0;
    rhs[i] = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13, &err);
    if (!(err <= 1e-10 * std::max(1.0, std::fabs(rhs[i]))))
      throw DomainError("quadrature of " + pair.labels[static_cast<std::size_t>(i)] + " o c did not reach 1e-10");
  }
  return detail::solve_pairings(pair, rhs, "integral", tol);
}

} // namespace difflab

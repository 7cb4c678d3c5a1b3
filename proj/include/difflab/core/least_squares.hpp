#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include <cmath>
#include <functional>
#include <limits>

namespace difflab {

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double max_residual = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

namespace detail {

struct ResidualFunctor : Eigen::DenseFunctor<double> {
  using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  ResidualFunctor(Fn f, int inputs, int values) : DenseFunctor(inputs, values), fn(std::move(f)) {}
  int operator()(const InputType& x, ValueType& out) const {
    out = fn(x);
    return 0;
  }
  Fn fn;
};

} // namespace detail

/// Levenberg-Marquardt with a central-difference Jacobian. Non-finite residuals
/// (e.g. a guard violated during a trial step) are replaced by a large penalty.
inline LeastSquaresResult least_squares(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                                        Eigen::VectorXd x0, int values, int max_evaluations = 4000) {
  auto guarded = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd r = residual(x);
    for (Eigen::Index i = 0; i < r.size(); ++i)
      if (!std::isfinite(r[i])) r[i] = 1e6;
    return r;
  };
  detail::ResidualFunctor f(guarded, static_cast<int>(x0.size()), values);
  Eigen::NumericalDiff<detail::ResidualFunctor, Eigen::Central> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::ResidualFunctor, Eigen::Central>> lm(nd);
  lm.setMaxfev(max_evaluations);
  lm.setXtol(1e-15);
  lm.setFtol(1e-15);
  lm.setGtol(0.0);
  lm.minimize(x0);
  LeastSquaresResult out;
  out.x = x0;
  out.evaluations = static_cast<int>(lm.nfev());
  out.max_residual = guarded(x0).cwiseAbs().maxCoeff();
  return out;
}

} // namespace difflab

#pragma once

#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/expr/expression.hpp"
#include "difflab/jet/multi_series.hpp"
#include "difflab/jet/taylor.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace difflab {

namespace detail {

inline double eval_at(const Expression& e, const std::vector<std::string>& names, const std::vector<double>& x) {
  return evaluate(e, Env(names, x));
}

inline std::vector<double> axpy(const std::vector<double>& x, double t, const std::vector<double>& v) {
  std::vector<double> r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += t * v[i];
  return r;
}

// Difference quotients from both sides must approach the jet value.
inline void cross_check_first(const Expression& e, const std::vector<std::string>& names,
                              const std::vector<double>& x, const std::vector<double>& v, double d) {
  const double f0 = eval_at(e, names, x);
  const double h = 1e-6;
  double fwd, bwd;
  try {
    fwd = (eval_at(e, names, axpy(x, h, v)) - f0) / h;
    bwd = (f0 - eval_at(e, names, axpy(x, -h, v))) / h;
  } catch (const DomainError& err) {
    throw NotDifferentiable(std::string("difference quotient undefined: ") + err.what());
  }
  double tol = 1e-3 * (1.0 + std::fabs(d));
  if (std::fabs(fwd - d) > tol || std::fabs(bwd - d) > tol)
    throw NotDifferentiable("difference quotients disagree with the limit");
}

// Nested central differences for k = 2.
inline void cross_check_second(const Expression& e, const std::vector<std::string>& names,
                               const std::vector<double>& x, const std::vector<double>& u,
                               const std::vector<double>& v, double d) {
  const double h = 1e-3;
  auto f = [&](double a, double b) { return eval_at(e, names, axpy(axpy(x, a, u), b, v)); };
  double est;
  try {
    est = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
  } catch (const DomainError& err) {
    throw NotDifferentiable(std::string("difference quotient undefined: ") + err.what());
  }
  if (std::fabs(est - d) > 1e-4 * (1.0 + std::fabs(d) + std::fabs(f(0, 0))))
    throw NotDifferentiable("mixed difference disagrees with the limit");
}

} // namespace detail

/// Iterated Gateaux derivative d^k e(x; v_1..v_k) with v_k the outermost direction.
///
/// k = 1 is the one-parameter limit along x + t v_1, so removable singularities at x
/// (atzero overrides) are resolved. For k >= 2 the inner derivatives must exist on a
/// neighbourhood of x; the value is the coefficient of t_1...t_k in e(x + sum t_i v_i).
inline double directional_derivative(const Expression& e, const std::vector<std::string>& names,
                                     const std::vector<double>& x, const std::vector<std::vector<double>>& dirs) {
  const int k = static_cast<int>(dirs.size());
  if (k == 0) return detail::eval_at(e, names, x);
  if (k > K_MAX) throw DomainError("directional derivative order exceeds K_MAX");
  if (k == 1) {
    double d;
    try {
      d = taylor_eval_line(e, names, x, dirs[0], 1).c[1];
    } catch (const KinkError& err) {
      throw NotDifferentiable(err.what());
    }
    detail::cross_check_first(e, names, x, dirs[0], d);
    return d;
  }
  auto table = MonomialTable::get(k, k);
  std::map<std::string, MultiSeries> in;
  for (std::size_t i = 0; i < names.size(); ++i) {
    MultiSeries s(table, x[i]);
    for (int j = 0; j < k; ++j) s = s + MultiSeries::variable(table, j, 0.0) * MultiSeries(table, dirs[j][i]);
    in.emplace(names[i], s);
  }
  double d;
  try {
    evaluate(e, Env(names, x));
    d = multi_taylor(e, in, table).coefficient(MultiIndex(k, 1));
  } catch (const KinkError& err) {
    throw NotDifferentiable(err.what());
  }
  if (k == 2) detail::cross_check_second(e, names, x, dirs[0], dirs[1], d);
  return d;
}

} // namespace difflab

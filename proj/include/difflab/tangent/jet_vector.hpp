#pragma once

#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/diffeology/model_space.hpp"
#include "difflab/jet/fd.hpp"
#include "difflab/jet/multi_series.hpp"
#include "difflab/jet/taylor.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace difflab {

/// Derivatives D^alpha(f_i o p)|_0 for 1 <= |alpha| <= n; functions major,
/// graded-lex multi-indices minor.
struct JetVector {
  std::vector<double> base;
  int order = 1;
  int dims = 1;
  std::vector<std::string> labels;
  std::vector<double> entries;
  double fd_discrepancy = std::numeric_limits<double>::quiet_NaN(); // largest fd mismatch, when checked

  std::size_t per_function() const { return entries.size() / std::max<std::size_t>(1, labels.size()); }
  bool is_zero(const Tolerances& tol = default_tolerances()) const {
    for (double e : entries)
      if (std::fabs(e) > tol.jet_abs) return false;
    return true;
  }
};

/// Componentwise equality: relative jet_rel or absolute jet_abs.
inline bool jets_equal(const std::vector<double>& a, const std::vector<double>& b,
                       const Tolerances& tol = default_tolerances()) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fabs(a[i] - b[i]);
    if (d > tol.jet_abs && d > tol.jet_rel * std::max(std::fabs(a[i]), std::fabs(b[i]))) return false;
  }
  return true;
}

inline double jet_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::fabs(a[i] - b[i]));
  return g;
}

namespace detail {

/// Taylor coefficients of e about u0 in graded-lex order over MonomialTable(d, n).
inline std::vector<double> local_expansion(const Expression& e, const std::vector<std::string>& names,
                                           const std::vector<double>& u0, int n) {
  if (names.size() == 1) return taylor_eval(e, line_path(names, u0, {1.0}), n).c;
  return multi_taylor_at(e, names, u0, n).coefficients();
}

inline double multi_factorial(const MultiIndex& a) {
  double f = 1.0;
  for (int v : a)
    for (int j = 2; j <= v; ++j) f *= j;
  return f;
}

} // namespace detail

/// Jet vector of p at parameter 0 against the family F.
inline JetVector jet_vector(const Plaque& p, const std::vector<double>& F, const std::vector<std::string>& coords,
                            const FunctionFamily& Ffam, int n, bool fd_check = true,
                            const Tolerances& tol = default_tolerances()) {
  const std::vector<double> zero(p.dim(), 0.0);
  auto at0 = p.eval(zero);
  for (std::size_t i = 0; i < F.size(); ++i)
    if (std::fabs(at0.at(i) - F[i]) > tol.point)
      throw BasePointMismatch("plaque " + p.label + " does not pass through the base point at 0");
  JetVector jv;
  jv.base = F;
  jv.order = n;
  jv.dims = static_cast<int>(p.dim());
  const auto table = MonomialTable::get(jv.dims, n);
  double worst = 0.0;
  for (const auto& f : Ffam) {
    jv.labels.push_back(f.label);
    Expression comp = compose(f.expr, coords, p);
    auto c = detail::local_expansion(comp, p.domain.names, zero, n);
    for (std::size_t i = 1; i < table->size(); ++i) jv.entries.push_back(detail::multi_factorial(table->exponent(i)) * c[i]);
    if (fd_check && jv.dims == 1) {
      auto fd = fd_jet(comp, line_path(p.domain.names, zero, {1.0}), n, 0.0, tol);
      for (int j = 1; j <= n; ++j)
        if (fd.reliable[j]) worst = std::max(worst, std::fabs(fd.jet.c[j] - c[j]) / std::max(1.0, std::fabs(c[j])));
    }
  }
  if (fd_check && jv.dims == 1) jv.fd_discrepancy = worst;
  return jv;
}

} // namespace difflab

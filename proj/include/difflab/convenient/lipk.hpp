#pragma once

#include "difflab/convenient/dual_pair.hpp"
#include "difflab/convenient/weak.hpp"
#include "difflab/core/verdict.hpp"
#include "difflab/jet/divided_difference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace difflab {

namespace detail {

struct DeltaScan {
  double h = 0.0;
  double max_abs = 0.0;
  double where = 0.0;
};

// max |delta^j g| over sliding tuples of j+1 consecutive nodes spaced h across [lo, hi].
inline DeltaScan delta_scan(const std::function<double(double)>& g, double lo, double hi, int j, double h) {
  DeltaScan s;
  s.h = h;
  const long count = static_cast<long>(std::floor((hi - lo) / h + 1e-9)) + 1;
  for (long i = 0; i + j < count; ++i) {
    std::vector<double> t(static_cast<std::size_t>(j + 1));
    for (int m = 0; m <= j; ++m) t[static_cast<std::size_t>(m)] = lo + static_cast<double>(i + m) * h;
    double d = delta_k<double>(g, t);
    if (std::fabs(d) > s.max_abs) {
      s.max_abs = std::fabs(d);
      s.where = 0.5 * (t.front() + t.back());
    }
  }
  return s;
}

} // namespace detail

/// Lip^k test: delta^{k+1}(l o c) must stay bounded as tuples shrink (three scales, ratio 4).
/// Without a dual pair the coordinates are used.
inline Verdict lipk_probe(const SampledCurve& c, int k, const DualPair* pair = nullptr) {
  if (k < 0 || k > 5) throw DomainError("lipk_probe supports 0 <= k <= 5");
  DualPair coords;
  if (!pair) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < c.components.size(); ++i) {
      rows.emplace_back(c.components.size(), 0.0);
      rows.back()[i] = 1.0;
      names.push_back("c" + std::to_string(i + 1));
    }
    coords = make_dual_pair(names, rows, names);
    pair = &coords;
  }
  const int j = k + 1;
  const double L = c.hi - c.lo;
  const double h0 = j <= 3 ? L / 32.0 : L / 16.0;
  std::vector<Residual> trace;
  bool bounded = true;
  for (Eigen::Index r = 0; r < pair->L.rows(); ++r) {
    Expression e = detail::paired(*pair, r, c);
    auto g = [&](double s) { return evaluate(e, Env({c.param}, {s})); };
    std::vector<detail::DeltaScan> scans;
    for (int s = 0; s < 3; ++s) scans.push_back(detail::delta_scan(g, c.lo, c.hi, j, h0 / std::pow(4.0, s)));
    double gmax = 0.0;
    for (int i = 0; i <= 64; ++i) gmax = std::max(gmax, std::fabs(g(c.lo + L * i / 64.0)));
    // rounding in delta^j is about 2^j eps |g| j! / h^j
    auto noise = [&](double h) {
      double f = 1.0;
      for (int i = 2; i <= j; ++i) f *= i;
      return 100.0 * std::pow(2.0, j) * 2.2e-16 * std::max(1.0, gmax) * f / std::pow(h, j);
    };
    for (const auto& s : scans) trace.push_back({"delta_" + std::to_string(j) + "_" + pair->labels[static_cast<std::size_t>(r)], s.h, s.max_abs});
    const double m0 = std::max(scans[0].max_abs, noise(scans[0].h));
    const double m1 = std::max(scans[1].max_abs, noise(scans[1].h));
    const double m2 = std::max(scans[2].max_abs, noise(scans[2].h));
    const bool above = scans[2].max_abs > noise(scans[2].h);
    if (above && m1 > 2.5 * m0 && m2 > 2.5 * m1) {
      Witness w;
      w.kind = "blow-up";
      w.label = pair->labels[static_cast<std::size_t>(r)];
      w.point = {scans[2].where};
      w.values["h"] = scans[2].h;
      w.values["delta"] = scans[2].max_abs;
      w.values["growth"] = m2 / m1;
      w.note = "delta^" + std::to_string(j) + " grows like 1/h near t = " + detail::format_number(scans[2].where);
      return Verdict::fail(w, trace);
    }
    if (above && !(m1 <= 1.5 * m0 && m2 <= 1.5 * m1)) bounded = false;
  }
  if (bounded) return Verdict::pass(trace).note("delta^" + std::to_string(j) + " stable across three scales");
  return Verdict::inconclusive(trace, "delta^" + std::to_string(j) + " neither stable nor clearly growing");
}

} // namespace difflab

#pragma once

#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/core/parallel.hpp"
#include "difflab/core/random.hpp"
#include "difflab/core/verdict.hpp"
#include "difflab/expr/expression.hpp"
#include "difflab/jet/divided_difference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace difflab {

/// Open axis-aligned box over named variables.
struct Box {
  std::vector<std::string> names;
  std::vector<double> lo, hi;

  std::size_t dims() const { return names.size(); }
  bool contains(const std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
    return true;
  }
  double min_half_width() const {
    double w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lo.size(); ++i) w = std::min(w, 0.5 * (hi[i] - lo[i]));
    return w;
  }
  std::vector<double> center() const {
    std::vector<double> c(lo.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }
};

inline Box make_box(std::vector<std::string> names, double lo, double hi) {
  Box b;
  b.lo.assign(names.size(), lo);
  b.hi.assign(names.size(), hi);
  b.names = std::move(names);
  return b;
}

/// Probe path x + s*d1 + s^2*d2 through a sample point.
struct ProbePath {
  std::vector<double> point, d1, d2;
  std::vector<double> at(double s) const {
    std::vector<double> r = point;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * d1[i] + s * s * d2[i];
    return r;
  }
  std::string describe(const std::vector<std::string>& names) const {
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (std::size_t i = 0; i < point.size(); ++i) {
      if (i) os << ", ";
      os << names[i] << " = " << point[i];
      if (d1[i] != 0.0) os << (d1[i] < 0 ? " - " : " + ") << std::fabs(d1[i]) << "*s";
      if (d2[i] != 0.0) os << (d2[i] < 0 ? " - " : " + ") << std::fabs(d2[i]) << "*s^2";
    }
    os << ")";
    return os.str();
  }
};

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr int kScales = 4; // h, h/2, h/4, h/8

struct LocalOutcome {
  Status status = Status::Pass;
  std::string kind;
  int order = 0;
  double scale = 0.0;
  std::map<std::string, double> values;
  std::vector<Residual> trace;
};

inline double factorial(int j) {
  double f = 1.0;
  for (int i = 2; i <= j; ++i) f *= i;
  return f;
}

// Rounding noise of delta^j at spacing h for values of magnitude M.
inline double dd_noise(int j, double h, double M) {
  return factorial(j) * std::pow(2.0, j) * 16.0 * kEps * (1.0 + M) / std::pow(h, j);
}

/// Multi-scale regularity of g at 0 up to order k, with |s| <= reach available.
///
/// Order 0: jumps |g(+-h) - g(0)| must shrink. Orders 1..k: one-sided delta^j on
/// nodes 0, +-h, ..., +-jh must neither blow up nor keep a left/right gap.
/// Order k+1: delta^(k+1) must stay bounded.
inline LocalOutcome local_regularity(const std::function<double(double)>& g, double reach, int k, double h_nominal) {
  LocalOutcome out;
  const double g0 = g(0.0);
  double M = std::fabs(g0);
  auto fail = [&](std::string kind, int order, double h, std::map<std::string, double> vals) {
    out.status = Status::Fail;
    out.kind = std::move(kind);
    out.order = order;
    out.scale = h;
    out.values = std::move(vals);
    out.values["order"] = order;
    out.values["scale"] = h;
  };
  auto soften = [&](int order, double h) {
    if (out.status == Status::Pass) {
      out.status = Status::Inconclusive;
      out.order = order;
      out.scale = h;
    }
  };

  // order 0: continuity
  {
    double H = std::min(h_nominal, 0.9 * reach);
    double jumps[kScales];
    for (int m = 0; m < kScales; ++m) {
      double h = H / (1 << m);
      double a = g(h), b = g(-h);
      M = std::max({M, std::fabs(a), std::fabs(b)});
      jumps[m] = std::max(std::fabs(a - g0), std::fabs(b - g0));
      out.trace.push_back({"jump", h, jumps[m]});
    }
    double floor = 1e-6 * (1.0 + M);
    if (jumps[kScales - 1] > 0.5 * jumps[0] && jumps[kScales - 1] > floor) {
      fail("jump", 0, H / (1 << (kScales - 1)),
           {{"value_at_point", g0}, {"jump", jumps[kScales - 1]}, {"jump_coarse", jumps[0]}});
      return out;
    }
  }

  for (int j = 1; j <= k + 1; ++j) {
    const bool top = j == k + 1;
    const double span = top ? 0.5 * j : j;
    const double H = std::min(h_nominal * std::max(1.0, 0.5 * j), 0.9 * reach / span);
    double right[kScales], left[kScales], centred[kScales], gap[kScales], size[kScales];
    for (int m = 0; m < kScales; ++m) {
      double h = H / (1 << m);
      std::vector<double> rn, ln, cn;
      for (int i = 0; i <= j; ++i) {
        rn.push_back(i * h);
        ln.push_back(-i * h);
        cn.push_back((i - 0.5 * j) * h);
      }
      auto tracked = [&](double s) {
        double v = g(s);
        M = std::max(M, std::fabs(v));
        return v;
      };
      right[m] = delta_k<double>(tracked, rn);
      left[m] = delta_k<double>(tracked, ln);
      centred[m] = top ? delta_k<double>(tracked, cn) : 0.0;
      gap[m] = std::fabs(right[m] - left[m]);
      size[m] = std::max({std::fabs(right[m]), std::fabs(left[m]), std::fabs(centred[m])});
      out.trace.push_back({"delta" + std::to_string(j) + (top ? "_bound" : "_gap"), h, top ? size[m] : gap[m]});
    }
    const int last = kScales - 1;
    const double h_last = H / (1 << last);
    const double noise = 100.0 * dd_noise(j, h_last, M);

    bool growing = true;
    for (int m = 0; m < last; ++m) growing = growing && size[m + 1] > 1.05 * size[m];
    if (growing && size[last] > 2.0 * size[0] && size[last] > noise + 1e-6) {
      fail("blow-up", j, h_last,
           {{"right", right[last]}, {"left", left[last]}, {"estimate", size[last]}, {"estimate_coarse", size[0]}});
      return out;
    }
    if (top) continue;
    const double floor = noise + 1e-6 * (1.0 + size[0]);
    if (gap[last] > floor) {
      if (gap[last] > 0.5 * gap[0]) {
        fail("one-sided-mismatch", j, h_last, {{"right", right[last]}, {"left", left[last]}, {"gap", gap[last]}});
        return out;
      }
      if (gap[last] > 0.3 * gap[0]) soften(j, h_last);
    }
  }
  return out;
}

inline std::vector<ProbePath> probe_paths(const std::vector<double>& x, std::size_t index, std::uint64_t seed) {
  const std::size_t n = x.size();
  std::vector<ProbePath> paths;
  auto unit = [&](std::size_t i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    return e;
  };
  const std::vector<double> zero(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) paths.push_back({x, unit(i), zero});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> a(n, 0.0), b(n, 0.0);
      a[i] = a[j] = 1.0;
      b[i] = 1.0;
      b[j] = -1.0;
      paths.push_back({x, a, zero});
      paths.push_back({x, b, zero});
    }
  if (n >= 2) {
    Rng rng(mix_seed(seed, index));
    for (int r = 0; r < 2; ++r) paths.push_back({x, rng.unit_vector(n), zero});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        std::vector<double> q(n, 0.0);
        q[j] = 1.0;
        paths.push_back({x, unit(i), q});
        q[j] = -1.0;
        paths.push_back({x, unit(i), q});
      }
  }
  return paths;
}

// Parameters s in (-reach, reach) where delta^m of g on a 128-node scan stands far above
// its median, each refined by zooming until the stencil is narrower than 1e-10 reach.
inline std::vector<double> kink_candidates(const std::function<double(double)>& g, double reach, int m) {
  const int N = 128;
  const double a = -0.95 * reach, h = 1.9 * reach / N;
  std::vector<double> vals(N + 1);
  double M = 0.0;
  for (int i = 0; i <= N; ++i) {
    vals[static_cast<std::size_t>(i)] = g(a + i * h);
    M = std::max(M, std::fabs(vals[static_cast<std::size_t>(i)]));
  }
  auto stencil = [m](const std::vector<double>& v, int i) {
    // forward difference of order m (binomial weights), i.e. h^m g^(m) for smooth g
    double d = 0.0, c = 1.0;
    for (int r = 0; r <= m; ++r) {
      d += ((m - r) % 2 ? -c : c) * v[static_cast<std::size_t>(i + r)];
      c = c * (m - r) / (r + 1);
    }
    return std::fabs(d);
  };
  std::vector<double> amp(static_cast<std::size_t>(N - m + 1));
  for (int i = 0; i + m <= N; ++i) amp[static_cast<std::size_t>(i)] = stencil(vals, i);
  std::vector<double> sorted = amp;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double noise = 64.0 * std::pow(2.0, m) * kEps * (1.0 + M);
  std::vector<std::pair<double, int>> peaks;
  for (int i = 0; i < static_cast<int>(amp.size()); ++i) {
    const double v = amp[static_cast<std::size_t>(i)];
    const bool local_max = (i == 0 || v >= amp[static_cast<std::size_t>(i - 1)]) &&
                           (i + 1 == static_cast<int>(amp.size()) || v > amp[static_cast<std::size_t>(i + 1)]);
    if (local_max && v > 20.0 * median + noise) peaks.emplace_back(v, i);
  }
  std::sort(peaks.begin(), peaks.end(), std::greater<>());
  if (peaks.size() > 3) peaks.resize(3);
  std::vector<double> out;
  for (const auto& pk : peaks) {
    double lo = std::max(-reach * 0.999, a + (pk.second - 1) * h), hi = std::min(reach * 0.999, a + (pk.second + m + 1) * h);
    for (int round = 0; round < 40 && hi - lo > 1e-10 * reach; ++round) {
      const int n = 32;
      const double hh = (hi - lo) / n;
      std::vector<double> v(n + 1);
      for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = g(lo + i * hh);
      int best = 0;
      double best_amp = -1.0;
      for (int i = 0; i + m <= n; ++i) {
        const double d = stencil(v, i);
        if (d > best_amp) {
          best_amp = d;
          best = i;
        }
      }
      const double nlo = lo + (best - 1) * hh, nhi = lo + (best + m + 1) * hh;
      lo = std::max(lo, nlo);
      hi = std::min(hi, nhi);
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

// Largest s (from a halving ladder) with the path inside the box on both sides.
inline double path_reach(const ProbePath& p, const Box& box) {
  double s = 2.0 * box.min_half_width();
  for (int it = 0; it < 60; ++it, s *= 0.5) {
    bool inside = true;
    for (double f : {1.0, -1.0, 0.5, -0.5})
      if (!box.contains(p.at(f * s))) inside = false;
    if (inside) return s;
  }
  return 0.0;
}

} // namespace detail

/// Sample points: the origin (when inside) followed by an interior grid.
inline std::vector<std::vector<double>> probe_points(const Box& box, int grid) {
  std::vector<std::vector<double>> pts;
  const std::size_t n = box.dims();
  std::vector<double> origin(n, 0.0);
  if (box.contains(origin)) pts.push_back(origin);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(grid);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> x(n);
    std::size_t r = idx;
    for (std::size_t i = 0; i < n; ++i) {
      int gi = static_cast<int>(r % grid);
      r /= grid;
      x[i] = box.lo[i] + (gi + 1.0) / (grid + 1.0) * (box.hi[i] - box.lo[i]);
    }
    if (x != origin) pts.push_back(x);
  }
  return pts;
}

/// Multi-scale C^k test of e on a box, along lines and parabolas through sample points.
///
/// FAIL carries the sample point, the path and the diverging estimate; INCONCLUSIVE
/// the residual trace of the first undecided path.
inline Verdict smoothness_probe(const Expression& e, const Box& box, int k, const Tolerances& tol = default_tolerances()) {
  if (k < 0 || k > K_MAX) throw DomainError("smoothness order outside [0, " + std::to_string(K_MAX) + "]");
  const auto points = probe_points(box, tol.grid);
  const double h_nominal = 0.05 * box.min_half_width();

  struct Slot {
    Status status = Status::Pass;
    ProbePath path;
    detail::LocalOutcome outcome;
    std::size_t paths = 0;
  };
  std::vector<Slot> slots(points.size());
  parallel_for(points.size(), [&](std::size_t pi) {
    const auto& x = points[pi];
    evaluate(e, Env(box.names, x));
    for (const auto& path : detail::probe_paths(x, pi, tol.seed)) {
      double reach = detail::path_reach(path, box);
      if (reach <= 0.0) continue;
      auto g = [&](double s) { return evaluate(e, Env(box.names, path.at(s))); };
      auto res = detail::local_regularity(g, reach, k, h_nominal);
      ++slots[pi].paths;
      if (res.status == Status::Fail || (res.status == Status::Inconclusive && slots[pi].status == Status::Pass)) {
        slots[pi].status = res.status;
        slots[pi].path = path;
        slots[pi].outcome = res;
      }
      if (res.status == Status::Fail) return;
      // kinks between sample points: locate along straight paths, then test locally
      if (std::any_of(path.d2.begin(), path.d2.end(), [](double v) { return v != 0.0; })) continue;
      for (double s : detail::kink_candidates(g, reach, std::min(k + 1, 3))) {
        ProbePath moved{path.at(s), path.d1, path.d2};
        double r2 = detail::path_reach(moved, box);
        if (r2 <= 0.0) continue;
        auto g2 = [&](double u) { return evaluate(e, Env(box.names, moved.at(u))); };
        auto res2 = detail::local_regularity(g2, r2, k, std::min(h_nominal, 0.5 * r2));
        if (res2.status == Status::Fail) {
          slots[pi].status = Status::Fail;
          slots[pi].path = moved;
          slots[pi].outcome = res2;
          return;
        }
      }
    }
  });

  std::size_t checked = 0;
  const Slot* undecided = nullptr;
  const Slot* steep = nullptr;
  for (const auto& s : slots) {
    checked += s.paths;
    // an analytic point cannot carry a jump or kink: the feature is finer than the probe scales
    if (s.status == Status::Fail && analytic_at(e, Env(box.names, s.path.point))) {
      if (!steep) steep = &s;
      continue;
    }
    if (s.status == Status::Fail) {
      Witness w;
      w.kind = s.outcome.kind;
      w.point = s.path.point;
      w.direction = s.path.d1;
      w.values = s.outcome.values;
      if (std::any_of(s.path.d2.begin(), s.path.d2.end(), [](double v) { return v != 0.0; }))
        for (std::size_t i = 0; i < s.path.d2.size(); ++i) w.values["curvature_" + box.names[i]] = s.path.d2[i];
      w.note = "path " + s.path.describe(box.names);
      return Verdict::fail(std::move(w), s.outcome.trace);
    }
    if (s.status == Status::Inconclusive && !undecided) undecided = &s;
  }
  if (steep)
    return Verdict::inconclusive(steep->outcome.trace, "apparent " + steep->outcome.kind + " at an analytic point along " +
                                                         steep->path.describe(box.names) + "; feature below the probe scales");
  if (undecided)
    return Verdict::inconclusive(undecided->outcome.trace, "slow convergence of one-sided order-" +
                                                               std::to_string(undecided->outcome.order) +
                                                               " estimates along " +
                                                               undecided->path.describe(box.names));
  if (checked == 0) return Verdict::inconclusive({}, "no probe path fits inside the box");
  return Verdict::pass({{"paths_checked", 0.0, static_cast<double>(checked)}});
}

} // namespace difflab

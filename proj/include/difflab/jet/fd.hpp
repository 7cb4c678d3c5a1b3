#pragma once

#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/expr/expression.hpp"
#include "difflab/jet/taylor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace difflab {

/// Finite-difference estimate of a jet with per-coefficient error estimates.
struct FdJet {
  Jet jet;
  std::vector<double> error;   // |last two Richardson extrapolants|
  std::vector<bool> reliable;  // Richardson-consistent and no one-sided kink detected
  std::vector<double> steps;   // base step used for each order
  bool kink = false;
};

/// Fornberg's algorithm: weights of the m-th derivative at x0 on the given nodes.
inline std::vector<double> fornberg_weights(double x0, const std::vector<double>& nodes, int m) {
  const int n = static_cast<int>(nodes.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

namespace detail {

// Half-width of the central stencil with fourth-order accuracy for derivative j.
inline int central_half_width(int j) { return (j + 1) / 2 + 1; }

// Default base steps per derivative order; larger steps for higher orders keep the
// h^-j rounding amplification below the truncation error of the extrapolated value.
inline double default_fd_step(int j) {
  static const std::array<double, K_MAX + 1> steps{0.0, 0.02, 0.04, 0.08, 0.12, 0.16, 0.2};
  return steps[static_cast<std::size_t>(j)];
}

} // namespace detail

/// Central-difference estimates of the Taylor coefficients of s -> e(path(s)) at 0.
///
/// Each derivative uses a fourth-order central stencil at steps h, h/2, h/4 followed by
/// two Richardson eliminations (h^4, then h^6). Only point evaluation of e is used.
/// `h <= 0` scans a ladder of base steps per order and keeps the one whose last two
/// extrapolants agree best.
inline FdJet fd_jet(const Expression& e, const PolynomialPath& path, int k, double h = 0.0,
                    const Tolerances& tol = default_tolerances()) {
  if (k < 0 || k > K_MAX) throw DomainError("jet order outside [0, " + std::to_string(K_MAX) + "]");
  auto g = [&](double s) { return evaluate(e, path_point(path, s)); };
  FdJet out;
  out.jet.c.assign(k + 1, 0.0);
  out.error.assign(k + 1, 0.0);
  out.reliable.assign(k + 1, true);
  out.steps.assign(k + 1, 0.0);
  const double g0 = g(0.0);
  out.jet.c[0] = g0;

  double factorial = 1.0;
  for (int j = 1; j <= k; ++j) {
    factorial *= j;
    const int m = detail::central_half_width(j);
    std::vector<double> unit_nodes;
    for (int i = -m; i <= m; ++i) unit_nodes.push_back(i);
    const std::vector<double> w = fornberg_weights(0.0, unit_nodes, j);
    auto extrapolate = [&](double hj, double& err) {
      double D[3];
      for (int level = 0; level < 3; ++level) {
        double step = hj / (1 << level);
        double acc = 0.0;
        for (int i = -m; i <= m; ++i) acc += w[i + m] * (i == 0 ? g0 : g(i * step));
        D[level] = acc / std::pow(step, j);
      }
      double R1a = (16.0 * D[1] - D[0]) / 15.0;
      double R1b = (16.0 * D[2] - D[1]) / 15.0;
      double R2 = (64.0 * R1b - R1a) / 63.0;
      err = std::fabs(R2 - R1b);
      return std::pair{R2, R1b};
    };
    // explicit step: one ladder; automatic: the ladder start with the smallest error
    // estimate, skipping starts whose stencil leaves the domain
    double best_h = h;
    double best_err = 0.0;
    std::pair<double, double> best{0.0, 0.0};
    if (h > 0.0) {
      best = extrapolate(h, best_err);
    } else {
      best_err = std::numeric_limits<double>::infinity();
      for (int shrink = 0; shrink <= 6; ++shrink) {
        double hj = detail::default_fd_step(j) / (1 << shrink), err = 0.0;
        try {
          auto cand = extrapolate(hj, err);
          if (err < best_err) {
            best = cand;
            best_err = err;
            best_h = hj;
          }
        } catch (const DomainError&) {
        }
      }
      if (!std::isfinite(best_err)) throw DomainError("every finite-difference stencil leaves the domain");
    }
    out.steps[j] = best_h;
    out.jet.c[j] = best.first / factorial;
    out.error[j] = best_err / factorial;
    double scale = std::max(std::fabs(best.first), std::fabs(best.second));
    out.reliable[j] = best_err <= std::max(tol.richardson_rel * scale, tol.richardson_abs);
  }

  if (k >= 1) {
    // one-sided slopes must approach each other; a persistent gap marks a kink
    const double h1 = out.steps[1];
    double gaps[3];
    for (int level = 0; level < 3; ++level) {
      double step = h1 / (1 << (2 * level));
      double fwd = (g(step) - g0) / step;
      double bwd = (g0 - g(-step)) / step;
      gaps[level] = std::fabs(fwd - bwd);
    }
    double noise = 64.0 * 2.2e-16 * (1.0 + std::fabs(g0)) / (h1 / 16.0);
    if (gaps[2] > 0.5 * gaps[0] && gaps[2] > 1e3 * noise) {
      out.kink = true;
      for (int j = 1; j <= k; ++j) out.reliable[j] = false;
    }
  }
  return out;
}

} // namespace difflab

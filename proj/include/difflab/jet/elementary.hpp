#pragma once

#include <cmath>
#include <vector>

namespace difflab::detail {

// Taylor coefficients f^(j)(u0)/j!, j = 0..n, of the elementary functions.

inline std::vector<double> exp_coefficients(double u0, int n) {
  std::vector<double> a(n + 1);
  double e = std::exp(u0), fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) fact *= j;
    a[j] = e / fact;
  }
  return a;
}

inline std::vector<double> sin_coefficients(double u0, int n, bool cosine) {
  std::vector<double> a(n + 1);
  double s = std::sin(u0), c = std::cos(u0), fact = 1.0;
  // derivatives of sin cycle through sin, cos, -sin, -cos; cos is sin shifted by one
  const double cycle[4] = {s, c, -s, -c};
  for (int j = 0; j <= n; ++j) {
    if (j > 0) fact *= j;
    a[j] = cycle[(j + (cosine ? 1 : 0)) % 4] / fact;
  }
  return a;
}

inline std::vector<double> log_coefficients(double u0, int n) {
  std::vector<double> a(n + 1);
  a[0] = std::log(u0);
  double p = 1.0;
  for (int j = 1; j <= n; ++j) {
    p *= u0;
    a[j] = ((j % 2) ? 1.0 : -1.0) / (j * p);
  }
  return a;
}

/// (u0 + d)^alpha = sum_j binom(alpha, j) u0^(alpha - j) d^j, u0 > 0.
inline std::vector<double> power_coefficients(double u0, double alpha, int n) {
  std::vector<double> a(n + 1);
  double binom = 1.0, base = std::pow(u0, alpha);
  for (int j = 0; j <= n; ++j) {
    if (j > 0) binom *= (alpha - (j - 1)) / j;
    a[j] = binom * base / std::pow(u0, j);
  }
  return a;
}

inline std::vector<double> reciprocal_coefficients(double u0, int n) {
  std::vector<double> a(n + 1);
  double p = 1.0 / u0;
  for (int j = 0; j <= n; ++j) {
    a[j] = ((j % 2) ? -1.0 : 1.0) * p;
    p /= u0;
  }
  return a;
}

/// Evaluates sum_j a[j] * delta^j by Horner's rule in any truncated-series type.
template <class S>
S horner(const std::vector<double>& a, const S& delta) {
  S r = delta.constant_like(a.back());
  for (int j = static_cast<int>(a.size()) - 2; j >= 0; --j) r = r * delta + delta.constant_like(a[j]);
  return r;
}

} // namespace difflab::detail

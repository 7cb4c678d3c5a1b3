#pragma once

#include "difflab/core/errors.hpp"
#include "difflab/jet/elementary.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace difflab {

/// Univariate truncated power series in a parameter s about s = 0.
///
/// Coefficients 0..known() are exact; the tail up to the working order is padding.
/// Tracking the known order lets division cancel common leading zeros
/// (removable singularities) while reporting how much precision survives.
class Series {
public:
  Series(int order, double c0 = 0.0) : c_(order + 1, 0.0), known_(order) { c_[0] = c0; }

  static Series polynomial(const std::vector<double>& coeffs, int order) {
    Series s(order);
    for (std::size_t i = 0; i < coeffs.size() && static_cast<int>(i) <= order; ++i) s.c_[i] = coeffs[i];
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  int known() const { return known_; }
  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }
  const std::vector<double>& coefficients() const { return c_; }

  Series constant_like(double v) const { return Series(order(), v); }

  /// Caps the known order; coefficients past it are cleared.
  Series& limit_known(int k) {
    known_ = std::min(known_, k);
    for (int i = std::max(0, known_ + 1); i <= order(); ++i) c_[i] = 0.0;
    return *this;
  }

  /// Index of the first nonzero known coefficient, or known() + 1 when all are zero.
  int valuation() const {
    for (int i = 0; i <= known_; ++i)
      if (c_[i] != 0.0) return i;
    return known_ + 1;
  }
  bool known_zero() const { return valuation() > known_; }

  friend Series operator+(const Series& a, const Series& b) {
    Series r(a.order());
    for (int i = 0; i <= r.order(); ++i) r.c_[i] = a.c_[i] + b.c_[i];
    r.known_ = std::min(a.known_, b.known_);
    return r;
  }
  friend Series operator-(const Series& a, const Series& b) {
    Series r(a.order());
    for (int i = 0; i <= r.order(); ++i) r.c_[i] = a.c_[i] - b.c_[i];
    r.known_ = std::min(a.known_, b.known_);
    return r;
  }
  friend Series operator-(const Series& a) {
    Series r = a;
    for (auto& c : r.c_) c = -c;
    return r;
  }
  friend Series operator*(const Series& a, double k) {
    Series r = a;
    for (auto& c : r.c_) c *= k;
    return r;
  }
  friend Series operator*(const Series& a, const Series& b) {
    const int n = a.order();
    Series r(n);
    for (int i = 0; i <= n; ++i) {
      double acc = 0.0;
      for (int j = 0; j <= i; ++j) acc += a.c_[j] * b.c_[i - j];
      r.c_[i] = acc;
    }
    // coefficient i only needs a_j with j <= known(a) or b_{i-j} a known zero, and vice versa
    r.known_ = std::min({n, a.known_ + b.valuation(), b.known_ + a.valuation()});
    return r;
  }

  /// Shift down by v (divide by s^v); the caller guarantees the first v coefficients vanish.
  Series shifted_down(int v) const {
    Series r(order());
    for (int i = 0; i + v <= order(); ++i) r.c_[i] = c_[i + v];
    r.known_ = known_ - v;
    return r;
  }
  Series shifted_up(int v) const {
    Series r(order());
    for (int i = order(); i >= v; --i) r.c_[i] = c_[i - v];
    r.known_ = std::min(order(), known_ + v);
    return r;
  }

  /// Quotient with cancellation of common leading zeros.
  friend Series operator/(const Series& a, const Series& b) {
    int vb = b.valuation();
    if (vb > b.known_) throw DomainError("division by a series that vanishes to its known order");
    int va = a.valuation();
    if (va < vb) throw DomainError("pole: numerator vanishes to lower order than denominator");
    Series num = a.shifted_down(vb);
    Series den = b.shifted_down(vb);
    Series q(a.order());
    const int n = q.order();
    for (int i = 0; i <= n; ++i) {
      double acc = num.c_[i];
      for (int j = 1; j <= i; ++j) acc -= den.c_[j] * q.c_[i - j];
      q.c_[i] = acc / den.c_[0];
    }
    q.known_ = std::min(num.known_, den.known_);
    for (int i = std::max(0, q.known_ + 1); i <= n; ++i) q.c_[i] = 0.0;
    return q;
  }

private:
  std::vector<double> c_;
  int known_;
};

namespace detail {

/// f(u) for an elementary f given its Taylor coefficients at u0 = u[0].
inline Series compose_elementary(const Series& u, const std::vector<double>& coeffs) {
  Series delta = u;
  delta[0] = 0.0;
  return horner(coeffs, delta);
}

} // namespace detail

} // namespace difflab

#pragma once

#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/expr/expression.hpp"
#include "difflab/jet/elementary.hpp"
#include "difflab/jet/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace difflab {

/// Taylor coefficients c_0..c_k of a scalar function of one parameter at a base point.
/// `base` is the expansion point of the parameter (used by compose_jets).
struct Jet {
  double base = 0.0;
  std::vector<double> c;

  int order() const { return static_cast<int>(c.size()) - 1; }
  double operator[](int i) const { return c[i]; }
  /// i-th derivative, i! * c_i.
  double derivative(int i) const {
    double f = 1.0;
    for (int j = 2; j <= i; ++j) f *= j;
    return f * c[i];
  }
};

/// Polynomial curve s -> (x_i(s)); each entry lists the coefficients of s^0, s^1, ...
using PolynomialPath = std::map<std::string, std::vector<double>>;

/// Straight line base + s*dir over the named variables.
inline PolynomialPath line_path(const std::vector<std::string>& names, const std::vector<double>& base,
                                const std::vector<double>& dir) {
  PolynomialPath p;
  for (std::size_t i = 0; i < names.size(); ++i) p[names[i]] = {base.at(i), dir.at(i)};
  return p;
}

inline Env path_point(const PolynomialPath& path, double s = 0.0) {
  Env env;
  for (const auto& [name, coeffs] : path) {
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * s + *it;
    env.set(name, v);
  }
  return env;
}

namespace detail {

// Raised when cancellation consumed more precision than the working order holds.
struct InsufficientOrder {};

struct SeriesContext {
  int order;
  int side;                       // +1: s -> 0+, -1: s -> 0-
  bool side_sensitive = false;    // a branch depended on the side
  std::map<std::string, Series> vars;
};

inline void require_known(const Series& s, int i = 0) {
  if (s.known() < i) throw InsufficientOrder{};
}

inline Series zero_series(int order, int known) {
  if (known < 0) throw InsufficientOrder{};
  Series z(order);
  z.limit_known(known);
  return z;
}

inline bool known_constant(const Series& s) {
  for (int i = 1; i <= s.order(); ++i)
    if (s[i] != 0.0) return false;
  return true;
}

// Sign of the series for small s on the active side, given it vanishes at 0.
inline int local_sign(const Series& u, SeriesContext& ctx) {
  int v = u.valuation();
  ctx.side_sensitive = true;
  double lead = u[v];
  int sigma_v = (v % 2 == 0) ? 1 : ctx.side;
  return (lead > 0 ? 1 : -1) * sigma_v;
}

inline Series integer_power(const Series& a, long n) {
  Series result = a.constant_like(1.0);
  Series base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

inline Series real_power(const Series& a, double alpha, SeriesContext& ctx) {
  const int N = a.order();
  require_known(a);
  if (a[0] > 0.0) return compose_elementary(a, power_coefficients(a[0], alpha, N));
  if (a[0] < 0.0) throw DomainError("non-integer power of a negative value");
  if (alpha < 0.0) throw DomainError("negative power of zero");
  ctx.side_sensitive = true;
  if (a.known_zero()) {
    // |a| <= C s^(K+1), so |a|^alpha vanishes to order ceil(alpha (K+1)) - 1
    int known = std::min(N, static_cast<int>(std::ceil(alpha * (a.known() + 1))) - 1);
    return zero_series(N, known);
  }
  int v = a.valuation();
  double m_real = v * alpha;
  long m = std::lround(m_real);
  if (std::fabs(m_real - m) > 1e-12) throw KinkError("fractional power vanishing at the base point");
  int sigma_v = (v % 2 == 0) ? 1 : ctx.side;
  Series w = a.shifted_down(v) * static_cast<double>(sigma_v);
  if (!(w[0] > 0.0)) throw DomainError("non-integer power of a negative value");
  Series r = compose_elementary(w, power_coefficients(w[0], alpha, N));
  int sigma_m = (m % 2 == 0) ? 1 : ctx.side;
  return r.shifted_up(static_cast<int>(m)) * static_cast<double>(sigma_m);
}

inline Series series_eval(const Node& n, SeriesContext& ctx);

inline Series series_div(const Series& a, const Series& b) {
  if (b.known_zero()) throw InsufficientOrder{};
  if (a.known_zero() && a.valuation() < b.valuation()) throw InsufficientOrder{};
  Series q = a / b;
  if (q.known() < 0) throw InsufficientOrder{};
  return q;
}

inline Series series_eval(const Node& n, SeriesContext& ctx) {
  const int N = ctx.order;
  auto arg = [&](std::size_t i) { return series_eval(*n.args[i], ctx); };
  switch (n.op) {
  case Op::Const: return Series(N, n.value);
  case Op::Var: {
    auto it = ctx.vars.find(n.name);
    if (it == ctx.vars.end()) throw DomainError("unbound variable '" + n.name + "'");
    return it->second;
  }
  case Op::Add: return arg(0) + arg(1);
  case Op::Sub: return arg(0) - arg(1);
  case Op::Mul: return arg(0) * arg(1);
  case Op::Div: {
    Series a = arg(0), b = arg(1);
    return series_div(a, b);
  }
  case Op::Neg: return -arg(0);
  case Op::Pow: {
    Series a = arg(0), b = arg(1);
    require_known(b);
    if (known_constant(b) && is_integer(b[0])) {
      long p = std::lround(b[0]);
      if (p >= 0) return integer_power(a, p);
      return series_div(a.constant_like(1.0), integer_power(a, -p));
    }
    if (known_constant(b)) return real_power(a, b[0], ctx);
    require_known(a);
    if (!(a[0] > 0.0)) throw DomainError("variable exponent needs a positive base");
    Series la = compose_elementary(a, log_coefficients(a[0], N));
    Series e = b * la;
    return compose_elementary(e, exp_coefficients(e[0], N));
  }
  case Op::Sin:
  case Op::Cos: {
    Series a = arg(0);
    require_known(a);
    return compose_elementary(a, sin_coefficients(a[0], N, n.op == Op::Cos));
  }
  case Op::Exp: {
    Series a = arg(0);
    require_known(a);
    return compose_elementary(a, exp_coefficients(a[0], N));
  }
  case Op::Log: {
    Series a = arg(0);
    require_known(a);
    if (!(a[0] > 0.0)) throw DomainError("log of a non-positive value");
    return compose_elementary(a, log_coefficients(a[0], N));
  }
  case Op::Sqrt: return real_power(arg(0), 0.5, ctx);
  case Op::Abs:
  case Op::Relu: {
    Series a = arg(0);
    require_known(a);
    int sign;
    if (a[0] != 0.0) sign = a[0] > 0 ? 1 : -1;
    else if (a.known_zero()) return zero_series(N, a.known());
    else sign = local_sign(a, ctx);
    if (n.op == Op::Abs) return a * static_cast<double>(sign);
    return sign > 0 ? a : zero_series(N, N);
  }
  case Op::AtZero: {
    bool at_origin = true, identically = true;
    for (std::size_t i = 2; i < n.args.size(); ++i) {
      Series g = arg(i);
      require_known(g);
      if (g[0] != 0.0) {
        at_origin = false;
        break;
      }
      if (!g.known_zero() || g.known() < N) identically = false;
    }
    if (!at_origin) return arg(0);
    double value = series_eval(*n.args[1], ctx)[0];
    if (identically) return Series(N, value);
    Series inner(N);
    try {
      inner = arg(0);
    } catch (const DomainError& e) {
      throw KinkError(std::string("override point is not a limit point: ") + e.what());
    }
    require_known(inner);
    if (std::fabs(inner[0] - value) > 1e-10 * (1.0 + std::fabs(value)))
      throw KinkError("value override differs from the limit along the path");
    inner[0] = value;
    return inner;
  }
  }
  throw DomainError("unknown operator");
}

// Pads/crops a path to a series of the working order.
inline std::map<std::string, Series> path_series(const PolynomialPath& path, int N) {
  std::map<std::string, Series> vars;
  for (const auto& [name, coeffs] : path) vars.emplace(name, Series::polynomial(coeffs, N));
  return vars;
}

} // namespace detail

/// Exact Taylor coefficients of s -> e(path(s)) at s = 0 up to order k.
///
/// Removable 0/0 singularities (and atzero overrides) are resolved by series
/// cancellation. Kinks are examined from both sides; matching one-sided jets are
/// returned, differing ones raise KinkError.
inline Jet taylor_eval(const Expression& e, const PolynomialPath& path, int k) {
  if (k < 0 || k > K_MAX) throw DomainError("jet order outside [0, " + std::to_string(K_MAX) + "]");
  evaluate(e, path_point(path)); // guard check at the base point
  for (int N = k; N <= k + 24; N += 4) {
    try {
      detail::SeriesContext right{N, +1, false, detail::path_series(path, N)};
      Series r = detail::series_eval(e.node(), right);
      if (r.known() < k) continue;
      if (right.side_sensitive) {
        detail::SeriesContext left{N, -1, false, detail::path_series(path, N)};
        Series l = detail::series_eval(e.node(), left);
        if (l.known() < k) continue;
        double scale = 0.0;
        for (int i = 0; i <= k; ++i) scale = std::max({scale, std::fabs(r[i]), std::fabs(l[i])});
        for (int i = 0; i <= k; ++i)
          if (std::fabs(r[i] - l[i]) > 1e-12 * (1.0 + scale))
            throw KinkError("one-sided jets differ at order " + std::to_string(i));
      }
      Jet j;
      j.c.assign(r.coefficients().begin(), r.coefficients().begin() + k + 1);
      for (double c : j.c)
        if (!std::isfinite(c)) throw DomainError("non-finite jet coefficient");
      return j;
    } catch (const detail::InsufficientOrder&) {
    }
  }
  throw DomainError("cancellation exhausted the working order");
}

/// Jet of e along the straight line x + s*v.
inline Jet taylor_eval_line(const Expression& e, const std::vector<std::string>& names, const std::vector<double>& x,
                            const std::vector<double>& v, int k) {
  return taylor_eval(e, line_path(names, x, v), k);
}

/// Faa di Bruno: coefficients of outer(inner(s)) where outer is expanded about inner[0].
inline Jet compose_jets(const Jet& outer, const Jet& inner) {
  if (outer.order() != inner.order()) throw OrderMismatch("compose_jets: orders differ");
  if (std::fabs(inner.c[0] - outer.base) > 1e-12 * (1.0 + std::fabs(outer.base)))
    throw BasePointMismatch("compose_jets: inner value differs from the outer base point");
  const int k = inner.order();
  Series delta = Series::polynomial(inner.c, k);
  delta[0] = 0.0;
  Series r = detail::horner(outer.c, delta);
  Jet j;
  j.base = inner.base;
  j.c.assign(r.coefficients().begin(), r.coefficients().end());
  return j;
}

} // namespace difflab

#pragma once

#include "difflab/core/errors.hpp"
#include "difflab/expr/expression.hpp"
#include "difflab/jet/elementary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace difflab {

using MultiIndex = std::vector<int>;

/// Monomials of total degree <= N in d variables, graded-lex ordered:
/// by degree, then by decreasing power of the first variable, and so on.
class MonomialTable {
public:
  MonomialTable(int d, int N) : d_(d), N_(N) {
    for (int deg = 0; deg <= N; ++deg) {
      MultiIndex a(d, 0);
      emit(a, 0, deg);
    }
    for (std::size_t i = 0; i < exps_.size(); ++i) index_[exps_[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < exps_.size(); ++i)
      for (std::size_t j = 0; j < exps_.size(); ++j) {
        if (degree(i) + degree(j) > N) continue;
        MultiIndex s(d);
        for (int v = 0; v < d; ++v) s[v] = exps_[i][v] + exps_[j][v];
        products_.push_back({static_cast<int>(i), static_cast<int>(j), index_.at(s)});
      }
  }

  static std::shared_ptr<const MonomialTable> get(int d, int N) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{d, N}];
    if (!slot) slot = std::make_shared<const MonomialTable>(d, N);
    return slot;
  }

  int dims() const { return d_; }
  int order() const { return N_; }
  std::size_t size() const { return exps_.size(); }
  const MultiIndex& exponent(std::size_t i) const { return exps_[i]; }
  int degree(std::size_t i) const {
    int s = 0;
    for (int e : exps_[i]) s += e;
    return s;
  }
  int index(const MultiIndex& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) throw OrderMismatch("multi-index outside the truncation");
    return it->second;
  }
  struct Product {
    int i, j, k;
  };
  const std::vector<Product>& products() const { return products_; }

private:
  void emit(MultiIndex& a, int var, int remaining) {
    if (var == d_ - 1) {
      a[var] = remaining;
      exps_.push_back(a);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      a[var] = e;
      emit(a, var + 1, remaining - e);
    }
    a[var] = 0;
  }

  int d_, N_;
  std::vector<MultiIndex> exps_;
  std::map<MultiIndex, int> index_;
  std::vector<Product> products_;
};

/// Truncated multivariate power series (total degree <= N) about the origin.
class MultiSeries {
public:
  MultiSeries(std::shared_ptr<const MonomialTable> t, double c0 = 0.0) : t_(std::move(t)), c_(t_->size(), 0.0) {
    c_[0] = c0;
  }

  /// a + x_var, the seed of an input variable.
  static MultiSeries variable(std::shared_ptr<const MonomialTable> t, int var, double a) {
    MultiSeries s(t, a);
    if (t->order() >= 1) {
      MultiIndex e(t->dims(), 0);
      e[var] = 1;
      s.c_[t->index(e)] = 1.0;
    }
    return s;
  }

  const MonomialTable& table() const { return *t_; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  double coefficient(const MultiIndex& a) const { return c_[t_->index(a)]; }
  const std::vector<double>& coefficients() const { return c_; }
  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
  }

  MultiSeries constant_like(double v) const { return MultiSeries(t_, v); }

  friend MultiSeries operator+(MultiSeries a, const MultiSeries& b) {
    for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
    return a;
  }
  friend MultiSeries operator-(MultiSeries a, const MultiSeries& b) {
    for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] -= b.c_[i];
    return a;
  }
  friend MultiSeries operator-(MultiSeries a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }
  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
    MultiSeries r(a.t_);
    for (const auto& p : a.t_->products()) r.c_[p.k] += a.c_[p.i] * b.c_[p.j];
    return r;
  }

private:
  std::shared_ptr<const MonomialTable> t_;
  std::vector<double> c_;
};

namespace detail {

inline MultiSeries multi_compose(const MultiSeries& u, const std::vector<double>& coeffs) {
  MultiSeries delta = u;
  delta[0] = 0.0;
  return horner(coeffs, delta);
}

inline MultiSeries multi_power(const MultiSeries& a, double alpha) {
  const int N = a.table().order();
  if (a[0] > 0.0) return multi_compose(a, power_coefficients(a[0], alpha, N));
  if (a[0] < 0.0) throw DomainError("non-integer power of a negative value");
  if (alpha > 0.0 && a.is_zero()) return a.constant_like(0.0);
  throw KinkError("fractional power vanishing at the base point");
}

inline MultiSeries multi_eval(const Node& n, const std::map<std::string, MultiSeries>& vars,
                              const std::shared_ptr<const MonomialTable>& t) {
  auto arg = [&](std::size_t i) { return multi_eval(*n.args[i], vars, t); };
  const int N = t->order();
  switch (n.op) {
  case Op::Const: return MultiSeries(t, n.value);
  case Op::Var: {
    auto it = vars.find(n.name);
    if (it == vars.end()) throw DomainError("unbound variable '" + n.name + "'");
    return it->second;
  }
  case Op::Add: return arg(0) + arg(1);
  case Op::Sub: return arg(0) - arg(1);
  case Op::Mul: return arg(0) * arg(1);
  case Op::Div: {
    MultiSeries a = arg(0), b = arg(1);
    if (b[0] == 0.0) throw DomainError("division by zero at the base point");
    return a * multi_compose(b, reciprocal_coefficients(b[0], N));
  }
  case Op::Neg: return -arg(0);
  case Op::Pow: {
    MultiSeries a = arg(0), b = arg(1);
    bool constant = true;
    for (std::size_t i = 1; i < b.coefficients().size(); ++i) constant = constant && b[i] == 0.0;
    if (constant && is_integer(b[0])) {
      long p = std::lround(b[0]);
      if (p < 0) {
        if (a[0] == 0.0) throw DomainError("zero to a negative power");
        a = multi_compose(a, reciprocal_coefficients(a[0], N));
        p = -p;
      }
      MultiSeries r = a.constant_like(1.0);
      for (long i = 0; i < p; ++i) r = r * a;
      return r;
    }
    if (constant) return multi_power(a, b[0]);
    if (!(a[0] > 0.0)) throw DomainError("variable exponent needs a positive base");
    MultiSeries e = b * multi_compose(a, log_coefficients(a[0], N));
    return multi_compose(e, exp_coefficients(e[0], N));
  }
  case Op::Sin:
  case Op::Cos: {
    MultiSeries a = arg(0);
    return multi_compose(a, sin_coefficients(a[0], N, n.op == Op::Cos));
  }
  case Op::Exp: {
    MultiSeries a = arg(0);
    return multi_compose(a, exp_coefficients(a[0], N));
  }
  case Op::Log: {
    MultiSeries a = arg(0);
    if (!(a[0] > 0.0)) throw DomainError("log of a non-positive value");
    return multi_compose(a, log_coefficients(a[0], N));
  }
  case Op::Sqrt: return multi_power(arg(0), 0.5);
  case Op::Abs:
  case Op::Relu: {
    MultiSeries a = arg(0);
    if (a[0] > 0.0) return a;
    if (a[0] < 0.0) return n.op == Op::Abs ? -a : a.constant_like(0.0);
    if (a.is_zero()) return a;
    throw KinkError(std::string(n.op == Op::Abs ? "abs" : "relu") + " kink at the base point");
  }
  case Op::AtZero: {
    bool at_origin = true, identically = true;
    for (std::size_t i = 2; i < n.args.size() && at_origin; ++i) {
      MultiSeries g = arg(i);
      at_origin = g[0] == 0.0;
      identically = identically && g.is_zero();
    }
    if (!at_origin) return arg(0);
    if (identically) return MultiSeries(t, multi_eval(*n.args[1], vars, t)[0]);
    throw KinkError("value override point inside the jet neighbourhood");
  }
  }
  throw DomainError("unknown operator");
}

} // namespace detail

/// Truncated Taylor expansion of e with its variables given as multivariate series.
inline MultiSeries multi_taylor(const Expression& e, const std::map<std::string, MultiSeries>& inputs,
                                const std::shared_ptr<const MonomialTable>& table) {
  return detail::multi_eval(e.node(), inputs, table);
}

/// Expansion of e about `point` in the listed variables, up to total degree N.
inline MultiSeries multi_taylor_at(const Expression& e, const std::vector<std::string>& names,
                                   const std::vector<double>& point, int N) {
  evaluate(e, Env(names, point));
  auto t = MonomialTable::get(static_cast<int>(names.size()), N);
  std::map<std::string, MultiSeries> in;
  for (std::size_t i = 0; i < names.size(); ++i)
    in.emplace(names[i], MultiSeries::variable(t, static_cast<int>(i), point[i]));
  return multi_taylor(e, in, t);
}

/// alpha! * coefficient, i.e. the partial derivative D^alpha at the expansion point.
inline double partial_derivative(const MultiSeries& s, const MultiIndex& alpha) {
  double f = 1.0;
  for (int a : alpha)
    for (int j = 2; j <= a; ++j) f *= j;
  return f * s.coefficient(alpha);
}

} // namespace difflab

#pragma once

#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/expr/expression.hpp"
#include "difflab/expr/parser.hpp"
#include "difflab/jet/smoothness.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace difflab {

/// One membership condition `lhs = 0`, `lhs >= 0` or `lhs <= 0` in ambient coordinates.
struct Constraint {
  enum class Kind { Eq, Ge, Le };
  Expression lhs;
  Kind kind = Kind::Eq;
  std::string text;

  bool holds(const Env& env, double eps) const {
    double v = evaluate(lhs, env);
    switch (kind) {
    case Kind::Eq: return std::fabs(v) <= eps;
    case Kind::Ge: return v >= -eps;
    case Kind::Le: return v <= eps;
    }
    return false;
  }
};

/// Parses "a = b", "a >= b" or "a <= b" into a constraint on a - b.
inline Constraint parse_constraint(const std::string& text) {
  Constraint c;
  c.text = text;
  auto split = [&](const std::string& op, Constraint::Kind kind) {
    auto pos = text.find(op);
    if (pos == std::string::npos) return false;
    c.lhs = parse_expression(text.substr(0, pos)) - parse_expression(text.substr(pos + op.size()));
    c.kind = kind;
    return true;
  };
  if (split(">=", Constraint::Kind::Ge) || split("<=", Constraint::Kind::Le) || split("=", Constraint::Kind::Eq)) return c;
  throw SchemaError("constraint '" + text + "' needs one of =, >=, <=");
}

/// Embedded subset of R^m cut out by constraints.
struct ModelSpace {
  std::string name;
  std::vector<std::string> coords;  // ambient coordinate names
  std::vector<Constraint> constraints;
  Box ambient;                      // box on which functions on X are sampled
  double eps_pt = 1e-9;

  std::size_t dim() const { return coords.size(); }
  bool is_vector_space() const { return constraints.empty(); }
  bool contains(const std::vector<double>& x) const {
    Env env(coords, x);
    for (const auto& c : constraints)
      if (!c.holds(env, eps_pt)) return false;
    return true;
  }
};

/// n-plaque, optionally a family of plaques indexed by closed parameter ranges.
struct Plaque {
  std::string label;
  Box domain;                        // parameter names and open box
  std::vector<Expression> map;       // one expression per ambient coordinate
  std::vector<std::string> family;   // family parameter names
  std::vector<double> family_lo, family_hi;

  std::size_t dim() const { return domain.dims(); }
  bool is_family() const { return !family.empty(); }

  std::vector<double> eval(const std::vector<double>& u, const std::vector<double>& a = {}) const {
    Env env(domain.names, u);
    for (std::size_t i = 0; i < family.size(); ++i) env.set(family[i], a.at(i));
    std::vector<double> x;
    x.reserve(map.size());
    for (const auto& m : map) x.push_back(evaluate(m, env));
    return x;
  }

  /// Member of the family at parameter values a.
  Plaque instance(const std::vector<double>& a) const {
    Plaque p;
    p.domain = domain;
    std::map<std::string, Expression> sub;
    std::string suffix;
    for (std::size_t i = 0; i < family.size(); ++i) {
      sub[family[i]] = Expression(a.at(i));
      suffix += (i ? "," : "") + detail::format_number(a[i]);
    }
    for (const auto& m : map) p.map.push_back(substitute(m, sub));
    p.label = label + (family.empty() ? "" : "[" + suffix + "]");
    return p;
  }

  /// Family members on an inclusive grid with `per_param` values per parameter.
  std::vector<Plaque> instances(int per_param) const {
    if (family.empty()) return {*this};
    std::vector<Plaque> out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < family.size(); ++i) total *= static_cast<std::size_t>(per_param);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> a(family.size());
      std::size_t r = idx;
      for (std::size_t i = 0; i < family.size(); ++i) {
        int gi = static_cast<int>(r % per_param);
        r /= per_param;
        a[i] = per_param == 1 ? 0.5 * (family_lo[i] + family_hi[i])
                              : family_lo[i] + gi * (family_hi[i] - family_lo[i]) / (per_param - 1);
      }
      out.push_back(instance(a));
    }
    return out;
  }
};

/// f o p as an expression in the plaque parameters.
inline Expression compose(const Expression& f, const std::vector<std::string>& coords, const Plaque& p) {
  std::map<std::string, Expression> sub;
  for (std::size_t i = 0; i < coords.size(); ++i) sub[coords[i]] = p.map.at(i);
  return substitute(f, sub);
}

/// Labeled real functions on the ambient coordinates.
struct LabeledFunction {
  std::string label;
  Expression expr;
};
using FunctionFamily = std::vector<LabeledFunction>;

inline FunctionFamily coordinate_functions(const std::vector<std::string>& coords) {
  FunctionFamily f;
  for (const auto& c : coords) f.push_back({c, var(c)});
  return f;
}

/// Bounded search space for reparametrizations phi in PM.
struct ReparamLibrary {
  int degree = 3;
  double bound = 10.0;
};

/// Diffeology generated by a finite family of plaques.
struct GeneratedDiffeology {
  std::string name;
  ModelSpace space;
  std::vector<Plaque> generators;
  FunctionFamily witnesses;   // declared candidates for Phi(P0); validated before use
  int k = 1;                  // smoothness class of PM^k
  ReparamLibrary library;
  int family_samples = 9;     // members drawn per family parameter

  /// Generators with families expanded to sampled members.
  std::vector<Plaque> sampled_generators() const {
    std::vector<Plaque> out;
    for (const auto& g : generators)
      for (auto& p : g.instances(family_samples)) out.push_back(std::move(p));
    return out;
  }
};

/// Checks that every sampled generator stays in the model space; returns the first offender.
inline std::string first_generator_outside(const GeneratedDiffeology& D, int grid = 5) {
  for (const auto& g : D.sampled_generators())
    for (const auto& u : probe_points(g.domain, grid))
      if (!D.space.contains(g.eval(u))) return g.label;
  return {};
}

} // namespace difflab

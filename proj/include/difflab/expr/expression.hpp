#pragma once

#include "difflab/core/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace difflab {

/// Closed operator vocabulary of the expression language.
enum class Op {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Pow,
  Sin,
  Cos,
  Exp,
  Log,
  Sqrt,
  Abs,
  Relu,
  AtZero, // args: inner, value, guard_1 .. guard_n
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  double value = 0.0;
  std::string name;
  std::vector<NodePtr> args;
};

/// Immutable expression tree over named real variables. Copies share structure.
class Expression {
public:
  Expression() : Expression(0.0) {}
  Expression(double c) // NOLINT: implicit so constants mix freely with expressions
      : node_(std::make_shared<Node>(Node{Op::Const, c, {}, {}})) {}
  explicit Expression(NodePtr n) : node_(std::move(n)) {}

  static Expression variable(std::string name) {
    return Expression(std::make_shared<Node>(Node{Op::Var, 0.0, std::move(name), {}}));
  }
  static Expression make(Op op, std::vector<Expression> args, double value = 0.0) {
    std::vector<NodePtr> nodes;
    nodes.reserve(args.size());
    for (auto& a : args) nodes.push_back(a.node_);
    return Expression(std::make_shared<Node>(Node{op, value, {}, std::move(nodes)}));
  }

  const Node& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }
  Op op() const { return node_->op; }
  Expression arg(std::size_t i) const { return Expression(node_->args.at(i)); }
  std::size_t arity() const { return node_->args.size(); }

  bool is_constant() const { return node_->op == Op::Const; }
  double constant_value() const { return node_->value; }

private:
  NodePtr node_;
};

inline Expression var(std::string name) { return Expression::variable(std::move(name)); }

inline Expression operator+(const Expression& a, const Expression& b) { return Expression::make(Op::Add, {a, b}); }
inline Expression operator-(const Expression& a, const Expression& b) { return Expression::make(Op::Sub, {a, b}); }
inline Expression operator*(const Expression& a, const Expression& b) { return Expression::make(Op::Mul, {a, b}); }
inline Expression operator/(const Expression& a, const Expression& b) { return Expression::make(Op::Div, {a, b}); }
inline Expression operator-(const Expression& a) { return Expression::make(Op::Neg, {a}); }

inline Expression pow(const Expression& base, const Expression& exponent) {
  return Expression::make(Op::Pow, {base, exponent});
}
inline Expression pow(const Expression& base, int n) { return pow(base, Expression(static_cast<double>(n))); }
inline Expression sin(const Expression& a) { return Expression::make(Op::Sin, {a}); }
inline Expression cos(const Expression& a) { return Expression::make(Op::Cos, {a}); }
inline Expression exp(const Expression& a) { return Expression::make(Op::Exp, {a}); }
inline Expression log(const Expression& a) { return Expression::make(Op::Log, {a}); }
inline Expression sqrt(const Expression& a) { return Expression::make(Op::Sqrt, {a}); }
inline Expression abs(const Expression& a) { return Expression::make(Op::Abs, {a}); }
inline Expression relu(const Expression& a) { return Expression::make(Op::Relu, {a}); }

namespace detail {
inline void collect_variables(const Node& n, std::set<std::string>& out) {
  if (n.op == Op::Var) out.insert(n.name);
  for (const auto& a : n.args) collect_variables(*a, out);
}
} // namespace detail

/// Sorted names of the free variables.
inline std::vector<std::string> variables(const Expression& e) {
  std::set<std::string> s;
  detail::collect_variables(e.node(), s);
  return {s.begin(), s.end()};
}

/// Value override at the origin of the variables of `inner`: the result equals `value`
/// where every guard variable is exactly zero and `inner` elsewhere.
inline Expression atzero(const Expression& inner, double value) {
  std::vector<Expression> args{inner, Expression(value)};
  for (const auto& v : variables(inner)) args.push_back(var(v));
  return Expression::make(Op::AtZero, std::move(args));
}

/// Variable bindings for point evaluation.
class Env {
public:
  Env() = default;
  Env(std::initializer_list<std::pair<std::string, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
  }
  Env(const std::vector<std::string>& names, const std::vector<double>& values) {
    for (std::size_t i = 0; i < names.size(); ++i) set(names[i], values.at(i));
  }
  void set(const std::string& name, double v) {
    for (auto& [k, val] : entries_)
      if (k == name) {
        val = v;
        return;
      }
    entries_.emplace_back(name, v);
  }
  double get(const std::string& name) const {
    for (const auto& [k, v] : entries_)
      if (k == name) return v;
    throw DomainError("unbound variable '" + name + "'");
  }

private:
  std::vector<std::pair<std::string, double>> entries_;
};

namespace detail {

inline bool is_integer(double v) { return std::isfinite(v) && v == std::nearbyint(v); }

inline double eval_node(const Node& n, const Env& env) {
  switch (n.op) {
  case Op::Const: return n.value;
  case Op::Var: return env.get(n.name);
  case Op::Add: return eval_node(*n.args[0], env) + eval_node(*n.args[1], env);
  case Op::Sub: return eval_node(*n.args[0], env) - eval_node(*n.args[1], env);
  case Op::Mul: return eval_node(*n.args[0], env) * eval_node(*n.args[1], env);
  case Op::Div: {
    double d = eval_node(*n.args[1], env);
    if (d == 0.0) throw DomainError("division by zero");
    return eval_node(*n.args[0], env) / d;
  }
  case Op::Neg: return -eval_node(*n.args[0], env);
  case Op::Pow: {
    double b = eval_node(*n.args[0], env);
    double p = eval_node(*n.args[1], env);
    if (is_integer(p)) {
      if (b == 0.0 && p < 0) throw DomainError("zero to a negative power");
      return std::pow(b, p);
    }
    if (b > 0.0) return std::pow(b, p);
    if (b == 0.0 && p > 0.0) return 0.0;
    throw DomainError("non-integer power of a non-positive base");
  }
  case Op::Sin: return std::sin(eval_node(*n.args[0], env));
  case Op::Cos: return std::cos(eval_node(*n.args[0], env));
  case Op::Exp: return std::exp(eval_node(*n.args[0], env));
  case Op::Log: {
    double a = eval_node(*n.args[0], env);
    if (!(a > 0.0)) throw DomainError("log of a non-positive value");
    return std::log(a);
  }
  case Op::Sqrt: {
    double a = eval_node(*n.args[0], env);
    if (a < 0.0) throw DomainError("sqrt of a negative value");
    return std::sqrt(a);
  }
  case Op::Abs: return std::fabs(eval_node(*n.args[0], env));
  case Op::Relu: return std::max(0.0, eval_node(*n.args[0], env));
  case Op::AtZero: {
    bool origin = true;
    for (std::size_t i = 2; i < n.args.size() && origin; ++i) origin = eval_node(*n.args[i], env) == 0.0;
    if (origin) return eval_node(*n.args[1], env);
    return eval_node(*n.args[0], env);
  }
  }
  throw DomainError("unknown operator");
}

} // namespace detail

/// Point evaluation. Guard violations and non-finite results raise DomainError.
inline double evaluate(const Expression& e, const Env& env) {
  double v = detail::eval_node(e.node(), env);
  if (!std::isfinite(v)) throw DomainError("non-finite value");
  return v;
}

/// Replaces variables by expressions; unmapped variables are kept.
inline Expression substitute(const Expression& e, const std::map<std::string, Expression>& sub) {
  const Node& n = e.node();
  if (n.op == Op::Var) {
    auto it = sub.find(n.name);
    return it == sub.end() ? e : it->second;
  }
  if (n.args.empty()) return e;
  std::vector<Expression> args;
  args.reserve(n.args.size());
  for (const auto& a : n.args) args.push_back(substitute(Expression(a), sub));
  return Expression::make(n.op, std::move(args), n.value);
}

/// True when the tree contains abs, relu or atzero.
inline bool has_kink_primitives(const Expression& e) {
  const Node& n = e.node();
  if (n.op == Op::Abs || n.op == Op::Relu || n.op == Op::AtZero) return true;
  return std::any_of(n.args.begin(), n.args.end(),
                     [](const NodePtr& a) { return has_kink_primitives(Expression(a)); });
}

namespace detail {

inline bool analytic_node(const Node& n, const Env& env);

} // namespace detail

/// True when e is real-analytic on a neighbourhood of the point: no piecewise
/// primitive, and every division, log, sqrt and power is evaluated away from its
/// singular set. A sufficient condition only.
inline bool analytic_at(const Expression& e, const Env& env) {
  try {
    return detail::analytic_node(e.node(), env);
  } catch (const DomainError&) {
    return false;
  }
}

namespace detail {

inline bool analytic_node(const Node& n, const Env& env) {
  for (const auto& a : n.args)
    if (n.op != Op::AtZero && !analytic_node(*a, env)) return false;
  switch (n.op) {
  case Op::Abs:
  case Op::Relu:
  case Op::AtZero: return false;
  case Op::Div: return eval_node(*n.args[1], env) != 0.0;
  case Op::Log:
  case Op::Sqrt: return eval_node(*n.args[0], env) > 0.0;
  case Op::Pow: {
    const Expression exponent(n.args[1]);
    const double b = eval_node(*n.args[0], env);
    if (variables(exponent).empty() && is_integer(eval_node(*n.args[1], env)))
      return eval_node(*n.args[1], env) >= 0.0 || b != 0.0;
    return b > 0.0;
  }
  default: return std::isfinite(eval_node(n, env));
  }
}

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline int precedence(Op op) {
  switch (op) {
  case Op::Add:
  case Op::Sub: return 1;
  case Op::Mul:
  case Op::Div: return 2;
  case Op::Neg: return 3;
  case Op::Pow: return 4;
  default: return 5;
  }
}

inline const char* function_name(Op op) {
  switch (op) {
  case Op::Sin: return "sin";
  case Op::Cos: return "cos";
  case Op::Exp: return "exp";
  case Op::Log: return "log";
  case Op::Sqrt: return "sqrt";
  case Op::Abs: return "abs";
  case Op::Relu: return "relu";
  default: return nullptr;
  }
}

inline std::string print(const Node& n) {
  auto wrap = [](const Node& child, int min_prec) {
    std::string s = print(child);
    bool negative_literal = child.op == Op::Const && child.value < 0;
    if (precedence(child.op) < min_prec || (negative_literal && min_prec > 1)) return "(" + s + ")";
    return s;
  };
  switch (n.op) {
  case Op::Const: return format_number(n.value);
  case Op::Var: return n.name;
  case Op::Add: return wrap(*n.args[0], 1) + " + " + wrap(*n.args[1], 2);
  case Op::Sub: return wrap(*n.args[0], 1) + " - " + wrap(*n.args[1], 2);
  case Op::Mul: return wrap(*n.args[0], 2) + "*" + wrap(*n.args[1], 3);
  case Op::Div: return wrap(*n.args[0], 2) + "/" + wrap(*n.args[1], 3);
  case Op::Neg: return "-" + wrap(*n.args[0], 4);
  case Op::Pow: return wrap(*n.args[0], 5) + "^" + wrap(*n.args[1], 5);
  case Op::AtZero: {
    std::string s = "atzero(" + print(*n.args[0]) + ", " + print(*n.args[1]);
    std::set<std::string> names;
    collect_variables(*n.args[0], names);
    bool default_guards = names.size() + 2 == n.args.size();
    auto it = names.begin();
    for (std::size_t i = 2; i < n.args.size() && default_guards; ++i, ++it)
      default_guards = n.args[i]->op == Op::Var && n.args[i]->name == *it;
    if (!default_guards)
      for (std::size_t i = 2; i < n.args.size(); ++i) s += ", " + print(*n.args[i]);
    return s + ")";
  }
  default: return std::string(function_name(n.op)) + "(" + print(*n.args[0]) + ")";
  }
}

} // namespace detail

/// Infix rendering that the parser reads back to an equivalent tree.
inline std::string to_string(const Expression& e) { return detail::print(e.node()); }

} // namespace difflab

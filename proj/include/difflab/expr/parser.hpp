#pragma once

// Recursive-descent parser for the expression grammar in docs/grammar.md.

#include "difflab/core/errors.hpp"
#include "difflab/expr/expression.hpp"

#include <cctype>
#include <charconv>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace difflab {

namespace detail {

class Parser {
public:
  explicit Parser(std::string_view text) : src_(text) {}

  Expression parse() {
    Expression e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expression expr() {
    Expression lhs = term();
    for (;;) {
      if (accept('+')) lhs = lhs + term();
      else if (accept('-')) lhs = lhs - term();
      else return lhs;
    }
  }

  Expression term() {
    Expression lhs = unary();
    for (;;) {
      if (accept('*')) lhs = lhs * unary();
      else if (accept('/')) lhs = lhs / unary();
      else return lhs;
    }
  }

  Expression unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  // '^' is right associative and binds tighter than unary minus on its left:
  // -x^2 == -(x^2), 2^-n == 2^(-n).
  Expression power() {
    Expression base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  Expression primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      Expression e = expr();
      expect(')');
      return e;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expression number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc{} || res.ptr != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expression(v);
  }

  std::vector<Expression> arguments() {
    std::vector<Expression> args;
    expect('(');
    if (accept(')')) return args;
    do {
      args.push_back(expr());
    } while (accept(','));
    expect(')');
    return args;
  }

  Expression identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    skip_ws();
    bool call = pos_ < src_.size() && src_[pos_] == '(';
    if (!call) {
      if (name == "pi") return Expression(std::numbers::pi);
      return var(name);
    }
    std::size_t call_pos = start;
    auto args = arguments();
    auto need = [&](std::size_t n) {
      if (args.size() != n) {
        pos_ = call_pos;
        fail(name + " expects " + std::to_string(n) + " argument(s)");
      }
    };
    if (name == "sin") return need(1), sin(args[0]);
    if (name == "cos") return need(1), cos(args[0]);
    if (name == "exp") return need(1), exp(args[0]);
    if (name == "log") return need(1), log(args[0]);
    if (name == "sqrt") return need(1), sqrt(args[0]);
    if (name == "abs") return need(1), abs(args[0]);
    if (name == "relu") return need(1), relu(args[0]);
    if (name == "pow") return need(2), pow(args[0], args[1]);
    if (name == "atzero") {
      if (args.size() < 2) {
        pos_ = call_pos;
        fail("atzero expects (expression, value[, guard...])");
      }
      if (!variables(args[1]).empty()) {
        pos_ = call_pos;
        fail("atzero value must be a constant");
      }
      double value = evaluate(args[1], Env{});
      if (args.size() == 2) return atzero(args[0], value);
      std::vector<Expression> full{args[0], Expression(value)};
      full.insert(full.end(), args.begin() + 2, args.end());
      return Expression::make(Op::AtZero, std::move(full));
    }
    pos_ = call_pos;
    fail("unknown function '" + name + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Parses infix text such as `atzero(x*y^2/(x^2+y^2), 0)`.
inline Expression parse_expression(std::string_view text) { return detail::Parser(text).parse(); }

/// Splits a comma-separated list at top-level commas ("t, t^2" -> {"t", "t^2"}).
inline std::vector<Expression> parse_expression_list(std::string_view text) {
  std::vector<Expression> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      out.push_back(parse_expression(text.substr(start, i - start)));
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  return out;
}

} // namespace difflab

#pragma once

// Curve expressions: three comma-separated components in one variable (t or
// s) built from numbers, pi, + - * / ^, sin, cos and sqrt. Derivatives up to
// order 3 come from symbolic differentiation of the expression tree.

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "frenetlab/curve.hpp"
#include "frenetlab/errors.hpp"

namespace frenetlab {

namespace expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Op { constant, variable, add, sub, mul, div, neg, pow, sin, cos, sqrt, log };

struct Node {
  Op op;
  double value = 0.0;
  NodePtr a;
  NodePtr b;
};

inline NodePtr constant(double v) { return std::make_shared<const Node>(Node{Op::constant, v, {}, {}}); }
inline NodePtr variable() { return std::make_shared<const Node>(Node{Op::variable, 0.0, {}, {}}); }

inline bool is_const(const NodePtr& n, double v) {
  return n->op == Op::constant && n->value == v;
}

inline NodePtr make(Op op, NodePtr a, NodePtr b = {}) {
  // Constant folding and the identities that keep derivative trees small.
  const bool ca = a && a->op == Op::constant;
  const bool cb = b && b->op == Op::constant;
  switch (op) {
    case Op::add:
      if (ca && cb) return constant(a->value + b->value);
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::sub:
      if (ca && cb) return constant(a->value - b->value);
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make(Op::neg, b);
      break;
    case Op::mul:
      if (ca && cb) return constant(a->value * b->value);
      if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::div:
      if (ca && cb) return constant(a->value / b->value);
      if (is_const(a, 0.0)) return constant(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::neg:
      if (ca) return constant(-a->value);
      if (a->op == Op::neg) return a->a;
      break;
    case Op::pow:
      if (ca && cb) return constant(std::pow(a->value, b->value));
      if (is_const(b, 1.0)) return a;
      if (is_const(b, 0.0)) return constant(1.0);
      break;
    case Op::sin:
      if (ca) return constant(std::sin(a->value));
      break;
    case Op::cos:
      if (ca) return constant(std::cos(a->value));
      break;
    case Op::sqrt:
      if (ca) return constant(std::sqrt(a->value));
      break;
    case Op::log:
      if (ca) return constant(std::log(a->value));
      break;
    default:
      break;
  }
  return std::make_shared<const Node>(Node{op, 0.0, std::move(a), std::move(b)});
}

inline double evaluate(const Node& n, double t) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return t;
    case Op::add: return evaluate(*n.a, t) + evaluate(*n.b, t);
    case Op::sub: return evaluate(*n.a, t) - evaluate(*n.b, t);
    case Op::mul: return evaluate(*n.a, t) * evaluate(*n.b, t);
    case Op::div: return evaluate(*n.a, t) / evaluate(*n.b, t);
    case Op::neg: return -evaluate(*n.a, t);
    case Op::pow: return std::pow(evaluate(*n.a, t), evaluate(*n.b, t));
    case Op::sin: return std::sin(evaluate(*n.a, t));
    case Op::cos: return std::cos(evaluate(*n.a, t));
    case Op::sqrt: return std::sqrt(evaluate(*n.a, t));
    case Op::log: return std::log(evaluate(*n.a, t));
  }
  return std::nan("");
}

inline NodePtr derivative(const NodePtr& n) {
  switch (n->op) {
    case Op::constant: return constant(0.0);
    case Op::variable: return constant(1.0);
    case Op::add: return make(Op::add, derivative(n->a), derivative(n->b));
    case Op::sub: return make(Op::sub, derivative(n->a), derivative(n->b));
    case Op::mul:
      return make(Op::add, make(Op::mul, derivative(n->a), n->b),
                  make(Op::mul, n->a, derivative(n->b)));
    case Op::div:
      return make(Op::div,
                  make(Op::sub, make(Op::mul, derivative(n->a), n->b),
                       make(Op::mul, n->a, derivative(n->b))),
                  make(Op::mul, n->b, n->b));
    case Op::neg: return make(Op::neg, derivative(n->a));
    case Op::pow: {
      if (n->b->op == Op::constant) {
        const double c = n->b->value;
        return make(Op::mul, make(Op::mul, constant(c), make(Op::pow, n->a, constant(c - 1.0))),
                    derivative(n->a));
      }
      // d(u^v) = u^v (v' log u + v u'/u)
      return make(Op::mul, n,
                  make(Op::add, make(Op::mul, derivative(n->b), make(Op::log, n->a)),
                       make(Op::div, make(Op::mul, n->b, derivative(n->a)), n->a)));
    }
    case Op::sin: return make(Op::mul, make(Op::cos, n->a), derivative(n->a));
    case Op::cos: return make(Op::neg, make(Op::mul, make(Op::sin, n->a), derivative(n->a)));
    case Op::sqrt:
      return make(Op::div, derivative(n->a), make(Op::mul, constant(2.0), n));
    case Op::log: return make(Op::div, derivative(n->a), n->a);
  }
  return constant(0.0);
}

class Parser {
 public:
  explicit Parser(std::string text) : text_(std::move(text)) {}

  std::vector<NodePtr> components() {
    std::vector<NodePtr> out;
    out.push_back(parse_expr());
    while (peek() == ',') {
      ++pos_;
      out.push_back(parse_expr());
    }
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      lhs = make(c == '+' ? Op::add : Op::sub, lhs, parse_term());
    }
    return lhs;
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      lhs = make(c == '*' ? Op::mul : Op::div, lhs, parse_unary());
    }
    return lhs;
  }

  NodePtr parse_unary() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return make(Op::neg, parse_unary());
    }
    if (c == '+') {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (peek() == '^') {
      ++pos_;
      return make(Op::pow, base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    const char c = peek();
    if (c == '\0') fail("unexpected end of expression");
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return constant(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "t" || name == "s") {
      if (!variable_.empty() && variable_ != name) {
        pos_ = start;
        fail("expression mixes variables '" + variable_ + "' and '" + name + "'");
      }
      variable_ = name;
      return variable();
    }
    if (name == "pi") return constant(std::numbers::pi);
    Op op;
    if (name == "sin") {
      op = Op::sin;
    } else if (name == "cos") {
      op = Op::cos;
    } else if (name == "sqrt") {
      op = Op::sqrt;
    } else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (peek() != '(') fail("expected '(' after " + name);
    ++pos_;
    NodePtr arg = parse_expr();
    expect(')');
    return make(op, arg);
  }

  std::string text_;
  std::size_t pos_ = 0;
  std::string variable_;
};

}  // namespace expr

/// Parses "x(t), y(t), z(t)" into a curve on `domain` with symbolic
/// derivatives. Throws ParseError with the character offset of the problem.
inline Curve3 parse_curve_expression(const std::string& text, Interval domain = {0.0, 1.0}) {
  expr::Parser parser(text);
  const auto parts = parser.components();
  if (parts.size() != 3) {
    throw ParseError("expected 3 comma-separated components, got " +
                         std::to_string(parts.size()),
                     0);
  }
  std::array<std::array<expr::NodePtr, 3>, 4> trees;
  for (std::size_t c = 0; c < 3; ++c) {
    trees[0][c] = parts[c];
    for (std::size_t k = 1; k < 4; ++k) trees[k][c] = expr::derivative(trees[k - 1][c]);
  }
  auto order = [trees](std::size_t k) {
    return [trees, k](double t) {
      return Vec3(expr::evaluate(*trees[k][0], t), expr::evaluate(*trees[k][1], t),
                  expr::evaluate(*trees[k][2], t));
    };
  };
  return Curve3(order(0), domain, {order(1), order(2), order(3)});
}

}  // namespace frenetlab

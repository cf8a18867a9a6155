#pragma once

// Closed-form inhomogeneity expressions a(x).
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'x' | 'pi' | func '(' expr (',' expr)? ')' | '(' expr ')'
//   func    := exp | sech | tanh | pow
//
// Evaluation carries a forward-mode derivative so a'(x) is exact.

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nlsim {

class ExpressionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Dual {
  double v;
  double d;
};

namespace expr_detail {

enum class Op { Const, X, Neg, Add, Sub, Mul, Div, Pow, Exp, Sech, Tanh };

struct Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

inline NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
  return std::make_shared<const Node>(Node{op, v, std::move(l), std::move(r)});
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ExpressionError("expression '" + std::string(src_) + "' at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, term());
      else if (accept('-')) n = make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const char* first = src_.data() + pos_;
      const char* last = src_.data() + src_.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{}) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - first);
      return make(Op::Const, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string_view id = src_.substr(start, pos_ - start);
      if (id == "x") return make(Op::X);
      if (id == "pi") return make(Op::Const, nullptr, nullptr, std::numbers::pi);
      Op op;
      if (id == "exp") op = Op::Exp;
      else if (id == "sech") op = Op::Sech;
      else if (id == "tanh") op = Op::Tanh;
      else if (id == "pow") op = Op::Pow;
      else {
        pos_ = start;
        fail("unknown identifier '" + std::string(id) + "'");
      }
      expect('(');
      auto a = expr();
      NodePtr b;
      if (op == Op::Pow) {
        expect(',');
        b = expr();
      }
      expect(')');
      return make(op, a, b);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline Dual eval(const Node& n, double x) {
  switch (n.op) {
    case Op::Const: return {n.value, 0.0};
    case Op::X: return {x, 1.0};
    case Op::Neg: {
      const auto a = eval(*n.lhs, x);
      return {-a.v, -a.d};
    }
    case Op::Add: {
      const auto a = eval(*n.lhs, x), b = eval(*n.rhs, x);
      return {a.v + b.v, a.d + b.d};
    }
    case Op::Sub: {
      const auto a = eval(*n.lhs, x), b = eval(*n.rhs, x);
      return {a.v - b.v, a.d - b.d};
    }
    case Op::Mul: {
      const auto a = eval(*n.lhs, x), b = eval(*n.rhs, x);
      return {a.v * b.v, a.d * b.v + a.v * b.d};
    }
    case Op::Div: {
      const auto a = eval(*n.lhs, x), b = eval(*n.rhs, x);
      return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
    case Op::Pow: {
      const auto a = eval(*n.lhs, x), b = eval(*n.rhs, x);
      const double v = std::pow(a.v, b.v);
      double d = 0.0;
      if (a.d != 0.0) d += (a.v == 0.0 ? (b.v == 1.0 ? 1.0 : 0.0) : b.v * std::pow(a.v, b.v - 1.0)) * a.d;
      if (b.d != 0.0 && a.v > 0.0) d += v * std::log(a.v) * b.d;
      return {v, d};
    }
    case Op::Exp: {
      const auto a = eval(*n.lhs, x);
      const double v = std::exp(a.v);
      return {v, v * a.d};
    }
    case Op::Sech: {
      const auto a = eval(*n.lhs, x);
      const double s = 1.0 / std::cosh(a.v);
      return {s, -s * std::tanh(a.v) * a.d};
    }
    case Op::Tanh: {
      const auto a = eval(*n.lhs, x);
      const double t = std::tanh(a.v);
      return {t, (1.0 - t * t) * a.d};
    }
  }
  return {0.0, 0.0};
}

}  // namespace expr_detail

/// Parsed expression in x; copyable, immutable, thread-safe to evaluate.
class Expression {
 public:
  explicit Expression(std::string source)
      : source_(std::move(source)), root_(expr_detail::Parser(source_).parse()) {}

  const std::string& source() const noexcept { return source_; }
  double operator()(double x) const { return expr_detail::eval(*root_, x).v; }
  /// Value and exact derivative at x.
  Dual eval(double x) const { return expr_detail::eval(*root_, x); }

 private:
  std::string source_;
  expr_detail::NodePtr root_;
};

}  // namespace nlsim

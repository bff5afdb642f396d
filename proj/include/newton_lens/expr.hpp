#pragma once

// Immutable expression trees for real functions of one variable.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>

namespace newton_lens {

enum class UnaryOp { neg, abs, sqrt, cbrt, exp, ln, sin, cos, tan };
enum class BinaryOp { add, sub, mul, div, pow };

inline constexpr std::string_view name_of(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "neg";
    case UnaryOp::abs: return "abs";
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::cbrt: return "cbrt";
    case UnaryOp::exp: return "exp";
    case UnaryOp::ln: return "ln";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::tan: return "tan";
  }
  return "?";
}

inline constexpr std::string_view name_of(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "add";
    case BinaryOp::sub: return "sub";
    case BinaryOp::mul: return "mul";
    case BinaryOp::div: return "div";
    case BinaryOp::pow: return "pow";
  }
  return "?";
}

/// A rational p/q in lowest terms with q > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
};

namespace detail {

inline std::optional<Rational> make_rational(double num, double den) {
  constexpr double limit = 9.0e15;
  if (den == 0.0 || std::abs(num) > limit || std::abs(den) > limit) return std::nullopt;
  if (num != std::trunc(num) || den != std::trunc(den)) return std::nullopt;
  auto p = static_cast<std::int64_t>(num);
  auto q = static_cast<std::int64_t>(den);
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  return Rational{p, q};
}

}  // namespace detail

class Expression;

struct ConstantNode {
  double value;
};
struct VariableNode {};
struct UnaryNode;
struct BinaryNode;

/// Handle to an immutable, shared expression tree. Copies share nodes.
class Expression {
 public:
  struct Node;

  /// Non-negative constants map to a Constant node; negative values are
  /// stored as neg(Constant |v|) so every tree has a textual form.
  static Expression constant(double value);
  static Expression variable();
  static Expression unary(UnaryOp op, Expression child);
  static Expression binary(BinaryOp op, Expression left, Expression right);

  [[nodiscard]] const Node& node() const { return *node_; }

  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] bool is_variable() const;
  [[nodiscard]] std::optional<double> constant_value() const;
  [[nodiscard]] bool has_variable() const;
  /// Literal integer / integer form (with optional negation), recognized
  /// syntactically; e.g. 1/3, -2/3, 4.
  [[nodiscard]] std::optional<Rational> literal_rational() const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct UnaryNode {
  UnaryOp op;
  Expression child;
};

struct BinaryNode {
  BinaryOp op;
  Expression left;
  Expression right;
};

struct Expression::Node {
  std::variant<ConstantNode, VariableNode, UnaryNode, BinaryNode> kind;
  bool has_variable = false;
  std::optional<Rational> rational;  // set when this subtree is a literal rational
  std::size_t depth = 1;
};

inline Expression Expression::constant(double value) {
  if (value < 0.0) return unary(UnaryOp::neg, constant(-value));
  auto n = std::make_shared<Node>();
  n->kind = ConstantNode{value == 0.0 ? 0.0 : value};
  n->rational = detail::make_rational(value, 1.0);
  return Expression(std::move(n));
}

inline Expression Expression::variable() {
  auto n = std::make_shared<Node>();
  n->kind = VariableNode{};
  n->has_variable = true;
  return Expression(std::move(n));
}

inline Expression Expression::unary(UnaryOp op, Expression child) {
  auto n = std::make_shared<Node>();
  n->has_variable = child.has_variable();
  n->depth = child.node().depth + 1;
  if (op == UnaryOp::neg) {
    if (auto r = child.literal_rational()) n->rational = Rational{-r->num, r->den};
  }
  n->kind = UnaryNode{op, std::move(child)};
  return Expression(std::move(n));
}

inline Expression Expression::binary(BinaryOp op, Expression left, Expression right) {
  auto n = std::make_shared<Node>();
  n->has_variable = left.has_variable() || right.has_variable();
  n->depth = std::max(left.node().depth, right.node().depth) + 1;
  if (op == BinaryOp::div) {
    auto a = left.literal_rational();
    auto b = right.literal_rational();
    // Only integer / integer counts as a literal fraction.
    if (a && b && a->den == 1 && b->den == 1 && b->num != 0) {
      n->rational = detail::make_rational(static_cast<double>(a->num), static_cast<double>(b->num));
    }
  }
  n->kind = BinaryNode{op, std::move(left), std::move(right)};
  return Expression(std::move(n));
}

inline bool Expression::is_constant() const {
  return std::holds_alternative<ConstantNode>(node_->kind);
}

inline bool Expression::is_variable() const {
  return std::holds_alternative<VariableNode>(node_->kind);
}

inline std::optional<double> Expression::constant_value() const {
  if (const auto* c = std::get_if<ConstantNode>(&node_->kind)) return c->value;
  return std::nullopt;
}

inline bool Expression::has_variable() const { return node_->has_variable; }

inline std::optional<Rational> Expression::literal_rational() const { return node_->rational; }

inline bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  const auto& ka = a.node_->kind;
  const auto& kb = b.node_->kind;
  if (ka.index() != kb.index()) return false;
  if (const auto* c = std::get_if<ConstantNode>(&ka)) {
    return c->value == std::get<ConstantNode>(kb).value;
  }
  if (std::holds_alternative<VariableNode>(ka)) return true;
  if (const auto* u = std::get_if<UnaryNode>(&ka)) {
    const auto& v = std::get<UnaryNode>(kb);
    return u->op == v.op && u->child == v.child;
  }
  const auto& x = std::get<BinaryNode>(ka);
  const auto& y = std::get<BinaryNode>(kb);
  return x.op == y.op && x.left == y.left && x.right == y.right;
}

// Small builders used by differentiate/simplify and the tests.
namespace build {

inline Expression num(double v) { return Expression::constant(v); }
inline Expression x() { return Expression::variable(); }
inline Expression neg(Expression a) { return Expression::unary(UnaryOp::neg, std::move(a)); }
inline Expression fn(UnaryOp op, Expression a) { return Expression::unary(op, std::move(a)); }
inline Expression add(Expression a, Expression b) { return Expression::binary(BinaryOp::add, std::move(a), std::move(b)); }
inline Expression sub(Expression a, Expression b) { return Expression::binary(BinaryOp::sub, std::move(a), std::move(b)); }
inline Expression mul(Expression a, Expression b) { return Expression::binary(BinaryOp::mul, std::move(a), std::move(b)); }
inline Expression div(Expression a, Expression b) { return Expression::binary(BinaryOp::div, std::move(a), std::move(b)); }
inline Expression pow(Expression a, Expression b) { return Expression::binary(BinaryOp::pow, std::move(a), std::move(b)); }

/// The literal fraction p/q as a tree the parser would produce for "p/q"
/// (or "-p/q"); integers collapse to a bare constant.
inline Expression fraction(Rational r) {
  const bool negative = r.num < 0;
  const double p = static_cast<double>(negative ? -r.num : r.num);
  Expression e = r.den == 1 ? num(p) : div(num(p), num(static_cast<double>(r.den)));
  return negative ? neg(std::move(e)) : e;
}

}  // namespace build

}  // namespace newton_lens

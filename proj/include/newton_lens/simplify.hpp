#pragma once

#include "newton_lens/evaluate.hpp"
#include "newton_lens/expr.hpp"

namespace newton_lens {

namespace detail {

/// True when the subtree can only fault through overflow, so multiplying it
/// by zero may drop it without hiding a domain fault.
inline bool is_total(const Expression& e) {
  const auto& node = e.node();
  if (std::holds_alternative<ConstantNode>(node.kind) || std::holds_alternative<VariableNode>(node.kind)) {
    return true;
  }
  if (const auto* u = std::get_if<UnaryNode>(&node.kind)) {
    switch (u->op) {
      case UnaryOp::neg:
      case UnaryOp::abs:
      case UnaryOp::cbrt:
      case UnaryOp::sin:
      case UnaryOp::cos:
        return is_total(u->child);
      default:
        return false;
    }
  }
  const auto& b = std::get<BinaryNode>(node.kind);
  switch (b.op) {
    case BinaryOp::add:
    case BinaryOp::sub:
    case BinaryOp::mul:
      return is_total(b.left) && is_total(b.right);
    case BinaryOp::pow: {
      const auto q = b.right.literal_rational();
      return q && q->den == 1 && q->num >= 0 && is_total(b.left);
    }
    case BinaryOp::div:
      return false;
  }
  return false;
}

inline bool is_const(const Expression& e, double v) {
  const auto c = e.constant_value();
  return c && *c == v;
}

}  // namespace detail

/// Constant folding plus the identities a+0, 0+a, a-0, a*1, 1*a, a/1, a^1
/// and 0*a (when a cannot fault). Literal fractions are normalized but never
/// folded to decimals, so signed-root exponents survive.
inline Expression simplify(const Expression& expr) {
  using namespace build;
  const auto& node = expr.node();
  if (std::holds_alternative<ConstantNode>(node.kind) || std::holds_alternative<VariableNode>(node.kind)) {
    return expr;
  }
  if (auto q = expr.literal_rational()) return fraction(*q);
  if (!expr.has_variable()) {
    const EvalResult v = evaluate(expr, 0.0);
    if (v.ok()) return num(v.value());
  }

  if (const auto* u = std::get_if<UnaryNode>(&node.kind)) {
    Expression a = simplify(u->child);
    if (!a.has_variable() && !a.literal_rational()) {
      const EvalResult v = evaluate(fn(u->op, a), 0.0);
      if (v.ok()) return num(v.value());
    }
    return fn(u->op, std::move(a));
  }

  const auto& b = std::get<BinaryNode>(node.kind);
  Expression l = simplify(b.left);
  Expression r = simplify(b.right);
  switch (b.op) {
    case BinaryOp::add:
      if (detail::is_const(r, 0.0)) return l;
      if (detail::is_const(l, 0.0)) return r;
      break;
    case BinaryOp::sub:
      if (detail::is_const(r, 0.0)) return l;
      break;
    case BinaryOp::mul:
      if (detail::is_const(r, 1.0)) return l;
      if (detail::is_const(l, 1.0)) return r;
      if ((detail::is_const(l, 0.0) && detail::is_total(r)) || (detail::is_const(r, 0.0) && detail::is_total(l))) {
        return num(0.0);
      }
      break;
    case BinaryOp::div:
      if (detail::is_const(r, 1.0)) return l;
      break;
    case BinaryOp::pow:
      if (detail::is_const(r, 1.0)) return l;
      break;
  }
  Expression out = Expression::binary(b.op, std::move(l), std::move(r));
  if (auto q = out.literal_rational()) return fraction(*q);
  return out;
}

}  // namespace newton_lens

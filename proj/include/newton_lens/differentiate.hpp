#pragma once

#include "newton_lens/expr.hpp"

namespace newton_lens {

/// Symbolic derivative with respect to x. The result is unsimplified; run it
/// through simplify() before display.
inline Expression differentiate(const Expression& expr) {
  using namespace build;
  if (!expr.has_variable()) return num(0.0);
  const auto& node = expr.node();
  if (std::holds_alternative<VariableNode>(node.kind)) return num(1.0);

  if (const auto* u = std::get_if<UnaryNode>(&node.kind)) {
    const Expression& a = u->child;
    Expression da = differentiate(a);
    switch (u->op) {
      case UnaryOp::neg: return neg(da);
      case UnaryOp::abs: return mul(div(a, fn(UnaryOp::abs, a)), da);
      case UnaryOp::sqrt: return div(da, mul(num(2.0), fn(UnaryOp::sqrt, a)));
      case UnaryOp::cbrt: return div(da, mul(num(3.0), pow(fn(UnaryOp::cbrt, a), num(2.0))));
      case UnaryOp::exp: return mul(fn(UnaryOp::exp, a), da);
      case UnaryOp::ln: return div(da, a);
      case UnaryOp::sin: return mul(fn(UnaryOp::cos, a), da);
      case UnaryOp::cos: return neg(mul(fn(UnaryOp::sin, a), da));
      case UnaryOp::tan: return div(da, pow(fn(UnaryOp::cos, a), num(2.0)));
    }
  }

  const auto& b = std::get<BinaryNode>(node.kind);
  const Expression& l = b.left;
  const Expression& r = b.right;
  switch (b.op) {
    case BinaryOp::add: return add(differentiate(l), differentiate(r));
    case BinaryOp::sub: return sub(differentiate(l), differentiate(r));
    case BinaryOp::mul: return add(mul(differentiate(l), r), mul(l, differentiate(r)));
    case BinaryOp::div:
      return div(sub(mul(differentiate(l), r), mul(l, differentiate(r))), pow(r, num(2.0)));
    case BinaryOp::pow: {
      if (!r.has_variable()) {
        // Power rule. A literal fraction keeps its literal form one lower so
        // real odd roots of negative bases stay defined in the derivative.
        if (auto q = r.literal_rational()) {
          const Rational lowered{q->num - q->den, q->den};
          return mul(mul(fraction(*q), pow(l, fraction(lowered))), differentiate(l));
        }
        return mul(mul(r, pow(l, sub(r, num(1.0)))), differentiate(l));
      }
      // d(u^v) = u^v (v' ln u + v u'/u)
      return mul(pow(l, r), add(mul(differentiate(r), fn(UnaryOp::ln, l)),
                                div(mul(r, differentiate(l)), l)));
    }
  }
  return num(0.0);
}

}  // namespace newton_lens

#pragma once

#include <cmath>
#include <string_view>

#include "newton_lens/expr.hpp"

namespace newton_lens {

enum class FaultKind {
  log_of_zero,
  log_of_negative,
  even_root_of_negative,
  division_by_zero,
  irrational_power_of_negative,
  nonfinite,
};

inline constexpr std::string_view name_of(FaultKind k) {
  switch (k) {
    case FaultKind::log_of_zero: return "log-of-zero";
    case FaultKind::log_of_negative: return "log-of-negative";
    case FaultKind::even_root_of_negative: return "even-root-of-negative";
    case FaultKind::division_by_zero: return "division-by-zero";
    case FaultKind::irrational_power_of_negative: return "irrational-power-of-negative";
    case FaultKind::nonfinite: return "nonfinite";
  }
  return "?";
}

/// Either a finite value or the domain fault that prevented one.
class EvalResult {
 public:
  static constexpr EvalResult of(double v) {
    return std::isfinite(v) ? EvalResult(v, false, FaultKind::nonfinite)
                            : EvalResult(0.0, true, FaultKind::nonfinite);
  }
  static constexpr EvalResult fault(FaultKind k) { return EvalResult(0.0, true, k); }

  [[nodiscard]] constexpr bool ok() const { return !faulted_; }
  [[nodiscard]] constexpr double value() const { return value_; }
  [[nodiscard]] constexpr FaultKind fault() const { return fault_; }

  friend constexpr bool operator==(const EvalResult& a, const EvalResult& b) {
    if (a.faulted_ != b.faulted_) return false;
    return a.faulted_ ? a.fault_ == b.fault_ : a.value_ == b.value_;
  }

 private:
  constexpr EvalResult(double v, bool faulted, FaultKind k) : value_(v), faulted_(faulted), fault_(k) {}

  double value_;
  bool faulted_;
  FaultKind fault_;
};

namespace detail {

inline EvalResult eval_pow(double base, double expo, const std::optional<Rational>& literal) {
  if (base == 0.0 && expo < 0.0) return EvalResult::fault(FaultKind::division_by_zero);
  if (base < 0.0) {
    if (literal && literal->den != 1) {
      if (literal->den % 2 == 0) return EvalResult::fault(FaultKind::even_root_of_negative);
      // Real odd root raised to p: sign is (-1)^p.
      const double magnitude = std::pow(-base, expo);
      return EvalResult::of(literal->num % 2 == 0 ? magnitude : -magnitude);
    }
    if (expo != std::trunc(expo)) return EvalResult::fault(FaultKind::irrational_power_of_negative);
  }
  return EvalResult::of(std::pow(base, expo));
}

inline EvalResult eval_unary(UnaryOp op, double a) {
  switch (op) {
    case UnaryOp::neg: return EvalResult::of(-a);
    case UnaryOp::abs: return EvalResult::of(std::abs(a));
    case UnaryOp::sqrt:
      if (a < 0.0) return EvalResult::fault(FaultKind::even_root_of_negative);
      return EvalResult::of(std::sqrt(a));
    case UnaryOp::cbrt: return EvalResult::of(std::cbrt(a));
    case UnaryOp::exp: return EvalResult::of(std::exp(a));
    case UnaryOp::ln:
      if (a == 0.0) return EvalResult::fault(FaultKind::log_of_zero);
      if (a < 0.0) return EvalResult::fault(FaultKind::log_of_negative);
      return EvalResult::of(std::log(a));
    case UnaryOp::sin: return EvalResult::of(std::sin(a));
    case UnaryOp::cos: return EvalResult::of(std::cos(a));
    case UnaryOp::tan: return EvalResult::of(std::tan(a));
  }
  return EvalResult::fault(FaultKind::nonfinite);
}

inline EvalResult eval_node(const Expression& e, double x) {
  const auto& node = e.node();
  if (const auto* c = std::get_if<ConstantNode>(&node.kind)) return EvalResult::of(c->value);
  if (std::holds_alternative<VariableNode>(node.kind)) return EvalResult::of(x);
  if (const auto* u = std::get_if<UnaryNode>(&node.kind)) {
    const EvalResult a = eval_node(u->child, x);
    if (!a.ok()) return a;
    return eval_unary(u->op, a.value());
  }
  const auto& b = std::get<BinaryNode>(node.kind);
  const EvalResult l = eval_node(b.left, x);
  if (!l.ok()) return l;
  const EvalResult r = eval_node(b.right, x);
  if (!r.ok()) return r;
  switch (b.op) {
    case BinaryOp::add: return EvalResult::of(l.value() + r.value());
    case BinaryOp::sub: return EvalResult::of(l.value() - r.value());
    case BinaryOp::mul: return EvalResult::of(l.value() * r.value());
    case BinaryOp::div:
      if (r.value() == 0.0) return EvalResult::fault(FaultKind::division_by_zero);
      return EvalResult::of(l.value() / r.value());
    case BinaryOp::pow: return eval_pow(l.value(), r.value(), b.right.literal_rational());
  }
  return EvalResult::fault(FaultKind::nonfinite);
}

}  // namespace detail

/// Real-analysis evaluation. Literal fractions p/q with odd q in an exponent
/// take real odd roots of negative bases, so x^(1/3) at -8 is -2.
inline EvalResult evaluate(const Expression& expr, double x) {
  if (!std::isfinite(x)) return EvalResult::fault(FaultKind::nonfinite);
  return detail::eval_node(expr, x);
}

}  // namespace newton_lens

#pragma once

// Newton iteration x_{n+1} = x_n - f(x_n)/f'(x_n) with a recorded trace and a
// classification of how the sequence ended.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "newton_lens/problem.hpp"

namespace newton_lens {

struct Tolerances {
  double f_rel = 1e-12;        // |f| threshold, relative to the problem scale
  double x_rel = 1e-12;        // Newton step threshold, relative to 1 + |x|
  double deriv_rel = 1e-14;    // |f'| floor, relative to scale * (1 + |x|)
  double diverge_abs = 1e12;
  double diverge_rel = 1e6;    // relative to 1 + |x0|
  double cycle_rel = 1e-9;
  int max_period = 8;
  double escape_rel = 1e3;     // a flat tangent past this (x 1 + |x0|) on a growing orbit is divergence
};

/// Tolerances made concrete for one run. `scale` is
/// max(|f(x0)|, |f'(x0)|), so multiplying f by a constant rescales every
/// threshold on f and f' with it.
struct StopRules {
  double tol_f;
  double tol_x;
  double deriv_rel;
  double scale;
  double diverge_limit;
  double cycle_rel;
  int max_period;
  double escape_limit;

  [[nodiscard]] double deriv_floor(double x) const { return deriv_rel * scale * (1.0 + std::abs(x)); }

  static StopRules make(const Tolerances& t, double x0, double f0, double df0) {
    double scale = std::max(std::abs(f0), std::abs(df0));
    if (!std::isfinite(scale) || scale == 0.0) scale = 1.0;
    const double limit = std::min(t.diverge_abs, t.diverge_rel * (1.0 + std::abs(x0)));
    return StopRules{t.f_rel * scale, t.x_rel,        t.deriv_rel,    scale,
                     limit,           t.cycle_rel, t.max_period, t.escape_rel * (1.0 + std::abs(x0))};
  }
};

/// One point of the sequence. fx/dfx are NaN when the point was not (or
/// could not be) evaluated; `fault` says why.
struct Iterate {
  double x;
  double fx = std::numeric_limits<double>::quiet_NaN();
  double dfx = std::numeric_limits<double>::quiet_NaN();
  std::optional<FaultKind> fault;
};

namespace outcome {
struct Converged {
  double root;
  std::size_t at_iter;
  friend bool operator==(const Converged&, const Converged&) = default;
};
struct Cycle {
  int period;
  std::size_t first_iter;
  friend bool operator==(const Cycle&, const Cycle&) = default;
};
struct Diverged {
  std::size_t at_iter;
  friend bool operator==(const Diverged&, const Diverged&) = default;
};
struct DerivativeTooSmall {
  std::size_t at_iter;
  friend bool operator==(const DerivativeTooSmall&, const DerivativeTooSmall&) = default;
};
struct DomainExit {
  std::size_t at_iter;
  double offending_x;
  friend bool operator==(const DomainExit&, const DomainExit&) = default;
};
struct EvaluationFault {
  std::size_t at_iter;
  FaultKind fault;
  friend bool operator==(const EvaluationFault&, const EvaluationFault&) = default;
};
struct Inconclusive {
  friend bool operator==(const Inconclusive&, const Inconclusive&) = default;
};
}  // namespace outcome

using Outcome = std::variant<outcome::Converged, outcome::Cycle, outcome::Diverged, outcome::DerivativeTooSmall,
                             outcome::DomainExit, outcome::EvaluationFault, outcome::Inconclusive>;

enum class OutcomeKind { converged, cycle, diverged, derivative_too_small, domain_exit, evaluation_fault, inconclusive };

inline OutcomeKind kind_of(const Outcome& o) { return static_cast<OutcomeKind>(o.index()); }

inline constexpr std::string_view name_of(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::converged: return "converged";
    case OutcomeKind::cycle: return "cycle";
    case OutcomeKind::diverged: return "diverged";
    case OutcomeKind::derivative_too_small: return "derivative-too-small";
    case OutcomeKind::domain_exit: return "domain-exit";
    case OutcomeKind::evaluation_fault: return "evaluation-fault";
    case OutcomeKind::inconclusive: return "inconclusive";
  }
  return "?";
}

/// Index of the iterate the outcome refers to, when it has one.
inline std::optional<std::size_t> at_iter(const Outcome& o) {
  return std::visit(
      [](const auto& v) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, outcome::Cycle>) {
          return v.first_iter;
        } else if constexpr (std::is_same_v<T, outcome::Inconclusive>) {
          return std::nullopt;
        } else {
          return v.at_iter;
        }
      },
      o);
}

struct IterationTrace {
  double x0 = 0.0;
  int requested_k = 0;
  std::vector<Iterate> iterates;
  Outcome outcome = outcome::Inconclusive{};
  double scale = 1.0;  // StopRules::scale used for this run
};

/// Why a single Newton step could not be taken.
struct StepFault {
  enum class Reason { derivative_too_small, evaluation } reason;
  std::optional<FaultKind> fault;
};

using StepResult = std::variant<double, StepFault>;

/// One Newton step x - f(x)/f'(x). `scale` feeds the derivative floor
/// deriv_rel * scale * (1 + |x|).
inline StepResult newton_step(const NewtonProblem& p, double x, double scale = 1.0, const Tolerances& tol = {}) {
  const EvalResult fx = p.value(x);
  if (!fx.ok()) return StepFault{StepFault::Reason::evaluation, fx.fault()};
  const EvalResult dfx = p.slope(x);
  if (!dfx.ok()) return StepFault{StepFault::Reason::evaluation, dfx.fault()};
  if (std::abs(dfx.value()) < tol.deriv_rel * scale * (1.0 + std::abs(x))) {
    return StepFault{StepFault::Reason::derivative_too_small, std::nullopt};
  }
  return x - fx.value() / dfx.value();
}

namespace detail {

inline bool cycle_match(std::span<const Iterate> it, std::size_t i, int period, double rel) {
  const double a = it[i].x;
  const double b = it[i - static_cast<std::size_t>(period)].x;
  return std::abs(a - b) <= rel * (1.0 + std::abs(a));
}

/// Smallest period p in [1, max] whose match holds at the last two indices.
inline std::optional<int> smallest_period(std::span<const Iterate> it, const StopRules& rules) {
  const std::size_t j = it.size() - 1;
  for (int p = 1; p <= rules.max_period; ++p) {
    if (j < static_cast<std::size_t>(p) + 1) break;
    if (cycle_match(it, j, p, rules.cycle_rel) && cycle_match(it, j - 1, p, rules.cycle_rel)) return p;
  }
  return std::nullopt;
}

/// Last three magnitudes strictly increasing and the last one far out.
inline bool escaping(std::span<const Iterate> it, const StopRules& rules) {
  const std::size_t j = it.size() - 1;
  if (j < 2) return false;
  const double a = std::abs(it[j - 2].x), b = std::abs(it[j - 1].x), c = std::abs(it[j].x);
  return a < b && b < c && c > rules.escape_limit;
}

}  // namespace detail

/// Classifies the trace so far from its last iterate. Priority:
/// fault > domain exit > small derivative > converged > cycle > diverged.
/// A flat tangent on an orbit that is already escaping (f' -> 0 at infinity)
/// counts as divergence, not as a near-critical point.
inline Outcome classify(std::span<const Iterate> iterates, const Domain& domain, const StopRules& rules) {
  if (iterates.empty()) return outcome::Inconclusive{};
  const std::size_t j = iterates.size() - 1;
  const Iterate& last = iterates[j];

  if (last.fault) return outcome::EvaluationFault{j, *last.fault};
  if (!domain.contains(last.x)) return outcome::DomainExit{j, last.x};
  if (std::isnan(last.fx) || std::isnan(last.dfx)) return outcome::Inconclusive{};
  if (std::abs(last.dfx) < rules.deriv_floor(last.x)) {
    // Flat tangent with a negligible residual: a multiple root, located as
    // well as the working precision allows.
    if (std::abs(last.fx) <= rules.tol_f) return outcome::Converged{last.x, j};
    if (detail::escaping(iterates, rules)) return outcome::Diverged{j};
    return outcome::DerivativeTooSmall{j};
  }

  const double step = last.fx / last.dfx;
  if (last.fx == 0.0 ||
      (std::abs(last.fx) <= rules.tol_f && std::abs(step) <= rules.tol_x * (1.0 + std::abs(last.x)))) {
    return outcome::Converged{last.x, j};
  }

  // Period 1 is a stall (slow approach to a root), not an orbit.
  if (auto p = detail::smallest_period(iterates, rules); p && *p > 1) {
    return outcome::Cycle{*p, j - 1 - static_cast<std::size_t>(*p)};
  }

  if (std::abs(last.x) > rules.diverge_limit) return outcome::Diverged{j};
  return outcome::Inconclusive{};
}

namespace detail {

inline Iterate probe(const NewtonProblem& p, double x) {
  Iterate it{x, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), std::nullopt};
  const EvalResult fx = p.value(x);
  if (!fx.ok()) {
    it.fault = fx.fault();
    return it;
  }
  it.fx = fx.value();
  const EvalResult dfx = p.slope(x);
  if (!dfx.ok()) {
    it.fault = dfx.fault();
    return it;
  }
  it.dfx = dfx.value();
  return it;
}

}  // namespace detail

/// Runs at most k Newton steps from x0 (trace length <= k + 1), stopping at
/// the first classified outcome. Throws std::domain_error if x0 is outside
/// the problem's domain.
inline IterationTrace run(const NewtonProblem& p, double x0, int k, const Tolerances& tol = {}) {
  if (!p.domain.contains(x0)) throw std::domain_error("x0 is outside the domain");
  if (k < 0) throw std::invalid_argument("k must be non-negative");

  IterationTrace trace;
  trace.x0 = x0;
  trace.requested_k = k;
  trace.iterates.reserve(static_cast<std::size_t>(std::min(k, 4096)) + 1);

  StopRules rules{};
  double x = x0;
  for (int j = 0;; ++j) {
    trace.iterates.push_back(detail::probe(p, x));
    if (j == 0) {
      const Iterate& first = trace.iterates.front();
      rules = StopRules::make(tol, x0, first.fault ? 0.0 : first.fx, first.fault ? 0.0 : first.dfx);
      trace.scale = rules.scale;
    }
    trace.outcome = classify(trace.iterates, p.domain, rules);
    if (kind_of(trace.outcome) != OutcomeKind::inconclusive || j == k) return trace;

    const Iterate& cur = trace.iterates.back();
    const double next = cur.x - cur.fx / cur.dfx;
    if (!std::isfinite(next)) {
      trace.outcome = outcome::Diverged{static_cast<std::size_t>(j)};
      return trace;
    }
    if (!p.domain.contains(next)) {
      // Recorded for display, never evaluated.
      trace.iterates.push_back(Iterate{next, std::numeric_limits<double>::quiet_NaN(),
                                         std::numeric_limits<double>::quiet_NaN(), std::nullopt});
      trace.outcome = classify(trace.iterates, p.domain, rules);
      return trace;
    }
    x = next;
  }
}

}  // namespace newton_lens

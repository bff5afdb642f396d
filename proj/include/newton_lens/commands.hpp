#pragma once

// Operations behind the command line and the HTTP API. Both front ends fill
// the same input structs and print the same documents, so their payloads
// agree byte for byte.

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "newton_lens/analysis.hpp"
#include "newton_lens/analysis_json.hpp"
#include "newton_lens/scene.hpp"
#include "newton_lens/scene_json.hpp"
#include "newton_lens/trace_json.hpp"

namespace newton_lens {

/// A request that is well formed but cannot be served as asked.
class RequestError : public std::runtime_error {
 public:
  enum class Kind { validation, outside_domain };
  RequestError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Limits {
  int max_k = 10'000;
  std::size_t max_n = 100'000;
  std::size_t max_function_length = 4096;
};

struct ProblemInput {
  std::string function;
  std::optional<std::string> domain;  // "(lo,hi)"
  std::vector<double> exclude;
};

struct TraceInput {
  ProblemInput problem;
  double x0 = 0.0;
  int k = 20;
  Tolerances tolerances;
};

struct SceneInput {
  TraceInput trace;
  std::optional<Viewport> viewport;
  int graph_samples = 400;
};

struct BasinInput {
  ProblemInput problem;
  Interval interval;
  std::size_t n = 400;
  int k = 20;
  Tolerances tolerances;
};

struct RadiusInput {
  ProblemInput problem;
  Interval interval;
  std::size_t grid = 400;
  std::optional<double> root_hint;  // nearest root to this; the interval midpoint if absent
  std::uint64_t seed = 0x5EED;
};

struct RootsInput {
  ProblemInput problem;
  Interval interval;
  std::size_t grid = 400;
};

struct ReportInput {
  TraceInput trace;
  Interval interval;  // where K is estimated
  std::size_t grid = 400;
  std::size_t probes = 200;
  std::uint64_t seed = 0x5EED;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw RequestError(RequestError::Kind::validation, message);
}

inline void check_k(int k, const Limits& lim) {
  require(k >= 0 && k <= lim.max_k, "k must be between 0 and " + std::to_string(lim.max_k));
}

inline void check_count(std::size_t n, std::size_t min, const Limits& lim, const char* what) {
  require(n >= min && n <= lim.max_n,
          std::string(what) + " must be between " + std::to_string(min) + " and " + std::to_string(lim.max_n));
}

inline void check_interval(const Interval& iv) {
  require(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi, "interval needs finite lo < hi");
}

}  // namespace detail

/// Parses f and builds its domain. Throws ParseError or RequestError.
inline NewtonProblem make_problem(const ProblemInput& in, const Limits& lim = {}) {
  detail::require(!in.function.empty(), "function is required");
  detail::require(in.function.size() <= lim.max_function_length, "function text is too long");
  Domain d;
  try {
    if (in.domain) d = parse_domain(*in.domain);
  } catch (const std::invalid_argument& e) {
    throw RequestError(RequestError::Kind::validation, std::string("domain: ") + e.what());
  }
  for (double p : in.exclude) {
    detail::require(std::isfinite(p) && p > d.lo && p < d.hi, "excluded points must lie inside the domain");
  }
  d.excluded = in.exclude;
  return NewtonProblem::parse(in.function, std::move(d));
}

inline IterationTrace run_checked(const NewtonProblem& p, double x0, int k, const Tolerances& tol) {
  detail::require(std::isfinite(x0), "x0 must be finite");
  if (!p.domain.contains(x0)) {
    throw RequestError(RequestError::Kind::outside_domain, "x0 = " + shortest_repr(x0) + " is outside the domain");
  }
  return run(p, x0, k, tol);
}

struct TraceResult {
  NewtonProblem problem;
  IterationTrace trace;
};

inline TraceResult compute_trace(const TraceInput& in, const Limits& lim = {}) {
  detail::check_k(in.k, lim);
  NewtonProblem p = make_problem(in.problem, lim);
  IterationTrace t = run_checked(p, in.x0, in.k, in.tolerances);
  return {std::move(p), std::move(t)};
}

inline Json trace_document(const TraceInput& in, const Limits& lim = {}) {
  const auto r = compute_trace(in, lim);
  return to_json(r.trace, r.problem.source);
}

inline Scene compute_scene(const SceneInput& in, const Limits& lim = {}) {
  detail::check_count(static_cast<std::size_t>(std::max(in.graph_samples, 0)), 2, lim, "graph_samples");
  if (in.viewport) {
    const Viewport& v = *in.viewport;
    detail::require(std::isfinite(v.xmin) && std::isfinite(v.xmax) && std::isfinite(v.ymin) &&
                        std::isfinite(v.ymax) && v.xmin < v.xmax && v.ymin < v.ymax,
                    "viewport needs finite xmin < xmax and ymin < ymax");
  }
  const auto r = compute_trace(in.trace, lim);
  return build_scene(r.problem, r.trace, in.viewport, in.graph_samples);
}

inline Json scene_document(const SceneInput& in, const Limits& lim = {}) { return to_json(compute_scene(in, lim)); }

inline Json basin_document(const BasinInput& in, const Limits& lim = {},
                           std::optional<std::chrono::steady_clock::time_point> deadline = {}) {
  detail::check_k(in.k, lim);
  detail::check_count(in.n, 2, lim, "n");
  detail::check_interval(in.interval);
  const NewtonProblem p = make_problem(in.problem, lim);
  BasinOptions opt;
  opt.tolerances = in.tolerances;
  opt.deadline = deadline;
  return to_json(sample_basin(p, in.interval, in.n, in.k, opt), p.source);
}

inline std::string basin_csv(const BasinInput& in, const Limits& lim = {}) {
  detail::check_k(in.k, lim);
  detail::check_count(in.n, 2, lim, "n");
  detail::check_interval(in.interval);
  const NewtonProblem p = make_problem(in.problem, lim);
  BasinOptions opt;
  opt.tolerances = in.tolerances;
  return to_csv(sample_basin(p, in.interval, in.n, in.k, opt));
}

inline Json roots_document(const RootsInput& in, const Limits& lim = {}) {
  detail::check_count(in.grid, 2, lim, "grid");
  detail::check_interval(in.interval);
  const NewtonProblem p = make_problem(in.problem, lim);
  Json j;
  j["function"] = p.source;
  j["interval"] = to_json(in.interval);
  Json roots = Json::array();
  for (const auto& r : find_roots(p, in.interval, in.grid)) roots.push_back(to_json(r));
  j["roots"] = std::move(roots);
  return j;
}

namespace detail {

inline RootEstimate pick_root(const NewtonProblem& p, const Interval& iv, std::size_t grid, double hint) {
  const auto roots = find_roots(p, iv, grid);
  if (roots.empty()) throw AnalysisError(AnalysisError::Kind::precondition, "no root found in the interval");
  return *std::min_element(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.x_star - hint) < std::abs(b.x_star - hint);
  });
}

}  // namespace detail

/// Radius around the root of f in the interval nearest to the hint, with K
/// estimated over the same interval.
inline Json radius_document(const RadiusInput& in, const Limits& lim = {}) {
  detail::check_count(in.grid, 2, lim, "grid");
  detail::check_interval(in.interval);
  const NewtonProblem p = make_problem(in.problem, lim);
  const double hint = in.root_hint.value_or(in.interval.lo + 0.5 * in.interval.width());
  const RootEstimate root = detail::pick_root(p, in.interval, in.grid, hint);
  const double K = estimate_lipschitz(p, root, in.interval, in.grid, in.seed);
  Json j;
  j["x_star"] = detail::number(root.x_star);
  const Json radius = to_json(convergence_radius(K, p, root));
  for (const auto& [key, value] : radius.items()) j[key] = value;
  return j;
}

/// Convergence report for the trace from x0, plus a probe of the radius:
/// `probes` evenly spaced starts in (x* - r, x* + r) and how many converge.
inline Json report_document(const ReportInput& in, const Limits& lim = {}) {
  detail::check_count(in.grid, 2, lim, "grid");
  detail::check_count(in.probes, 1, lim, "probes");
  detail::check_interval(in.interval);
  const auto r = compute_trace(in.trace, lim);
  const auto* c = std::get_if<outcome::Converged>(&r.trace.outcome);
  if (c == nullptr) {
    throw AnalysisError(AnalysisError::Kind::precondition,
                        std::string("trace ended ") + std::string(name_of(kind_of(r.trace.outcome))) +
                            ", a report needs a converged trace");
  }
  const EvalResult f = r.problem.value(c->root);
  const EvalResult d = r.problem.slope(c->root);
  const RootEstimate root{c->root, f.ok() ? f.value() : std::numeric_limits<double>::quiet_NaN(),
                          d.ok() ? d.value() : std::numeric_limits<double>::quiet_NaN(), Interval{c->root, c->root},
                          0.0};
  ConvergenceReport rep;
  rep.root = root;
  try {
    rep.rate = estimate_order(r.trace, root);
  } catch (const AnalysisError&) {
    rep.rate.reset();
  }
  const double K = estimate_lipschitz(r.problem, root, in.interval, in.grid, in.seed);
  rep.radius = convergence_radius(K, r.problem, root);
  try {
    rep.error_bound = check_error_bound(r.trace, root, K);
  } catch (const AnalysisError& e) {
    rep.error_bound_note = e.what();
  }

  Json j;
  j["function"] = r.problem.source;
  j["x0"] = in.trace.x0;
  const Json body = to_json(rep);
  for (const auto& [key, value] : body.items()) j[key] = value;

  std::size_t converged = 0;
  const double rr = rep.radius.r;
  if (std::isfinite(rr) && rr > 0.0) {
    for (std::size_t i = 0; i < in.probes; ++i) {
      const double x0 = root.x_star + rr * (2.0 * (static_cast<double>(i) + 0.5) / in.probes - 1.0);
      if (!r.problem.domain.contains(x0)) continue;
      const auto t = run(r.problem, x0, in.trace.k, in.trace.tolerances);
      const auto* pc = std::get_if<outcome::Converged>(&t.outcome);
      if (pc != nullptr && same_root(pc->root, root.x_star)) ++converged;
    }
  }
  j["radius_probe"] = {{"probes", in.probes}, {"converged", converged}};
  return j;
}

}  // namespace newton_lens

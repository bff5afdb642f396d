#pragma once

// Convergence diagnostics around a root: bracketing root search, empirical
// order of convergence, the affine-scaled Lipschitz constant K of f', the
// radius r = min(kappa, 2/(3K)) with its error bound, basins of attraction and
// an empirical local-convergence radius.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "newton_lens/engine.hpp"
#include "newton_lens/format.hpp"

namespace newton_lens {

class AnalysisError : public std::runtime_error {
 public:
  enum class Kind { insufficient_samples, evaluation_fault, precondition, timeout };

  AnalysisError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct RootEstimate {
  double x_star = 0.0;
  double f_at_root = 0.0;
  double dfx_at_root = 0.0;
  Interval bracket;
  double refined_to = 0.0;
};

struct RateEstimate {
  double order_p = 0.0;
  double linear_rate = 0.0;  // meaningful when order_p is close to 1
  std::size_t samples_used = 0;
  double residual = 0.0;     // max deviation of single-step orders from the median
};

struct ConvergenceRadius {
  double K = 0.0;
  double kappa = 0.0;
  double r = 0.0;
  Interval interval;             // open (x* - r, x* + r)
  Interval uniqueness_interval;  // open (x* - 2/K, x* + 2/K)
};

struct ErrorBoundRow {
  std::size_t iter = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct BasinSample {
  double x0 = 0.0;
  OutcomeKind outcome = OutcomeKind::inconclusive;
  std::optional<std::size_t> root_index;
};

struct BasinMap {
  Interval interval;
  int k = 0;
  std::vector<RootEstimate> roots;
  std::vector<BasinSample> samples;
};

/// Whether a limit point counts as the given root.
inline bool same_root(double limit, double root) { return std::abs(limit - root) <= 1e-6 * (1.0 + std::abs(root)); }

namespace detail {

inline double grid_point(const Interval& iv, std::size_t i, std::size_t n) {
  if (i == n) return iv.hi;
  return iv.lo + iv.width() * (static_cast<double>(i) / static_cast<double>(n));
}

inline std::optional<double> value_in_domain(const NewtonProblem& p, double x) {
  if (!p.domain.contains(x)) return std::nullopt;
  const EvalResult v = p.value(x);
  if (!v.ok()) return std::nullopt;
  return v.value();
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Bisection on a sign-changing bracket, then one Newton polish step.
inline std::optional<RootEstimate> refine_bracket(const NewtonProblem& p, double a, double fa, double b, double fb) {
  while (true) {
    const double m = a + 0.5 * (b - a);
    if (b - a <= 1e-13 * (1.0 + std::abs(m)) || m <= a || m >= b) break;
    const auto fm = value_in_domain(p, m);
    if (!fm) return std::nullopt;
    if (*fm == 0.0) {
      a = b = m;
      fa = fb = 0.0;
      break;
    }
    if (std::signbit(*fm) == std::signbit(fa)) {
      a = m;
      fa = *fm;
    } else {
      b = m;
      fb = *fm;
    }
  }
  double x = a + 0.5 * (b - a);
  auto fx = value_in_domain(p, x);
  if (!fx) return std::nullopt;
  // A pole between the bracket ends also changes sign; reject it.
  if (std::abs(*fx) > 1e-6 * (1.0 + std::max(std::abs(fa), std::abs(fb)))) return std::nullopt;

  const EvalResult d = p.slope(x);
  if (d.ok() && d.value() != 0.0 && *fx != 0.0) {
    const double w = b - a;
    const double polished = x - *fx / d.value();
    const auto fp = value_in_domain(p, polished);
    if (fp && polished >= a - w && polished <= b + w && std::abs(*fp) <= std::abs(*fx)) {
      x = polished;
      fx = fp;
    }
  }
  const EvalResult dx = p.slope(x);
  return RootEstimate{x, *fx, dx.ok() ? dx.value() : std::numeric_limits<double>::quiet_NaN(), Interval{a, b},
                      1e-13 * (1.0 + std::abs(x))};
}

}  // namespace detail

/// Sign-change scan over grid_n + 1 equally spaced points, bisection to
/// width 1e-13 (1 + |x|), one Newton polish, duplicates within 1e-10 merged.
/// Points outside the domain or where f faults are skipped.
inline std::vector<RootEstimate> find_roots(const NewtonProblem& p, const Interval& interval, std::size_t grid_n) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be at least 2");
  std::vector<std::optional<double>> fs(grid_n + 1);
  for (std::size_t i = 0; i <= grid_n; ++i) fs[i] = detail::value_in_domain(p, detail::grid_point(interval, i, grid_n));

  std::vector<RootEstimate> roots;
  for (std::size_t i = 0; i <= grid_n; ++i) {
    if (!fs[i]) continue;
    const double xi = detail::grid_point(interval, i, grid_n);
    if (*fs[i] == 0.0) {
      const EvalResult d = p.slope(xi);
      roots.push_back({xi, 0.0, d.ok() ? d.value() : std::numeric_limits<double>::quiet_NaN(), Interval{xi, xi},
                       1e-13 * (1.0 + std::abs(xi))});
      continue;
    }
    if (i == grid_n || !fs[i + 1] || *fs[i + 1] == 0.0) continue;
    if (std::signbit(*fs[i]) == std::signbit(*fs[i + 1])) continue;
    const double xj = detail::grid_point(interval, i + 1, grid_n);
    if (auto r = detail::refine_bracket(p, xi, *fs[i], xj, *fs[i + 1])) roots.push_back(*r);
  }

  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.x_star < b.x_star; });
  std::vector<RootEstimate> unique;
  for (const auto& r : roots) {
    if (unique.empty() || std::abs(r.x_star - unique.back().x_star) >= 1e-10) unique.push_back(r);
  }
  return unique;
}

/// Order of convergence from a raw sequence: with e_j = |x_j - x*| and only
/// 1e-13 < e_j < 1e-1 used, order = median ln(e_{j+1}) / ln(e_j) and
/// linear rate = median e_{j+1} / e_j.
inline RateEstimate estimate_order(std::span<const double> xs, double x_star) {
  std::vector<double> orders;
  std::vector<double> rates;
  const auto usable = [](double e) { return e > 1e-13 && e < 1e-1; };
  for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
    const double e0 = std::abs(xs[j] - x_star);
    const double e1 = std::abs(xs[j + 1] - x_star);
    if (!usable(e0) || !usable(e1)) continue;
    orders.push_back(std::log(e1) / std::log(e0));
    rates.push_back(e1 / e0);
  }
  if (orders.size() < 2) {
    throw AnalysisError(AnalysisError::Kind::insufficient_samples,
                        "need at least 2 usable error quotients, found " + std::to_string(orders.size()));
  }
  RateEstimate out;
  out.order_p = detail::median(orders);
  out.linear_rate = detail::median(rates);
  out.samples_used = orders.size();
  for (double o : orders) out.residual = std::max(out.residual, std::abs(o - out.order_p));
  return out;
}

inline RateEstimate estimate_order(const IterationTrace& trace, const RootEstimate& root) {
  const auto* c = std::get_if<outcome::Converged>(&trace.outcome);
  if (c == nullptr || !same_root(c->root, root.x_star)) {
    throw AnalysisError(AnalysisError::Kind::precondition, "trace did not converge to the given root");
  }
  std::vector<double> xs;
  xs.reserve(trace.iterates.size());
  for (const auto& it : trace.iterates) xs.push_back(it.x);
  return estimate_order(xs, root.x_star);
}

/// Lower estimate of K = sup |f'(x) - f'(y)| / (|f'(x*)| |x - y|) over the
/// interval: every adjacent pair of a grid_n grid plus 10 grid_n random
/// pairs drawn with seed 0x5EED.
inline double estimate_lipschitz(const NewtonProblem& p, const RootEstimate& root, const Interval& interval,
                                 std::size_t grid_n, std::uint64_t seed = 0x5EED) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be at least 2");
  const EvalResult d_star = p.slope(root.x_star);
  if (!d_star.ok() || d_star.value() == 0.0) {
    throw AnalysisError(AnalysisError::Kind::precondition, "f'(x*) must be defined and non-zero");
  }
  const double scale = std::abs(d_star.value());
  const auto slope_at = [&](double x) {
    const EvalResult d = p.slope(x);
    if (!d.ok()) {
      throw AnalysisError(AnalysisError::Kind::evaluation_fault,
                          "f' faults (" + std::string(name_of(d.fault())) + ") at x = " + shortest_repr(x));
    }
    return d.value();
  };

  std::vector<double> xs(grid_n + 1);
  std::vector<double> ds(grid_n + 1);
  for (std::size_t i = 0; i <= grid_n; ++i) {
    xs[i] = detail::grid_point(interval, i, grid_n);
    ds[i] = slope_at(xs[i]);
  }
  double K = 0.0;
  const auto consider = [&](double x, double dx, double y, double dy) {
    if (x == y) return;
    K = std::max(K, std::abs(dx - dy) / (scale * std::abs(x - y)));
  };
  for (std::size_t i = 0; i < grid_n; ++i) consider(xs[i], ds[i], xs[i + 1], ds[i + 1]);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(interval.lo, interval.hi);
  for (std::size_t i = 0; i < 10 * grid_n; ++i) {
    const double x = pick(rng);
    const double y = pick(rng);
    consider(x, slope_at(x), y, slope_at(y));
  }
  return K;
}

/// kappa from the domain (ends and punctures), r = min(kappa, 2/(3K));
/// K = 0 gives r = kappa.
inline ConvergenceRadius convergence_radius(double K, const NewtonProblem& p, const RootEstimate& root) {
  ConvergenceRadius out;
  const double c = root.x_star;
  out.K = K;
  out.kappa = p.domain.radius_around(c);
  out.r = K > 0.0 ? std::min(out.kappa, 2.0 / (3.0 * K)) : out.kappa;
  out.interval = Interval{c - out.r, c + out.r};
  out.uniqueness_interval = K > 0.0 ? Interval{c - 2.0 / K, c + 2.0 / K} : Interval{-inf, inf};
  return out;
}

/// Rows k = 0.. of |x* - x_{k+1}| <= K / (2 (1 - K|x0 - x*|)) |x_k - x*|^2.
/// Besides the 1e-9 relative slack, each row allows 4 ulps of |x_k| + |x*|:
/// below that the computed iterate cannot resolve the bound.
inline std::vector<ErrorBoundRow> check_error_bound(const IterationTrace& trace, const RootEstimate& root, double K) {
  const auto* c = std::get_if<outcome::Converged>(&trace.outcome);
  if (c == nullptr || !same_root(c->root, root.x_star)) {
    throw AnalysisError(AnalysisError::Kind::precondition, "trace did not converge to the given root");
  }
  const double x_star = root.x_star;
  const double start = K * std::abs(trace.x0 - x_star);
  if (!(start < 1.0)) {
    throw AnalysisError(AnalysisError::Kind::precondition,
                        "K |x0 - x*| = " + shortest_repr(start) + " is not below 1");
  }
  const double factor = K / (2.0 * (1.0 - start));
  constexpr double eps = 0x1p-52;
  std::vector<ErrorBoundRow> rows;
  for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
    const double xk = trace.iterates[k].x;
    const double ek = std::abs(xk - x_star);
    ErrorBoundRow row{k, std::abs(x_star - trace.iterates[k + 1].x), factor * ek * ek, false};
    const double roundoff = 4.0 * eps * (std::abs(xk) + std::abs(x_star));
    row.holds = row.lhs <= row.rhs * (1.0 + 1e-9) + roundoff;
    rows.push_back(row);
  }
  return rows;
}

struct BasinOptions {
  /// Roots to label against first; other limits are clustered and appended.
  std::vector<RootEstimate> known_roots;
  Tolerances tolerances;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Runs the engine from n + 1 equally spaced starts over the interval. Each
/// converged sample is labelled with the index of its root; roots are sorted
/// ascending so the map does not depend on evaluation order.
inline BasinMap sample_basin(const NewtonProblem& p, const Interval& interval, std::size_t n, int k,
                             const BasinOptions& opt = {}) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  BasinMap map;
  map.interval = interval;
  map.k = k;
  map.samples.resize(n + 1);
  std::vector<std::optional<double>> limits(n + 1);

  for (std::size_t i = 0; i <= n; ++i) {
    if (opt.deadline && (i % 64 == 0) && std::chrono::steady_clock::now() > *opt.deadline) {
      throw AnalysisError(AnalysisError::Kind::timeout, "basin sampling exceeded its time budget");
    }
    BasinSample& s = map.samples[i];
    s.x0 = detail::grid_point(interval, i, n);
    if (!p.domain.contains(s.x0)) {
      s.outcome = OutcomeKind::domain_exit;
      continue;
    }
    const IterationTrace t = run(p, s.x0, k, opt.tolerances);
    s.outcome = kind_of(t.outcome);
    if (const auto* c = std::get_if<outcome::Converged>(&t.outcome)) limits[i] = c->root;
  }

  std::vector<RootEstimate> roots = opt.known_roots;
  std::vector<double> unmatched;
  for (const auto& l : limits) {
    if (!l) continue;
    const bool known = std::any_of(roots.begin(), roots.end(), [&](const auto& r) { return same_root(*l, r.x_star); });
    if (!known) unmatched.push_back(*l);
  }
  std::sort(unmatched.begin(), unmatched.end());
  for (std::size_t i = 0; i < unmatched.size();) {
    std::size_t j = i;
    while (j + 1 < unmatched.size() && same_root(unmatched[j + 1], unmatched[i])) ++j;
    const double rep = unmatched[i + (j - i) / 2];
    const EvalResult f = p.value(rep);
    const EvalResult d = p.slope(rep);
    roots.push_back({rep, f.ok() ? f.value() : std::numeric_limits<double>::quiet_NaN(),
                     d.ok() ? d.value() : std::numeric_limits<double>::quiet_NaN(),
                     Interval{unmatched[i], unmatched[j]}, 1e-6 * (1.0 + std::abs(rep))});
    i = j + 1;
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.x_star < b.x_star; });

  for (std::size_t i = 0; i <= n; ++i) {
    if (!limits[i]) continue;
    double best = inf;
    for (std::size_t r = 0; r < roots.size(); ++r) {
      const double dist = std::abs(*limits[i] - roots[r].x_star);
      if (same_root(*limits[i], roots[r].x_star) && dist < best) {
        best = dist;
        map.samples[i].root_index = r;
      }
    }
  }
  map.roots = std::move(roots);
  return map;
}

namespace detail {

/// True when every start x* +- t i/32 (i = 1..32) converges to x*.
inline bool probe_converges(const NewtonProblem& p, double x_star, double t, int k, const Tolerances& tol) {
  for (int i = 1; i <= 32; ++i) {
    for (double sign : {-1.0, 1.0}) {
      const double x0 = x_star + sign * t * (static_cast<double>(i) / 32.0);
      if (!p.domain.contains(x0)) return false;
      const IterationTrace trace = run(p, x0, k, tol);
      const auto* c = std::get_if<outcome::Converged>(&trace.outcome);
      if (c == nullptr || !same_root(c->root, x_star)) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Largest t in (0, search_limit], to within 1e-4, for which a 64-point
/// symmetric probe around the root all converges to it. 0 when even the
/// smallest probe fails.
inline double estimate_delta(const NewtonProblem& p, const RootEstimate& root, double search_limit, int k = 100,
                             const Tolerances& tol = {}) {
  constexpr double resolution = 1e-4;
  const double c = root.x_star;
  if (detail::probe_converges(p, c, search_limit, k, tol)) return search_limit;
  if (!detail::probe_converges(p, c, std::min(resolution, search_limit), k, tol)) return 0.0;
  double good = std::min(resolution, search_limit);
  double bad = search_limit;
  while (bad - good > resolution) {
    const double mid = good + 0.5 * (bad - good);
    (detail::probe_converges(p, c, mid, k, tol) ? good : bad) = mid;
  }
  return good;
}

/// Rate, radius and error-bound verdicts for one converged trace.
struct ConvergenceReport {
  RootEstimate root;
  std::optional<RateEstimate> rate;
  ConvergenceRadius radius;
  std::vector<ErrorBoundRow> error_bound;
  std::string error_bound_note;  // why rows are missing, if they are
};

inline ConvergenceReport build_report(const NewtonProblem& p, const IterationTrace& trace, const RootEstimate& root,
                                      const Interval& k_interval, std::size_t grid_n) {
  ConvergenceReport rep;
  rep.root = root;
  try {
    rep.rate = estimate_order(trace, root);
  } catch (const AnalysisError&) {
    rep.rate.reset();
  }
  const double K = estimate_lipschitz(p, root, k_interval, grid_n);
  rep.radius = convergence_radius(K, p, root);
  try {
    rep.error_bound = check_error_bound(trace, root, K);
  } catch (const AnalysisError& e) {
    rep.error_bound_note = e.what();
  }
  return rep;
}

}  // namespace newton_lens

#pragma once

// Geometric picture of a Newton trace: iterates on the x-axis, their images
// on the graph, the vertical drops between them and the tangent lines that
// carry each graph point to the next iterate.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "newton_lens/engine.hpp"

namespace newton_lens {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Segment {
  Point a;
  Point b;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Label {
  Point at;
  std::string text;
  friend bool operator==(const Label&, const Label&) = default;
};

struct Viewport {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;
  [[nodiscard]] double width() const { return xmax - xmin; }
  [[nodiscard]] double height() const { return ymax - ymin; }
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct Annotation {
  std::string function;
  double x0 = 0.0;
  int k = 0;           // requested steps
  int iterations = 0;  // steps drawn
  double x_k = 0.0;
  double f_x_k = 0.0;  // NaN when the last iterate was not evaluated

  friend bool operator==(const Annotation& a, const Annotation& b) {
    const auto same = [](double u, double v) { return u == v || (std::isnan(u) && std::isnan(v)); };
    return a.function == b.function && same(a.x0, b.x0) && a.k == b.k && a.iterations == b.iterations &&
           same(a.x_k, b.x_k) && same(a.f_x_k, b.f_x_k);
  }
};

struct Scene {
  std::vector<std::vector<Point>> graph_polyline;  // one run per unbroken piece
  std::vector<Point> axis_points;
  std::vector<Point> graph_points;
  std::vector<Segment> vertical_segments;
  std::vector<Segment> tangent_segments;
  std::vector<Label> labels;
  Viewport viewport;
  Annotation annotation;
  friend bool operator==(const Scene&, const Scene&) = default;
};

namespace detail {

/// Bounding box padded by 10% per side; a zero extent becomes one unit
/// either side of the value.
inline Viewport fit_viewport(const std::vector<Point>& pts) {
  double xmin = inf, xmax = -inf, ymin = 0.0, ymax = 0.0;
  for (const Point& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const auto pad = [](double& lo, double& hi) {
    const double w = hi - lo;
    if (w == 0.0) {
      const double h = std::max(1.0, 0.1 * std::abs(lo));
      lo -= h;
      hi += h;
    } else {
      lo -= 0.1 * w;
      hi += 0.1 * w;
    }
  };
  pad(xmin, xmax);
  pad(ymin, ymax);
  return Viewport{xmin, xmax, ymin, ymax};
}

}  // namespace detail

/// f sampled at n points across the viewport, split wherever f cannot be
/// evaluated or jumps by more than 10 viewport heights.
inline std::vector<std::vector<Point>> sample_graph(const NewtonProblem& p, const Viewport& vp, int n) {
  std::vector<std::vector<Point>> pieces;
  std::vector<Point> cur;
  const double jump = 10.0 * vp.height();
  for (int i = 0; i < n; ++i) {
    const double x = n == 1 ? vp.xmin : vp.xmin + vp.width() * (static_cast<double>(i) / (n - 1));
    const EvalResult y = p.domain.contains(x) ? p.value(x) : EvalResult::fault(FaultKind::nonfinite);
    const bool ok = y.ok();
    if (!ok || (!cur.empty() && std::abs(y.value() - cur.back().y) > jump)) {
      if (cur.size() >= 2) pieces.push_back(std::move(cur));
      cur.clear();
    }
    if (ok) cur.push_back({x, y.value()});
  }
  if (cur.size() >= 2) pieces.push_back(std::move(cur));
  return pieces;
}

inline Scene build_scene(const NewtonProblem& p, const IterationTrace& t, std::optional<Viewport> viewport = {},
                         int graph_samples = 400) {
  if (t.iterates.empty()) throw std::invalid_argument("trace has no iterates");
  Scene s;
  for (const Iterate& it : t.iterates) {
    s.axis_points.push_back({it.x, 0.0});
    if (std::isfinite(it.fx)) s.graph_points.push_back({it.x, it.fx});
  }
  for (std::size_t i = 0; i + 1 < t.iterates.size(); ++i) {
    const Iterate& it = t.iterates[i];
    s.vertical_segments.push_back({{it.x, 0.0}, {it.x, it.fx}});
    s.tangent_segments.push_back({{it.x, it.fx}, {t.iterates[i + 1].x, 0.0}});
  }
  s.labels.push_back({s.axis_points.front(), "x0"});
  if (s.axis_points.size() > 1) s.labels.push_back({s.axis_points.back(), "xk"});

  std::vector<Point> all = s.axis_points;
  all.insert(all.end(), s.graph_points.begin(), s.graph_points.end());
  s.viewport = viewport ? *viewport : detail::fit_viewport(all);
  s.graph_polyline = sample_graph(p, s.viewport, graph_samples);

  const Iterate& last = t.iterates.back();
  s.annotation = Annotation{p.source,
                            t.x0,
                            t.requested_k,
                            static_cast<int>(t.iterates.size()) - 1,
                            last.x,
                            std::isfinite(last.fx) ? last.fx : std::numeric_limits<double>::quiet_NaN()};
  return s;
}

}  // namespace newton_lens

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "newton_lens/scene.hpp"
#include "newton_lens/scene_json.hpp"
#include "newton_lens/scene_svg.hpp"
#include "support/fixtures.hpp"

namespace nl = newton_lens;

#ifndef NEWTON_LENS_GOLDEN_DIR
#define NEWTON_LENS_GOLDEN_DIR "tests/golden"
#endif

namespace {

constexpr double cubic_x0 = 6.0;

nl::Scene cubic_scene() {
  const auto p = fixtures::problem(fixtures::tangent_cubic);
  return nl::build_scene(p, nl::run(p, cubic_x0, 3));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

// Slope error of the segment (x_i, f_i) -> (x_{i+1}, 0) against f'(x_i)
// beyond what storing x_{i+1} in binary64 already forces.
double tangency_excess(const nl::NewtonProblem& p, const nl::Segment& t) {
  const double dx = t.b.x - t.a.x;
  const double want = p.slope(t.a.x).value();
  if (dx == 0.0) return t.a.y == 0.0 ? 0.0 : nl::inf;
  const double slope = (t.b.y - t.a.y) / dx;
  const double rel = std::abs(slope - want) / std::abs(want);
  const double floor = 4 * 0x1p-52 * (1.0 + std::abs(t.b.x) / std::abs(dx));
  return rel - std::max(1e-9, floor);
}

}  // namespace

TEST(BuildScene, TangentCubicCounts) {
  const auto s = cubic_scene();
  EXPECT_EQ(s.axis_points.size(), 4u);
  EXPECT_EQ(s.vertical_segments.size(), 3u);
  EXPECT_EQ(s.tangent_segments.size(), 3u);
  ASSERT_EQ(s.labels.size(), 2u);
  EXPECT_EQ(s.labels[1].text, "xk");
  EXPECT_EQ(s.labels[1].at, s.axis_points[3]);
  EXPECT_EQ(s.annotation.iterations, 3);
  EXPECT_EQ(s.annotation.x_k, s.axis_points[3].x);
}

TEST(BuildScene, RootStartHasNoSegments) {
  const auto p = nl::NewtonProblem::parse("x^3 - x");
  const auto s = nl::build_scene(p, nl::run(p, 1.0, 5));
  EXPECT_EQ(s.axis_points.size(), 1u);
  EXPECT_TRUE(s.vertical_segments.empty());
  EXPECT_TRUE(s.tangent_segments.empty());
  EXPECT_EQ(s.labels.size(), 1u);
  const auto svg = nl::to_svg(s);
  EXPECT_EQ(count(svg, "<circle"), 2u);  // the axis point and its graph point coincide
  EXPECT_EQ(count(svg, "<path d=\"M"), 2u);  // arrow marker and graph
}

TEST(BuildScene, ExampleFourSymmetricTangents) {
  const auto p = fixtures::problem(fixtures::example4);
  const auto s = nl::build_scene(p, nl::run(p, 1.0, 6));
  ASSERT_GE(s.tangent_segments.size(), 2u);
  const double f1 = 1 / std::sqrt(2.0);
  const auto near = [](const nl::Segment& got, const nl::Segment& want) {
    EXPECT_NEAR(got.a.x, want.a.x, 1e-14);
    EXPECT_NEAR(got.a.y, want.a.y, 1e-14);
    EXPECT_NEAR(got.b.x, want.b.x, 1e-14);
    EXPECT_EQ(got.b.y, 0.0);
  };
  near(s.tangent_segments[0], {{1, f1}, {-1, 0}});
  near(s.tangent_segments[1], {{-1, -f1}, {1, 0}});
}

TEST(BuildScene, ExampleTwoAxisPoints) {
  const auto p = fixtures::problem(fixtures::example2);
  const auto s = nl::build_scene(p, nl::run(p, 1.0, 3));
  ASSERT_EQ(s.axis_points.size(), 4u);
  EXPECT_DOUBLE_EQ(s.axis_points[1].x, -0.5);
  EXPECT_DOUBLE_EQ(s.axis_points[2].x, 0.25);
  EXPECT_DOUBLE_EQ(s.axis_points[3].x, -0.125);
}

TEST(BuildScene, PoleBreaksGraph) {
  const auto p = fixtures::problem(fixtures::example5);
  const auto s = nl::build_scene(p, nl::run(p, 2.0, 5), nl::Viewport{-2, 3, -5, 5}, 401);
  EXPECT_EQ(s.graph_polyline.size(), 1u);  // x <= 0 is outside the domain
  const auto q = nl::NewtonProblem::parse("1 - 1/x");
  const auto s2 = nl::build_scene(q, nl::run(q, 2.0, 5), nl::Viewport{-2, 3, -5, 5}, 400);
  ASSERT_EQ(s2.graph_polyline.size(), 2u);
  EXPECT_LT(s2.graph_polyline[0].back().x, 0.0);
  EXPECT_GT(s2.graph_polyline[1].front().x, 0.0);
}

TEST(BuildScene, DomainExitLeavesLastPointOffGraph) {
  const auto p = fixtures::problem(fixtures::example5);
  const auto s = nl::build_scene(p, nl::run(p, 2.0, 5));
  EXPECT_EQ(s.axis_points.size(), 2u);
  EXPECT_EQ(s.graph_points.size(), 1u);
  EXPECT_TRUE(std::isnan(s.annotation.f_x_k));
  EXPECT_EQ(nl::scene_from_json(nl::to_json(s)), s);
}

TEST(BuildScene, AutoViewportPadsBoundingBox) {
  const auto s = cubic_scene();
  double lo = nl::inf, hi = -nl::inf;
  for (const auto& p : s.axis_points) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  EXPECT_NEAR(s.viewport.xmin, lo - 0.1 * (hi - lo), 1e-12);
  EXPECT_NEAR(s.viewport.xmax, hi + 0.1 * (hi - lo), 1e-12);
}

TEST(SceneProperties, AxisGraphAndTangency) {
  const fixtures::Example* examples[] = {&fixtures::example1, &fixtures::example2, &fixtures::example3,
                                         &fixtures::example4, &fixtures::example5, &fixtures::example6,
                                         &fixtures::example7, &fixtures::tangent_cubic};
  const double starts[] = {-1.3, -0.65, -0.6, 0.2, 0.4656, 0.9, 1.0, 1.02, 1.5, 2.0, 6.0};
  for (const auto* e : examples) {
    const auto p = fixtures::problem(*e);
    for (double x0 : starts) {
      if (!p.domain.contains(x0)) continue;
      const auto s = nl::build_scene(p, nl::run(p, x0, 30));
      EXPECT_EQ(s.vertical_segments.size(), s.axis_points.size() - 1);
      EXPECT_EQ(s.tangent_segments.size(), s.axis_points.size() - 1);
      for (const auto& a : s.axis_points) EXPECT_EQ(a.y, 0.0);
      for (const auto& g : s.graph_points) {
        EXPECT_LE(std::abs(g.y - p.value(g.x).value()), 1e-12 * (1 + std::abs(g.y)));
      }
      for (std::size_t i = 0; i < s.tangent_segments.size(); ++i) {
        const auto& v = s.vertical_segments[i];
        EXPECT_EQ(v.a, (nl::Point{s.axis_points[i].x, 0.0}));
        EXPECT_EQ(v.b, s.tangent_segments[i].a);
        EXPECT_EQ(s.tangent_segments[i].b, s.axis_points[i + 1]);
        EXPECT_LE(tangency_excess(p, s.tangent_segments[i]), 0.0) << e->name << " x0=" << x0 << " i=" << i;
      }
    }
  }
}

TEST(SceneJson, RoundTripAndShape) {
  const auto s = cubic_scene();
  const auto j = nl::to_json(s);
  EXPECT_EQ(j.begin().key(), "scene_version");
  EXPECT_EQ(j["scene_version"], 1);
  EXPECT_TRUE(j["graph_polyline"].is_array());
  EXPECT_TRUE(j["graph_polyline"][0][0].is_array());
  EXPECT_EQ(nl::scene_from_json(nl::Json::parse(j.dump())), s);
  EXPECT_EQ(nl::to_json(cubic_scene()).dump(), j.dump());
}

TEST(SceneJson, ShortestNumbers) {
  nl::Scene s;
  s.axis_points = {{0.1, 0.0}, {-0.5, 0.0}};
  s.annotation.x_k = 0.1;
  const std::string text = nl::to_json(s).dump();
  EXPECT_NE(text.find("[0.1,0.0]"), std::string::npos);
  EXPECT_EQ(text.find("0.1000"), std::string::npos);
}

TEST(Svg, DeterministicAndMatchesGolden) {
  const auto a = nl::to_svg(cubic_scene());
  const auto b = nl::to_svg(cubic_scene());
  EXPECT_EQ(a, b);
  const std::string golden = read_file(std::string(NEWTON_LENS_GOLDEN_DIR) + "/tangent_cubic.svg");
  ASSERT_FALSE(golden.empty());
  EXPECT_EQ(a, golden);
}

TEST(Svg, StructureAndLegend) {
  const auto svg = nl::to_svg(cubic_scene());
  EXPECT_EQ(svg.rfind("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg ", 0), 0u);
  EXPECT_EQ(count(svg, "stroke-dasharray"), 1u);
  EXPECT_NE(svg.find("f(x) = 0.01*x^3 + 0.01*x^2 - 0.02*x - 0.25"), std::string::npos);
  EXPECT_NE(svg.find("iterations = 3"), std::string::npos);
  EXPECT_EQ(svg.find("-0 "), std::string::npos);
  EXPECT_EQ(svg.find("-0\""), std::string::npos);
}

TEST(Svg, FarIterateIsClippedWithArrow) {
  const auto p = fixtures::problem(fixtures::example6);
  const auto s = nl::build_scene(p, nl::run(p, 0.4656, 3), nl::Viewport{-2, 2, -2, 2});
  const auto svg = nl::to_svg(s);
  EXPECT_EQ(count(svg, "marker-end"), 1u);
  EXPECT_EQ(s.tangent_segments.size(), 3u);
}

TEST(Svg, ClipHelper) {
  const nl::Viewport vp{0, 1, 0, 1};
  bool exits = false;
  const auto seg = nl::svg_detail::clip({{0.5, 0.5}, {2.5, 0.5}}, vp, &exits);
  ASSERT_TRUE(seg);
  EXPECT_TRUE(exits);
  EXPECT_EQ(seg->b, (nl::Point{1, 0.5}));
  EXPECT_FALSE(nl::svg_detail::clip({{2, 2}, {3, 3}}, vp));
  EXPECT_EQ(nl::svg_detail::fixed(-0.0000001, 6), "0");
  EXPECT_EQ(nl::svg_detail::fixed(12.5, 6), "12.5");
}

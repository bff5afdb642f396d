#pragma once

#include "newton_lens/scene.hpp"
#include "newton_lens/trace_json.hpp"

namespace newton_lens {

inline constexpr int scene_version = 1;

namespace detail {

inline Json pair(const Point& p) { return Json::array({number(p.x), number(p.y)}); }

inline Point point_from(const Json& j) { return {number_from(j.at(0)), number_from(j.at(1))}; }

inline Json points(const std::vector<Point>& pts) {
  Json a = Json::array();
  for (const Point& p : pts) a.push_back(pair(p));
  return a;
}

inline std::vector<Point> points_from(const Json& j) {
  std::vector<Point> out;
  for (const auto& e : j) out.push_back(point_from(e));
  return out;
}

inline Json segments(const std::vector<Segment>& segs) {
  Json a = Json::array();
  for (const Segment& s : segs) a.push_back(Json::array({pair(s.a), pair(s.b)}));
  return a;
}

inline std::vector<Segment> segments_from(const Json& j) {
  std::vector<Segment> out;
  for (const auto& e : j) out.push_back({point_from(e.at(0)), point_from(e.at(1))});
  return out;
}

}  // namespace detail

inline Json to_json(const Scene& s) {
  Json j;
  j["scene_version"] = scene_version;
  j["viewport"] = {{"xmin", s.viewport.xmin}, {"xmax", s.viewport.xmax}, {"ymin", s.viewport.ymin},
                   {"ymax", s.viewport.ymax}};
  Json poly = Json::array();
  for (const auto& piece : s.graph_polyline) poly.push_back(detail::points(piece));
  j["graph_polyline"] = std::move(poly);
  j["axis_points"] = detail::points(s.axis_points);
  j["graph_points"] = detail::points(s.graph_points);
  j["vertical_segments"] = detail::segments(s.vertical_segments);
  j["tangent_segments"] = detail::segments(s.tangent_segments);
  Json labels = Json::array();
  for (const Label& l : s.labels) labels.push_back({{"x", detail::number(l.at.x)}, {"y", detail::number(l.at.y)}, {"text", l.text}});
  j["labels"] = std::move(labels);
  const Annotation& a = s.annotation;
  j["annotation"] = {{"function", a.function}, {"x0", detail::number(a.x0)},   {"k", a.k},
                     {"iterations", a.iterations}, {"x_k", detail::number(a.x_k)}, {"f_x_k", detail::number(a.f_x_k)}};
  return j;
}

inline Scene scene_from_json(const Json& j) {
  if (j.at("scene_version").get<int>() != scene_version) throw std::invalid_argument("unsupported scene_version");
  Scene s;
  const Json& v = j.at("viewport");
  s.viewport = {v.at("xmin").get<double>(), v.at("xmax").get<double>(), v.at("ymin").get<double>(),
                v.at("ymax").get<double>()};
  for (const auto& piece : j.at("graph_polyline")) s.graph_polyline.push_back(detail::points_from(piece));
  s.axis_points = detail::points_from(j.at("axis_points"));
  s.graph_points = detail::points_from(j.at("graph_points"));
  s.vertical_segments = detail::segments_from(j.at("vertical_segments"));
  s.tangent_segments = detail::segments_from(j.at("tangent_segments"));
  for (const auto& l : j.at("labels")) {
    s.labels.push_back({{detail::number_from(l.at("x")), detail::number_from(l.at("y"))}, l.at("text").get<std::string>()});
  }
  const Json& a = j.at("annotation");
  s.annotation = Annotation{a.at("function").get<std::string>(), detail::number_from(a.at("x0")),
                            a.at("k").get<int>(),               a.at("iterations").get<int>(),
                            detail::number_from(a.at("x_k")),   detail::number_from(a.at("f_x_k"))};
  return s;
}

}  // namespace newton_lens

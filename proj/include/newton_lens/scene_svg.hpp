#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "newton_lens/format.hpp"
#include "newton_lens/scene.hpp"

namespace newton_lens {

struct SvgStyle {
  int width = 800;
  int height = 600;
  int decimals = 6;
  std::string background = "#ffffff";
  std::string axis_color = "#444444";
  std::string graph_color = "#1f5fbf";
  std::string tangent_color = "#d2461e";
  std::string vertical_color = "#7a7a7a";
  std::string point_color = "#111111";
  double graph_width = 2.0;
  double tangent_width = 1.5;
  double vertical_width = 1.0;
  double point_radius = 3.5;
};

namespace svg_detail {

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Fixed decimals with trailing zeros dropped and -0 printed as 0.
inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

/// Liang-Barsky clip of a -> b to the box; nullopt when nothing is inside.
/// `exits` is set when b itself was cut off.
inline std::optional<Segment> clip(Segment seg, const Viewport& vp, bool* exits = nullptr) {
  const double dx = seg.b.x - seg.a.x;
  const double dy = seg.b.y - seg.a.y;
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {seg.a.x - vp.xmin, vp.xmax - seg.a.x, seg.a.y - vp.ymin, vp.ymax - seg.a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      if (r > t1) return std::nullopt;
      t0 = std::max(t0, r);
    } else {
      if (r < t0) return std::nullopt;
      t1 = std::min(t1, r);
    }
  }
  if (exits) *exits = t1 < 1.0;
  Segment out = seg;
  if (t0 > 0.0) out.a = {seg.a.x + t0 * dx, seg.a.y + t0 * dy};
  if (t1 < 1.0) out.b = {seg.a.x + t1 * dx, seg.a.y + t1 * dy};
  return out;
}

class Canvas {
 public:
  Canvas(const Viewport& vp, const SvgStyle& st) : vp_(vp), st_(st) {}

  [[nodiscard]] std::string px(double x) const { return fixed((x - vp_.xmin) / vp_.width() * st_.width, st_.decimals); }
  [[nodiscard]] std::string py(double y) const {
    return fixed(st_.height - (y - vp_.ymin) / vp_.height() * st_.height, st_.decimals);
  }
  [[nodiscard]] std::string xy(const Point& p) const { return px(p.x) + "," + py(p.y); }
  [[nodiscard]] bool inside(const Point& p) const {
    return p.x >= vp_.xmin && p.x <= vp_.xmax && p.y >= vp_.ymin && p.y <= vp_.ymax;
  }

 private:
  Viewport vp_;
  SvgStyle st_;
};

}  // namespace svg_detail

/// SVG 1.1 rendering. Output depends only on the scene and style.
inline std::string to_svg(const Scene& s, const SvgStyle& st = {}) {
  using svg_detail::fixed;
  const svg_detail::Canvas c(s.viewport, st);
  const Viewport& vp = s.viewport;
  std::ostringstream o;
  const std::string W = std::to_string(st.width), H = std::to_string(st.height);

  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  o << "<defs>\n<marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"7\" markerHeight=\"7\" "
       "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\""
    << st.tangent_color << "\"/></marker>\n</defs>\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"" << st.background << "\"/>\n";

  o << "<g class=\"axes\" stroke=\"" << st.axis_color << "\" stroke-width=\"1\">\n";
  if (vp.ymin <= 0.0 && vp.ymax >= 0.0) {
    o << "<line x1=\"0\" y1=\"" << c.py(0.0) << "\" x2=\"" << W << "\" y2=\"" << c.py(0.0) << "\"/>\n";
  }
  if (vp.xmin <= 0.0 && vp.xmax >= 0.0) {
    o << "<line x1=\"" << c.px(0.0) << "\" y1=\"0\" x2=\"" << c.px(0.0) << "\" y2=\"" << H << "\"/>\n";
  }
  o << "</g>\n";

  o << "<g class=\"graph\" fill=\"none\" stroke=\"" << st.graph_color << "\" stroke-width=\""
    << fixed(st.graph_width, 3) << "\">\n";
  for (const auto& piece : s.graph_polyline) {
    std::string d;
    std::optional<Point> pen;
    for (std::size_t i = 0; i + 1 < piece.size(); ++i) {
      const auto seg = svg_detail::clip({piece[i], piece[i + 1]}, vp);
      if (!seg) continue;
      if (!pen || !(*pen == seg->a)) d += (d.empty() ? "M" : " M") + c.xy(seg->a);
      d += " L" + c.xy(seg->b);
      pen = seg->b;
    }
    if (!d.empty()) o << "<path d=\"" << d << "\"/>\n";
  }
  o << "</g>\n";

  o << "<g class=\"verticals\" stroke=\"" << st.vertical_color << "\" stroke-width=\""
    << fixed(st.vertical_width, 3) << "\" stroke-dasharray=\"4 3\">\n";
  for (const auto& v : s.vertical_segments) {
    if (const auto seg = svg_detail::clip(v, vp)) {
      o << "<line x1=\"" << c.px(seg->a.x) << "\" y1=\"" << c.py(seg->a.y) << "\" x2=\"" << c.px(seg->b.x)
        << "\" y2=\"" << c.py(seg->b.y) << "\"/>\n";
    }
  }
  o << "</g>\n";

  o << "<g class=\"tangents\" stroke=\"" << st.tangent_color << "\" stroke-width=\""
    << fixed(st.tangent_width, 3) << "\">\n";
  for (const auto& t : s.tangent_segments) {
    bool exits = false;
    if (const auto seg = svg_detail::clip(t, vp, &exits)) {
      o << "<line x1=\"" << c.px(seg->a.x) << "\" y1=\"" << c.py(seg->a.y) << "\" x2=\"" << c.px(seg->b.x)
        << "\" y2=\"" << c.py(seg->b.y) << '"' << (exits ? " marker-end=\"url(#arrow)\"" : "") << "/>\n";
    }
  }
  o << "</g>\n";

  o << "<g class=\"points\" fill=\"" << st.point_color << "\">\n";
  for (const auto* pts : {&s.axis_points, &s.graph_points}) {
    for (const Point& p : *pts) {
      if (!c.inside(p)) continue;
      o << "<circle cx=\"" << c.px(p.x) << "\" cy=\"" << c.py(p.y) << "\" r=\"" << fixed(st.point_radius, 3)
        << "\"/>\n";
    }
  }
  o << "</g>\n";

  o << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"13\" fill=\"" << st.point_color << "\">\n";
  for (const Label& l : s.labels) {
    if (!c.inside(l.at)) continue;
    o << "<text x=\"" << c.px(l.at.x) << "\" y=\"" << c.py(l.at.y) << "\" dx=\"4\" dy=\"16\">"
      << svg_detail::escape(l.text) << "</text>\n";
  }
  o << "</g>\n";

  const Annotation& a = s.annotation;
  const std::string lines[] = {
      "f(x) = " + a.function,
      "x0 = " + shortest_repr(a.x0),
      "iterations = " + std::to_string(a.iterations),
      "xk = " + shortest_repr(a.x_k),
      "f(xk) = " + (std::isnan(a.f_x_k) ? std::string("undefined") : shortest_repr(a.f_x_k)),
  };
  o << "<g class=\"legend\" font-family=\"monospace\" font-size=\"12\">\n";
  o << "<rect x=\"8\" y=\"8\" width=\"300\" height=\"92\" fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\""
    << st.axis_color << "\"/>\n";
  int y = 26;
  for (const auto& line : lines) {
    o << "<text x=\"16\" y=\"" << y << "\">" << svg_detail::escape(line) << "</text>\n";
    y += 16;
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace newton_lens

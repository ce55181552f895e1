#pragma once

// Static SVG 1.1 plot of a point set and a fit report.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linefit/geometry.hpp"
#include "linefit/hull.hpp"
#include "linefit/report.hpp"

namespace linefit {

struct SvgOptions {
  int width = 480;
  int height = 480;
  bool draw_hull = true;
};

namespace detail {

struct Frame {
  double x0, x1, y0, y1;
  int w, h;
  double sx(double x) const { return (x - x0) / (x1 - x0) * w; }
  double sy(double y) const { return (y1 - y) / (y1 - y0) * h; }
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Clips {q : <q, n> = c} to the frame rectangle.
inline std::optional<std::pair<Vec2, Vec2>> clip_line(const LineHesse& l, const Frame& f) {
  const Vec2 n = l.normal();
  const Vec2 d = quarter_turn(n);
  const Vec2 base = l.c() * n;
  double t0 = -1e300, t1 = 1e300;
  auto slab = [&](double p, double dir, double lo, double hi) {
    if (dir == 0.0) return p >= lo && p <= hi;
    double a = (lo - p) / dir, b = (hi - p) / dir;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    return t0 <= t1;
  };
  if (!slab(base.x, d.x, f.x0, f.x1) || !slab(base.y, d.y, f.y0, f.y1)) return std::nullopt;
  return std::make_pair(base + t0 * d, base + t1 * d);
}

}  // namespace detail

/// Renders the scatter, every optimal line (continuous sets as fans of
/// representatives) and optionally the convex hull outline.
inline std::string render_svg(const PointSet& ps, const FitReport& report, const SvgOptions& opt = {}) {
  double x0 = ps[0].x, x1 = ps[0].x, y0 = ps[0].y, y1 = ps[0].y;
  for (const Point& p : ps) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double pad = 0.15 * span;
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double half = 0.5 * span + pad;
  const detail::Frame f{cx - half, cx + half, cy - half, cy + half, opt.width, opt.height};

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width << "\" height=\""
      << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n"
      << "<title>" << report.solver << " objective " << report.objective << "</title>\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (opt.draw_hull && ps.size() >= 2) {
    const HullPolytope hull = build_hull(ps, default_tolerance(ps));
    if (hull.vertices.size() >= 2) {
      out << "<polygon class=\"hull\" fill=\"#eef3fb\" stroke=\"#8aa\" stroke-dasharray=\"4 3\" points=\"";
      for (std::size_t v : hull.vertices) out << detail::fmt(f.sx(ps[v].x)) << ',' << detail::fmt(f.sy(ps[v].y)) << ' ';
      out << "\"/>\n";
    }
  }

  auto draw = [&](const Line& line, double opacity, const char* cls) {
    const auto seg = detail::clip_line(as_hesse(line), f);
    if (!seg) return;
    out << "<line class=\"" << cls << "\" x1=\"" << detail::fmt(f.sx(seg->first.x)) << "\" y1=\""
        << detail::fmt(f.sy(seg->first.y)) << "\" x2=\"" << detail::fmt(f.sx(seg->second.x)) << "\" y2=\""
        << detail::fmt(f.sy(seg->second.y)) << "\" stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-opacity=\""
        << opacity << "\"/>\n";
  };

  const OptimalSet& s = report.optimal_set;
  const bool continuous = !line_count(s).has_value();
  if (const auto* poly = std::get_if<ParameterPolytope>(&s)) {
    // Fan across the polytope: each vertex plus interior points of its edges.
    const auto& v = poly->vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      draw(v[i], 1.0, "optimal");
      const LineSI& a = v[i];
      const LineSI& b = v[(i + 1) % v.size()];
      if (v.size() == 2 && i == 1) break;
      for (int k = 1; k <= 3; ++k) {
        const double t = k / 4.0;
        draw(LineSI{a.a + t * (b.a - a.a), a.b + t * (b.b - a.b)}, 0.35, "fan");
      }
    }
  } else {
    for (const Line& l : representatives(s, 5)) draw(l, continuous ? 0.45 : 1.0, continuous ? "fan" : "optimal");
  }

  for (const Point& p : ps) {
    out << "<circle cx=\"" << detail::fmt(f.sx(p.x)) << "\" cy=\"" << detail::fmt(f.sy(p.y)) << "\" r=\""
        << (p.mult > 1 ? 4 : 3) << "\" fill=\"#1f4e79\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace linefit

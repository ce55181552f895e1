#pragma once

// Shared fixtures, random generators and reference computations for the test
// suites. Nothing here calls a solver.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "linefit/geometry.hpp"

namespace linefit::testing {

inline PointSet four_points() { return PointSet({{0, 0}, {1, 1}, {2, 2}, {3, 1.5}}); }
inline PointSet five_points() { return PointSet({{-2, 1}, {-1, -1}, {0, 0}, {1, -1}, {2, 1}}); }
inline PointSet corner_points() { return PointSet({{0, 0}, {2, 0}, {3, 0}, {2, 3}}); }
inline PointSet scaled_five(double lambda) {
  return PointSet({{-2, lambda}, {-1, -lambda}, {0, 0}, {1, -lambda}, {2, lambda}});
}

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct GenOptions {
  int min_points = 3;
  int max_points = 8;
  double box = 5.0;
  bool distinct_x = false;
  bool multiplicities = false;
  /// Total multiplicity cap (0 = none).
  int max_total = 0;
};

inline PointSet random_points(Rng& rng, const GenOptions& opt = {}) {
  while (true) {
    const int m = uniform_int(rng, opt.min_points, opt.max_points);
    std::vector<Point> pts;
    int total = 0;
    for (int i = 0; i < m; ++i) {
      Point p{uniform(rng, -opt.box, opt.box), uniform(rng, -opt.box, opt.box), 1};
      if (opt.multiplicities && uniform_int(rng, 0, 3) == 0) p.mult = uniform_int(rng, 2, 3);
      pts.push_back(p);
      total += static_cast<int>(p.mult);
    }
    if (opt.max_total > 0 && total > opt.max_total) continue;
    if (opt.distinct_x) {
      std::vector<double> xs;
      for (const Point& p : pts) xs.push_back(p.x);
      std::sort(xs.begin(), xs.end());
      if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) continue;
    }
    return PointSet(std::move(pts));
  }
}

inline PointSet random_triangle(Rng& rng) {
  while (true) {
    std::vector<Point> pts;
    for (int i = 0; i < 3; ++i) pts.push_back({uniform(rng, -5, 5), uniform(rng, -5, 5), 1});
    const Vec2 u = pts[1].pos() - pts[0].pos();
    const Vec2 v = pts[2].pos() - pts[0].pos();
    if (std::abs(cross(u, v)) > 1e-2 * (1.0 + norm(u) * norm(v))) return PointSet(std::move(pts));
  }
}

/// Rigid motion plus uniform dilation q = s R(phi) p + t.
struct Similarity {
  double phi = 0.0;
  double scale = 1.0;
  Vec2 shift;

  Vec2 apply(Vec2 p) const {
    const double c = std::cos(phi), s = std::sin(phi);
    return {scale * (c * p.x - s * p.y) + shift.x, scale * (s * p.x + c * p.y) + shift.y};
  }
  Vec2 rotate(Vec2 v) const {
    const double c = std::cos(phi), s = std::sin(phi);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
  }
  PointSet apply(const PointSet& ps) const {
    std::vector<Point> out;
    for (const Point& p : ps) {
      const Vec2 q = apply(p.pos());
      out.push_back({q.x, q.y, p.mult});
    }
    return PointSet(std::move(out));
  }
  /// Image of a line under the map.
  LineHesse apply(const LineHesse& l) const {
    const Vec2 n = rotate(l.normal());
    return LineHesse::from_normal(n, scale * l.c() + dot(n, shift));
  }
};

/// True when two Hesse lines describe the same point set.
inline bool same_line(const LineHesse& a, const LineHesse& b, double tol) {
  const Vec2 na = a.normal(), nb = b.normal();
  if (norm(na - nb) <= tol) return std::abs(a.c() - b.c()) <= tol;
  if (norm(na + nb) <= tol) return std::abs(a.c() + b.c()) <= tol;
  return false;
}

/// Largest relative difference between an analytic and a central-difference
/// gradient of f.
template <class F>
std::array<double, 2> central_difference(F&& f, std::array<double, 2> x, double h) {
  std::array<double, 2> g{};
  for (int i = 0; i < 2; ++i) {
    auto up = x, dn = x;
    up[i] += h;
    dn[i] -= h;
    g[i] = (f(up) - f(dn)) / (2.0 * h);
  }
  return g;
}

/// Reference sum mult * |y - a x - b|^p, written out independently of the library.
inline double vertical_power_sum(const PointSet& ps, double a, double b, double p) {
  double s = 0.0;
  for (const Point& q : ps) s += static_cast<double>(q.mult) * std::pow(std::abs(q.y - a * q.x - b), p);
  return s;
}

inline double vertical_max(const PointSet& ps, double a, double b) {
  double s = 0.0;
  for (const Point& q : ps) s = std::max(s, std::abs(q.y - a * q.x - b));
  return s;
}

inline double orthogonal_power_sum(const PointSet& ps, double theta, double c, double p) {
  const double nx = std::cos(theta), ny = std::sin(theta);
  double s = 0.0;
  for (const Point& q : ps) s += static_cast<double>(q.mult) * std::pow(std::abs(c - q.x * nx - q.y * ny), p);
  return s;
}

/// Ternary search for the minimum of a unimodal function on [lo, hi].
template <class F>
double ternary_min(F&& f, double lo, double hi, int iters = 300) {
  for (int i = 0; i < iters; ++i) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace linefit::testing

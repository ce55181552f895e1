#pragma once

// Points, lines, residuals and the shared objective machinery used by every
// solver in this library.
//
// Sign conventions:
//   vertical residual     r = y - (a x + b)     (positive above the line)
//   orthogonal residual   r = c - <p, n>        (positive on the -n side)
// The index decomposition uses the orientation "point above / on the +n side"
// for J+, i.e. y > a x + b, resp. <p, n> > c.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "linefit/error.hpp"

namespace linefit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 u, Vec2 v) { return {u.x + v.x, u.y + v.y}; }
inline Vec2 operator-(Vec2 u, Vec2 v) { return {u.x - v.x, u.y - v.y}; }
inline Vec2 operator-(Vec2 u) { return {-u.x, -u.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 u, Vec2 v) { return u.x * v.x + u.y * v.y; }
inline double cross(Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Counter-clockwise quarter turn, J = [[0, -1], [1, 0]].
inline Vec2 quarter_turn(Vec2 v) { return {-v.y, v.x}; }

struct Point {
  double x = 0.0;
  double y = 0.0;
  std::int64_t mult = 1;

  Vec2 pos() const { return {x, y}; }

  friend bool operator==(const Point&, const Point&) = default;
};

/// Multiplicity-weighted centroid and centered second moments.
struct ScatterStats {
  Vec2 centroid;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
};

/// Immutable, validated input point set. Stored order is preserved so that
/// every index reported by a solver refers to the caller's input order.
class PointSet {
 public:
  explicit PointSet(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw Error(ErrorCode::EmptySet, "point set is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const Point& p = points_[i];
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw Error(ErrorCode::InvalidArgument,
                    "point " + std::to_string(i) + " has a non-finite coordinate");
      }
      if (p.mult < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "point " + std::to_string(i) + " has multiplicity < 1");
      }
      total_ += p.mult;
      max_abs_ = std::max({max_abs_, std::abs(p.x), std::abs(p.y)});
    }
    compute_stats();
  }

  std::size_t size() const { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  std::span<const Point> points() const { return points_; }

  /// Sum of multiplicities (m_eff).
  std::int64_t total_multiplicity() const { return total_; }
  const ScatterStats& stats() const { return stats_; }
  double max_abs_coordinate() const { return max_abs_; }

  bool all_x_equal() const {
    return std::all_of(points_.begin(), points_.end(),
                       [&](const Point& p) { return p.x == points_.front().x; });
  }
  bool all_identical() const {
    return std::all_of(points_.begin(), points_.end(), [&](const Point& p) {
      return p.x == points_.front().x && p.y == points_.front().y;
    });
  }

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.points_ == b.points_; }

 private:
  void compute_stats() {
    const double w = static_cast<double>(total_);
    double sx = 0.0, sy = 0.0;
    for (const Point& p : points_) {
      sx += static_cast<double>(p.mult) * p.x;
      sy += static_cast<double>(p.mult) * p.y;
    }
    stats_.centroid = {sx / w, sy / w};
    for (const Point& p : points_) {
      const double m = static_cast<double>(p.mult);
      const double dx = p.x - stats_.centroid.x;
      const double dy = p.y - stats_.centroid.y;
      stats_.sxx += m * dx * dx;
      stats_.sxy += m * dx * dy;
      stats_.syy += m * dy * dy;
    }
  }

  std::vector<Point> points_;
  std::int64_t total_ = 0;
  double max_abs_ = 0.0;
  ScatterStats stats_;
};

inline const ScatterStats& scatter(const PointSet& ps) { return ps.stats(); }

/// Default J0 classification band: 1e-9 * (1 + max |coordinate|).
inline double default_tolerance(const PointSet& ps) {
  return 1e-9 * (1.0 + ps.max_abs_coordinate());
}

inline void require_min_points(const PointSet& ps, std::int64_t needed, const char* who) {
  if (ps.total_multiplicity() < needed) {
    throw Error(ErrorCode::InsufficientPoints,
                std::string(who) + " needs total multiplicity >= " + std::to_string(needed));
  }
}

/// Slope-intercept line y = a x + b.
struct LineSI {
  double a = 0.0;
  double b = 0.0;

  double at(double x) const { return a * x + b; }

  friend bool operator==(const LineSI&, const LineSI&) = default;
};

/// Hesse normal form {q : <q, n> = c} with unit normal n = (cos t, sin t),
/// t in [0, pi). The unit normal is stored rather than the angle so that
/// conversions to and from slope-intercept form stay exact to a few ulp.
class LineHesse {
 public:
  LineHesse() = default;

  /// The line {q : <q, n> = c} for any nonzero n; both n and c are rescaled.
  static LineHesse from_normal(Vec2 n, double c) {
    const double len = norm(n);
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw Error(ErrorCode::InvalidArgument, "normal vector must be nonzero and finite");
    }
    if (len != 1.0) {
      n = (1.0 / len) * n;
      c /= len;
    }
    if (n.y < 0.0 || (n.y == 0.0 && n.x < 0.0)) {
      n = -n;
      c = -c;
    }
    n.x += 0.0;  // drop negative zeros
    n.y += 0.0;
    LineHesse l;
    l.n_ = n;
    l.c_ = c;
    return l;
  }

  /// Accepts an already unit, canonically oriented normal as is (used when
  /// reading serialized lines back); anything else goes through from_normal.
  static LineHesse from_canonical(Vec2 n, double c) {
    const bool canonical = n.y > 0.0 || (n.y == 0.0 && n.x > 0.0);
    if (!canonical || std::abs(norm(n) - 1.0) > 1e-12) return from_normal(n, c);
    LineHesse l;
    l.n_ = n;
    l.c_ = c;
    return l;
  }

  static LineHesse from_angle(double theta, double c) {
    return from_normal({std::cos(theta), std::sin(theta)}, c);
  }

  static LineHesse from_si(const LineSI& l) {
    return from_normal({-l.a, 1.0}, l.b);
  }

  /// Line through two distinct points, normal J(p - q)/|p - q|.
  static LineHesse through(Vec2 p, Vec2 q) {
    const Vec2 n = quarter_turn(p - q);
    const double len = norm(n);
    if (!(len > 0.0)) throw Error(ErrorCode::InvalidArgument, "points must be distinct");
    const Vec2 u = (1.0 / len) * n;
    return from_normal(u, dot(q, u));
  }

  Vec2 normal() const { return n_; }
  double c() const { return c_; }
  double theta() const {
    double t = std::atan2(n_.y, n_.x);
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    return t;
  }

  bool is_vertical() const { return n_.y == 0.0; }

  LineSI to_si() const {
    if (is_vertical()) {
      throw Error(ErrorCode::VerticalLineForAlgebraic, "line x = const has no slope");
    }
    return {-n_.x / n_.y, c_ / n_.y};
  }

  friend bool operator==(const LineHesse&, const LineHesse&) = default;

 private:
  Vec2 n_{1.0, 0.0};
  double c_ = 0.0;
};

using Line = std::variant<LineSI, LineHesse>;

enum class DistanceKind { vertical, orthogonal };

inline const char* to_string(DistanceKind k) {
  return k == DistanceKind::vertical ? "vertical" : "orthogonal";
}

/// L^p aggregation exponent; p = +inf denotes the maximum norm.
struct Norm {
  double p = 2.0;

  static Norm l1() { return {1.0}; }
  static Norm l2() { return {2.0}; }
  static Norm linf() { return {std::numeric_limits<double>::infinity()}; }
  static Norm lp(double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "norm exponent must be >= 1");
    return {p};
  }

  bool is_inf() const { return std::isinf(p); }

  friend bool operator==(const Norm&, const Norm&) = default;
};

inline LineSI as_si(const Line& l) {
  if (const auto* si = std::get_if<LineSI>(&l)) return *si;
  return std::get<LineHesse>(l).to_si();
}

inline LineHesse as_hesse(const Line& l) {
  if (const auto* h = std::get_if<LineHesse>(&l)) return *h;
  return LineHesse::from_si(std::get<LineSI>(l));
}

inline double vertical_residual(const Point& p, const LineSI& l) { return p.y - (l.a * p.x + l.b); }

inline double orthogonal_residual(const Point& p, const LineHesse& l) {
  return l.c() - dot(p.pos(), l.normal());
}

/// Signed residuals of every point, in input order, using the residual
/// convention of the given distance kind.
inline std::vector<double> signed_residuals(const PointSet& ps, const Line& line, DistanceKind kind) {
  std::vector<double> r;
  r.reserve(ps.size());
  if (kind == DistanceKind::vertical) {
    const LineSI l = as_si(line);
    for (const Point& p : ps) r.push_back(vertical_residual(p, l));
  } else {
    const LineHesse l = as_hesse(line);
    for (const Point& p : ps) r.push_back(orthogonal_residual(p, l));
  }
  return r;
}

struct IndexDecomposition {
  std::vector<std::size_t> plus;
  std::vector<std::size_t> zero;
  std::vector<std::size_t> minus;
  std::int64_t w_plus = 0;
  std::int64_t w_zero = 0;
  std::int64_t w_minus = 0;

  friend bool operator==(const IndexDecomposition&, const IndexDecomposition&) = default;
};

/// Partition of the input indices into points above (J+), on (J0) and below
/// (J-) the line. Index i lands in J0 iff |residual| <= tol.
inline IndexDecomposition decompose(const PointSet& ps, const Line& line, DistanceKind kind,
                                    double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  const std::vector<double> r = signed_residuals(ps, line, kind);
  IndexDecomposition d;
  for (std::size_t i = 0; i < r.size(); ++i) {
    // Orientation value: y - y(x) for vertical, <p, n> - c for orthogonal.
    const double s = kind == DistanceKind::vertical ? r[i] : -r[i];
    const std::int64_t m = ps[i].mult;
    if (std::abs(s) <= tol) {
      d.zero.push_back(i);
      d.w_zero += m;
    } else if (s > 0.0) {
      d.plus.push_back(i);
      d.w_plus += m;
    } else {
      d.minus.push_back(i);
      d.w_minus += m;
    }
  }
  return d;
}

/// Aggregate objective: sum of mult * d^p for finite p
/// (not its p-th root) and max d for p = inf.
inline double objective(const PointSet& ps, const Line& line, Norm norm, DistanceKind kind) {
  const std::vector<double> r = signed_residuals(ps, line, kind);
  if (norm.is_inf()) {
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::abs(v));
    return worst;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = std::abs(r[i]);
    const double term = norm.p == 1.0 ? d : (norm.p == 2.0 ? d * d : std::pow(d, norm.p));
    sum += static_cast<double>(ps[i].mult) * term;
  }
  return sum;
}

}  // namespace linefit

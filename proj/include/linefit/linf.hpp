#pragma once

// Minimax line fits. The optimal direction is always parallel to an edge of
// the convex hull, and for a fixed direction the optimal offset is the
// mid-range of the projections.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "linefit/geometry.hpp"
#include "linefit/hull.hpp"
#include "linefit/report.hpp"

namespace linefit {

struct MidrangeResult {
  double offset = 0.0;
  std::size_t index_min = 0;
  std::size_t index_max = 0;
  double half_range = 0.0;
};

namespace detail {

template <class Projection>
MidrangeResult midrange_over(const PointSet& ps, std::span<const std::size_t> indices, Projection proj) {
  MidrangeResult m;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i : indices) {
    const double v = proj(ps[i]);
    if (v < lo) {
      lo = v;
      m.index_min = i;
    }
    if (v > hi) {
      hi = v;
      m.index_max = i;
    }
  }
  m.offset = 0.5 * (lo + hi);
  m.half_range = 0.5 * (hi - lo);
  return m;
}

inline std::vector<std::size_t> all_indices(const PointSet& ps) {
  std::vector<std::size_t> idx(ps.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

}  // namespace detail

/// Optimal intercept for slope a: mid-range of y - a x.
inline MidrangeResult midrange_offset(const PointSet& ps, double slope) {
  const auto idx = detail::all_indices(ps);
  return detail::midrange_over(ps, idx, [&](const Point& p) { return p.y - slope * p.x; });
}

/// Optimal offset c for the (not necessarily unit) normal n: mid-range of
/// <p, n/|n|>.
inline MidrangeResult midrange_offset(const PointSet& ps, Vec2 normal) {
  const double len = norm(normal);
  if (!(len > 0.0)) throw Error(ErrorCode::InvalidArgument, "normal vector must be nonzero");
  const Vec2 n = (1.0 / len) * normal;
  const auto idx = detail::all_indices(ps);
  return detail::midrange_over(ps, idx, [&](const Point& p) { return dot(p.pos(), n); });
}

namespace detail {

// Hull vertex farthest from the supporting value of edge (k1, k2).
template <class Projection>
std::size_t farthest_vertex(const PointSet& ps, const HullPolytope& hull, std::size_t k1, Projection proj) {
  const double ref = proj(ps[k1]);
  std::size_t best = k1;
  double far = -1.0;
  for (std::size_t v : hull.vertices) {
    const double dist = std::abs(proj(ps[v]) - ref);
    if (dist > far) {
      far = dist;
      best = v;
    }
  }
  return best;
}

}  // namespace detail

/// Chebyshev fit under vertical distance.
inline FitReport fit_algebraic_linf(const PointSet& ps, double tol) {
  require_min_points(ps, 2, "algebraic L-infinity fit");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  FitReport r;
  r.solver = "linf.algebraic";
  r.norm = Norm::linf();
  r.kind = DistanceKind::vertical;

  if (ps.all_x_equal()) {
    const MidrangeResult m = midrange_offset(ps, 0.0);
    r.optimal_set = VerticalDegenerate{ps[0].x, m.offset, m.offset};
    r.objective = m.half_range;
    r.diagnostics.notes.push_back("all x equal: any slope through the mid-range of y");
    attach_residuals(r, ps, tol);
    return r;
  }

  const HullPolytope hull = build_hull(ps, tol);
  struct EdgeFit {
    double slope;
    MidrangeResult mid;
    std::size_t k1, k2;
  };
  std::vector<EdgeFit> fits;
  for (const auto& [k1, k2] : hull.edges) {
    const Point& p = ps[k1];
    const Point& q = ps[k2];
    if (p.x == q.x) continue;
    const double a = (q.y - p.y) / (q.x - p.x);
    fits.push_back({a, midrange_offset(ps, a), k1, k2});
  }
  if (fits.empty()) {
    // Only reachable when the tol-collapsed hull is a near-vertical segment.
    throw Error(ErrorCode::VerticalLineForAlgebraic, "hull has no non-vertical edge");
  }

  double best = std::numeric_limits<double>::infinity();
  for (const EdgeFit& f : fits) best = std::min(best, f.mid.half_range);
  const double band = tol * (1.0 + best);
  const EdgeFit* chosen = nullptr;
  bool tie = false;
  for (const EdgeFit& f : fits) {
    if (f.mid.half_range > best + band) continue;
    if (chosen && f.slope != chosen->slope) tie = true;
    if (!chosen || f.slope < chosen->slope) chosen = &f;
  }
  if (tie) {
    r.diagnostics.near_degenerate = true;
    r.diagnostics.notes.push_back("edges with different slopes tie inside the tolerance band");
  }
  if (chosen->mid.half_range != best) r.diagnostics.at_tolerance = true;

  const LineSI line{chosen->slope, chosen->mid.offset};
  r.optimal_set = UniqueLine{line};
  r.objective = objective(ps, line, r.norm, r.kind);
  if (hull.shape == HullShape::full) {
    const double a = chosen->slope;
    const std::size_t k3 =
        detail::farthest_vertex(ps, hull, chosen->k1, [&](const Point& s) { return s.y - a * s.x; });
    r.linf_certificates.push_back({chosen->k1, chosen->k2, k3, chosen->mid.half_range});
  }
  attach_residuals(r, ps, tol);
  return r;
}

inline FitReport fit_algebraic_linf(const PointSet& ps) {
  return fit_algebraic_linf(ps, default_tolerance(ps));
}

/// Chebyshev fit under orthogonal distance: lines parallel to the hull edges
/// of minimal width, all of them when several tie.
inline FitReport fit_geometric_linf(const PointSet& ps, double tol) {
  require_min_points(ps, 2, "geometric L-infinity fit");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  FitReport r;
  r.solver = "linf.geometric";
  r.norm = Norm::linf();
  r.kind = DistanceKind::orthogonal;

  if (ps.all_identical()) {
    r.optimal_set = AllLinesThroughPoint{ps[0].pos()};
    r.objective = 0.0;
    r.diagnostics.notes.push_back("all points coincide");
    attach_residuals(r, ps, tol);
    return r;
  }

  const HullPolytope hull = build_hull(ps, tol);
  struct EdgeFit {
    LineHesse line;
    double half_width;
    std::size_t k1, k2;
  };
  std::vector<EdgeFit> fits;
  const auto idx = detail::all_indices(ps);
  for (const auto& [k1, k2] : hull.edges) {
    const LineHesse edge = LineHesse::through(ps[k2].pos(), ps[k1].pos());
    const Vec2 n = edge.normal();
    const MidrangeResult m = detail::midrange_over(ps, idx, [&](const Point& s) { return dot(s.pos(), n); });
    fits.push_back({LineHesse::from_normal(n, m.offset), m.half_range, k1, k2});
  }

  // Best edge first, so it becomes the representative.
  std::stable_sort(fits.begin(), fits.end(),
                   [](const EdgeFit& a, const EdgeFit& b) { return a.half_width < b.half_width; });
  const double best = fits.front().half_width;
  const double band = tol * (1.0 + best);
  const double scale = 1.0 + ps.max_abs_coordinate();

  LineFamilies fams;
  for (const EdgeFit& f : fits) {
    if (f.half_width > best + band) continue;
    if (f.half_width != best) r.diagnostics.at_tolerance = true;
    // Opposite parallel edges produce the same line.
    const bool dup = std::any_of(fams.families.begin(), fams.families.end(), [&](const LineFamily& g) {
      return norm(g.normal - f.line.normal()) <= tol / scale && std::abs(g.c_lo - f.line.c()) <= tol;
    });
    if (dup) continue;
    fams.families.push_back({f.line.normal(), f.line.c(), f.line.c()});
    if (hull.shape == HullShape::full) {
      const Vec2 n = f.line.normal();
      const std::size_t k3 = detail::farthest_vertex(ps, hull, f.k1, [&](const Point& s) { return dot(s.pos(), n); });
      r.linf_certificates.push_back({f.k1, f.k2, k3, f.half_width});
    }
  }
  r.optimal_set = std::move(fams);
  r.objective = objective(ps, r.representative(), r.norm, r.kind);
  attach_residuals(r, ps, tol);
  return r;
}

inline FitReport fit_geometric_linf(const PointSet& ps) {
  return fit_geometric_linf(ps, default_tolerance(ps));
}

}  // namespace linefit

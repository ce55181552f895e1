#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "linefit/geometry.hpp"

namespace linefit {

enum class HullShape { full, segment, single_point };

inline const char* to_string(HullShape s) {
  switch (s) {
    case HullShape::full: return "full";
    case HullShape::segment: return "segment";
    case HullShape::single_point: return "single_point";
  }
  return "unknown";
}

struct HullPolytope {
  /// Counter-clockwise vertex indices into the input.
  std::vector<std::size_t> vertices;
  /// Boundary segments (k, l) between consecutive vertices.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  HullShape shape = HullShape::single_point;
};

namespace detail {

// Andrew's monotone chain. A point within tol of the supporting line of its
// neighbours is dropped, so only strict vertices survive.
inline std::vector<std::size_t> monotone_chain(std::span<const Vec2> pts, double tol) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (pts[i].x != pts[j].x) return pts[i].x < pts[j].x;
    return pts[i].y < pts[j].y;
  });
  // Duplicate coordinates: keep the first input index.
  std::vector<std::size_t> uniq;
  for (std::size_t i : order) {
    if (uniq.empty() || !(pts[uniq.back()] == pts[i])) uniq.push_back(i);
  }
  if (uniq.size() <= 1) return uniq;

  // Keep a between o and b iff o -> a -> b turns left by more than tol.
  auto keeps_turn = [&](std::size_t o, std::size_t a, std::size_t b) {
    const Vec2 ob = pts[b] - pts[o];
    return cross(pts[a] - pts[o], ob) > tol * norm(ob);
  };
  std::vector<std::size_t> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t start = hull.size();
    auto visit = [&](std::size_t idx) {
      while (hull.size() >= start + 2 &&
             !keeps_turn(hull[hull.size() - 2], hull.back(), idx)) {
        hull.pop_back();
      }
      hull.push_back(idx);
    };
    if (pass == 0) {
      for (std::size_t idx : uniq) visit(idx);
    } else {
      for (auto it = uniq.rbegin(); it != uniq.rend(); ++it) visit(*it);
    }
    hull.pop_back();
  }
  // Collinear input collapses to the two extreme points.
  if (hull.size() == 2 && hull[0] == hull[1]) hull.pop_back();
  return hull;
}

}  // namespace detail

/// Convex hull of arbitrary 2-vectors (indices refer to the span).
inline HullPolytope convex_hull(std::span<const Vec2> pts, double tol) {
  if (pts.empty()) throw Error(ErrorCode::EmptySet, "convex hull of an empty set");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  HullPolytope h;
  h.vertices = detail::monotone_chain(pts, tol);
  if (h.vertices.size() == 1) {
    h.shape = HullShape::single_point;
  } else if (h.vertices.size() == 2) {
    h.shape = HullShape::segment;
    h.edges.emplace_back(h.vertices[0], h.vertices[1]);
  } else {
    h.shape = HullShape::full;
    for (std::size_t i = 0; i < h.vertices.size(); ++i) {
      h.edges.emplace_back(h.vertices[i], h.vertices[(i + 1) % h.vertices.size()]);
    }
  }
  return h;
}

/// Hull of the input point coordinates; multiplicities play no role.
inline HullPolytope build_hull(const PointSet& ps, double tol) {
  std::vector<Vec2> pts;
  pts.reserve(ps.size());
  for (const Point& p : ps) pts.push_back(p.pos());
  return convex_hull(pts, tol);
}

}  // namespace linefit

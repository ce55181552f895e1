#pragma once

// Exact least-absolute-deviation fits. Both solvers enumerate every line
// through two input points, so the cost is O(m^3) for m input points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <vector>

#include "linefit/geometry.hpp"
#include "linefit/hull.hpp"
#include "linefit/report.hpp"

namespace linefit {

/// Balance condition for an L1-optimal offset: |w+ - w-| <= w0.
inline bool l1_certificate(const IndexDecomposition& dec) {
  const std::int64_t diff = dec.w_plus - dec.w_minus;
  return (diff < 0 ? -diff : diff) <= dec.w_zero;
}

namespace detail {

struct WeightedValue {
  double value;
  std::int64_t weight;
};

// Closed interval of weighted medians.
inline std::pair<double, double> weighted_median_interval(std::vector<WeightedValue> v) {
  std::sort(v.begin(), v.end(), [](const WeightedValue& l, const WeightedValue& r) { return l.value < r.value; });
  std::int64_t total = 0;
  for (const auto& w : v) total += w.weight;
  std::int64_t below = 0;
  double lo = v.front().value;
  for (const auto& w : v) {
    below += w.weight;
    if (2 * below >= total) {
      lo = w.value;
      break;
    }
  }
  std::int64_t above = 0;
  double hi = v.back().value;
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    above += it->weight;
    if (2 * above >= total) {
      hi = it->value;
      break;
    }
  }
  return {lo, hi};
}

inline std::vector<std::size_t> sorted_zero_set(const IndexDecomposition& d) {
  std::vector<std::size_t> z = d.zero;
  std::sort(z.begin(), z.end());
  return z;
}

// Selects E (objective within the tie band of the certified minimum) and
// deduplicates candidates that describe the same line. Two distinct lines
// share at most one point, so equal J0 sets identify equal lines.
struct Selection {
  double minimum = 0.0;
  std::vector<std::size_t> members;  // indices into candidates, one per line
  bool at_tolerance = false;
  bool certificate_mismatch = false;
};

inline Selection select_optimal(std::vector<CandidateLine>& cands, double tol) {
  Selection sel;
  double best_cert = std::numeric_limits<double>::infinity();
  double best_any = std::numeric_limits<double>::infinity();
  for (const CandidateLine& c : cands) {
    best_any = std::min(best_any, c.objective);
    if (c.certified) best_cert = std::min(best_cert, c.objective);
  }
  if (!std::isfinite(best_cert)) {
    best_cert = best_any;
    sel.certificate_mismatch = true;
  }
  sel.minimum = best_cert;
  const double band = tol * (1.0 + std::abs(best_cert));
  if (best_any < best_cert - band) sel.certificate_mismatch = true;

  std::map<std::vector<std::size_t>, std::size_t> seen;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    CandidateLine& c = cands[i];
    if (c.objective > best_cert + band) continue;
    c.optimal = true;
    if (c.objective != best_cert) sel.at_tolerance = true;
    if (seen.emplace(sorted_zero_set(c.decomposition), i).second) sel.members.push_back(i);
  }
  return sel;
}

}  // namespace detail

/// Least absolute vertical deviations. The optimal set is the convex hull of
/// all optimal two-point lines in (a, b) space.
inline FitReport fit_algebraic_l1(const PointSet& ps, double tol) {
  require_min_points(ps, 2, "algebraic L1 fit");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  FitReport r;
  r.solver = "l1.algebraic";
  r.norm = Norm::l1();
  r.kind = DistanceKind::vertical;

  if (ps.all_x_equal()) {
    std::vector<detail::WeightedValue> ys;
    for (const Point& p : ps) ys.push_back({p.y, p.mult});
    const auto [lo, hi] = detail::weighted_median_interval(std::move(ys));
    r.optimal_set = VerticalDegenerate{ps[0].x, lo, hi};
    r.objective = objective(ps, r.representative(), r.norm, r.kind);
    r.diagnostics.notes.push_back("all x equal: intercepts range over the weighted medians of y");
    attach_residuals(r, ps, tol);
    return r;
  }

  for (std::size_t j = 1; j < ps.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      const Point& pj = ps[j];
      const Point& pk = ps[k];
      if (pj.x == pk.x) continue;
      CandidateLine c;
      c.j = j;
      c.k = k;
      const double dx = pj.x - pk.x;
      const LineSI si{(pj.y - pk.y) / dx, (pk.y * pj.x - pj.y * pk.x) / dx};
      c.si = si;
      c.hesse = LineHesse::from_si(si);
      c.objective = objective(ps, si, r.norm, r.kind);
      c.decomposition = decompose(ps, si, r.kind, tol);
      c.certified = l1_certificate(c.decomposition);
      r.candidates.push_back(std::move(c));
    }
  }

  const detail::Selection sel = detail::select_optimal(r.candidates, tol);
  r.objective = sel.minimum;
  r.diagnostics.at_tolerance = sel.at_tolerance;
  if (sel.certificate_mismatch) {
    r.diagnostics.near_degenerate = true;
    r.diagnostics.notes.push_back("certificate and objective disagree inside the tie band");
  }

  std::vector<Vec2> params;
  double scale = 1.0;
  for (std::size_t i : sel.members) {
    const LineSI& l = *r.candidates[i].si;
    params.push_back({l.a, l.b});
    scale = std::max({scale, std::abs(l.a), std::abs(l.b)});
  }
  const HullPolytope poly = convex_hull(params, 1e-12 * scale);
  if (poly.vertices.size() == 1) {
    r.optimal_set = UniqueLine{LineSI{params[poly.vertices[0]].x, params[poly.vertices[0]].y}};
  } else {
    ParameterPolytope pp;
    for (std::size_t v : poly.vertices) pp.vertices.push_back({params[v].x, params[v].y});
    r.optimal_set = std::move(pp);
  }
  attach_residuals(r, ps, tol);
  return r;
}

inline FitReport fit_algebraic_l1(const PointSet& ps) { return fit_algebraic_l1(ps, default_tolerance(ps)); }

namespace detail {

inline bool same_direction(Vec2 n1, Vec2 n2, double tol, bool& flipped) {
  if (norm(n1 - n2) <= tol) {
    flipped = false;
    return true;
  }
  if (norm(n1 + n2) <= tol) {
    flipped = true;
    return true;
  }
  return false;
}

// Merges parallel lines into offset intervals.
inline LineFamilies group_parallel(const std::vector<LineHesse>& lines, double tol) {
  LineFamilies out;
  for (const LineHesse& l : lines) {
    bool merged = false;
    for (LineFamily& f : out.families) {
      bool flipped = false;
      if (same_direction(f.normal, l.normal(), tol, flipped)) {
        const double c = flipped ? -l.c() : l.c();
        f.c_lo = std::min(f.c_lo, c);
        f.c_hi = std::max(f.c_hi, c);
        merged = true;
        break;
      }
    }
    if (!merged) out.families.push_back({l.normal(), l.c(), l.c()});
  }
  return out;
}

}  // namespace detail

/// Least absolute orthogonal deviations. Optimal lines sharing a normal are
/// reported as one family over their offset interval.
inline FitReport fit_geometric_l1(const PointSet& ps, double tol) {
  require_min_points(ps, 2, "geometric L1 fit");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  FitReport r;
  r.solver = "l1.geometric";
  r.norm = Norm::l1();
  r.kind = DistanceKind::orthogonal;

  if (ps.all_identical()) {
    r.optimal_set = AllLinesThroughPoint{ps[0].pos()};
    r.objective = 0.0;
    r.diagnostics.notes.push_back("all points coincide");
    attach_residuals(r, ps, tol);
    return r;
  }

  for (std::size_t j = 1; j < ps.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      const Vec2 pj = ps[j].pos();
      const Vec2 pk = ps[k].pos();
      if (pj == pk) continue;
      CandidateLine c;
      c.j = j;
      c.k = k;
      c.hesse = LineHesse::through(pj, pk);
      if (pj.x != pk.x) {
        const double dx = pj.x - pk.x;
        c.si = LineSI{(pj.y - pk.y) / dx, (pk.y * pj.x - pj.y * pk.x) / dx};
      }
      c.objective = objective(ps, c.hesse, r.norm, r.kind);
      c.decomposition = decompose(ps, c.hesse, r.kind, tol);
      c.certified = l1_certificate(c.decomposition);
      r.candidates.push_back(std::move(c));
    }
  }

  const detail::Selection sel = detail::select_optimal(r.candidates, tol);
  r.objective = sel.minimum;
  r.diagnostics.at_tolerance = sel.at_tolerance;
  if (sel.certificate_mismatch) {
    r.diagnostics.near_degenerate = true;
    r.diagnostics.notes.push_back("certificate and objective disagree inside the tie band");
  }
  std::vector<LineHesse> lines;
  for (std::size_t i : sel.members) lines.push_back(r.candidates[i].hesse);
  const double scale = 1.0 + ps.max_abs_coordinate();
  r.optimal_set = detail::group_parallel(lines, tol / scale);
  attach_residuals(r, ps, tol);
  return r;
}

inline FitReport fit_geometric_l1(const PointSet& ps) { return fit_geometric_l1(ps, default_tolerance(ps)); }

}  // namespace linefit

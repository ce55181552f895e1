#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "linefit/geometry.hpp"
#include "linefit/report.hpp"

namespace linefit {

/// Closed-form eigen data of the 2x2 scatter matrix.
struct EigenSummary {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  /// sqrt((Sxx - Syy)^2 + 4 Sxy^2), the eigenvalue gap.
  double d = 0.0;
  /// Set when a degenerate branch was chosen inside the tolerance band: the
  /// line the generic slope formula would have produced.
  std::optional<LineHesse> formula_line;

  friend bool operator==(const EigenSummary&, const EigenSummary&) = default;
};

struct L2Report {
  FitReport report;
  std::optional<EigenSummary> eigen;

  friend bool operator==(const L2Report&, const L2Report&) = default;
};

namespace detail {

inline double l2_band(const ScatterStats& s) { return 1e-12 * (s.sxx + s.syy); }

// Normal of the smallest-eigenvalue eigenvector, following the slope formula
// 2 Sxy / (Sxx - Syy + D) with the cancellation-free variant for Sxx < Syy.
// Returns nullopt iff S is a multiple of the identity.
inline std::optional<Vec2> formula_normal(const ScatterStats& s, double d) {
  const double delta = s.sxx - s.syy;
  if (delta >= 0.0) {
    if (delta + d == 0.0) return std::nullopt;
    return Vec2{-2.0 * s.sxy, delta + d};
  }
  return Vec2{-(d - delta), 2.0 * s.sxy};
}

}  // namespace detail

/// Ordinary least squares y = a x + b. All-x-equal input yields the pencil of
/// lines through the centroid.
inline L2Report fit_algebraic_l2(const PointSet& ps) {
  require_min_points(ps, 2, "algebraic L2 fit");
  const ScatterStats& s = ps.stats();
  L2Report out;
  FitReport& r = out.report;
  r.solver = "l2.algebraic";
  r.norm = Norm::l2();
  r.kind = DistanceKind::vertical;
  if (ps.all_x_equal()) {
    r.optimal_set = VerticalDegenerate{s.centroid.x, s.centroid.y, s.centroid.y};
    r.diagnostics.notes.push_back("all x equal: every line through the centroid except x = const");
  } else {
    const double a = s.sxy / s.sxx;
    r.optimal_set = UniqueLine{LineSI{a, s.centroid.y - a * s.centroid.x}};
  }
  r.objective = objective(ps, r.representative(), r.norm, r.kind);
  attach_residuals(r, ps, default_tolerance(ps));
  return out;
}

/// Orthogonal least squares via the smallest eigenvector of the scatter matrix.
inline L2Report fit_geometric_l2(const PointSet& ps) {
  require_min_points(ps, 2, "geometric L2 fit");
  const ScatterStats& s = ps.stats();
  const Vec2 center = s.centroid;
  const double delta = s.sxx - s.syy;
  const double d = std::hypot(delta, 2.0 * s.sxy);
  const double trace = s.sxx + s.syy;

  EigenSummary eig;
  eig.d = d;
  eig.lambda_max = 0.5 * (trace + d);
  eig.lambda_min = 0.5 * (trace - d);
  if (eig.lambda_max > 0.0) {
    // Product form avoids cancellation when the points are nearly collinear.
    eig.lambda_min = std::max(0.0, (s.sxx * s.syy - s.sxy * s.sxy) / eig.lambda_max);
  }

  L2Report out;
  FitReport& r = out.report;
  r.solver = "l2.geometric";
  r.norm = Norm::l2();
  r.kind = DistanceKind::orthogonal;

  const double band = detail::l2_band(s);
  const bool sxy_zero = std::abs(s.sxy) <= band;
  const bool diag_equal = std::abs(delta) <= band;
  const std::optional<Vec2> formula = detail::formula_normal(s, d);
  auto through_center = [&](Vec2 n) {
    return LineHesse::from_normal(n, dot(center, n));
  };

  if (sxy_zero && diag_equal) {
    r.optimal_set = AllLinesThroughPoint{center};
    if (s.sxy != 0.0 || delta != 0.0) {
      r.diagnostics.near_degenerate = true;
      if (formula) eig.formula_line = through_center(*formula);
    }
  } else if (sxy_zero && delta < 0.0) {
    r.optimal_set = UniqueLine{LineHesse::from_normal({1.0, 0.0}, center.x)};
    if (s.sxy != 0.0) {
      r.diagnostics.near_degenerate = true;
      eig.formula_line = through_center(*formula);
    }
  } else {
    // formula is engaged here: S is not a multiple of the identity.
    r.optimal_set = UniqueLine{through_center(*formula)};
    if (s.sxy != 0.0 && (sxy_zero || diag_equal)) r.diagnostics.near_degenerate = true;
  }
  if (r.diagnostics.near_degenerate) {
    r.diagnostics.notes.push_back("scatter matrix within 1e-12 relative of a degenerate case");
  }
  r.objective = objective(ps, r.representative(), r.norm, r.kind);
  attach_residuals(r, ps, default_tolerance(ps));
  out.eigen = eig;
  return out;
}

enum class CoincidenceBranch { collinear, diagonal_scatter, distinct, algebraic_degenerate };

inline const char* to_string(CoincidenceBranch b) {
  switch (b) {
    case CoincidenceBranch::collinear: return "collinear";
    case CoincidenceBranch::diagonal_scatter: return "diagonal_scatter";
    case CoincidenceBranch::distinct: return "distinct";
    case CoincidenceBranch::algebraic_degenerate: return "algebraic_degenerate";
  }
  return "unknown";
}

struct CoincidenceResult {
  bool coincide = false;
  CoincidenceBranch branch = CoincidenceBranch::distinct;
  std::string diagnosis;
  L2Report algebraic;
  L2Report geometric;
};

/// Whether the vertical and orthogonal least-squares lines are the same line.
inline CoincidenceResult l2_coincidence(const PointSet& ps) {
  CoincidenceResult res;
  res.algebraic = fit_algebraic_l2(ps);
  res.geometric = fit_geometric_l2(ps);
  const ScatterStats& s = ps.stats();
  const double band = detail::l2_band(s);

  if (ps.all_x_equal()) {
    res.branch = CoincidenceBranch::algebraic_degenerate;
    res.diagnosis = "all x equal: the vertical fit is a pencil, the orthogonal fit is x = const";
    return res;
  }
  const bool collinear = res.geometric.eigen->lambda_min <= band;
  if (collinear) {
    res.coincide = true;
    res.branch = CoincidenceBranch::collinear;
    res.diagnosis = "all points lie on the regression line";
  } else if (std::abs(s.sxy) <= band && s.sxx >= s.syy - band) {
    res.coincide = true;
    res.branch = CoincidenceBranch::diagonal_scatter;
    res.diagnosis = "Sxy = 0 and Sxx >= Syy: both fits are the horizontal line through the centroid";
  } else {
    res.branch = CoincidenceBranch::distinct;
    res.diagnosis = "the two lines intersect only at the centroid";
  }
  return res;
}

}  // namespace linefit

#pragma once

// Brute-force verifiers. None of these call into the solvers; they only use
// the shared objective evaluation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "linefit/error.hpp"
#include "linefit/geometry.hpp"

namespace linefit {

/// Parameter box: (a, b) for vertical distance, (theta, c) for orthogonal.
struct GridSpec {
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
  int resolution = 64;
  int levels = 6;
  double shrink = 4.0;

  void validate() const {
    if (resolution < 16) throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 16");
    if (levels < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one level");
    if (!(shrink >= 4.0)) throw Error(ErrorCode::InvalidArgument, "grid shrink factor must be >= 4");
    for (int i = 0; i < 2; ++i) {
      if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] <= hi[i])) {
        throw Error(ErrorCode::InvalidArgument, "grid box must be finite and ordered");
      }
    }
  }
};

/// A-priori box containing every optimum: slopes between the extreme
/// two-point slopes and intercepts between the extreme y - a x; orthogonal
/// offsets within the largest point norm.
inline GridSpec default_grid(const PointSet& ps, DistanceKind kind) {
  GridSpec g;
  if (kind == DistanceKind::vertical) {
    double a_lo = std::numeric_limits<double>::infinity(), a_hi = -a_lo;
    for (std::size_t j = 1; j < ps.size(); ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        if (ps[j].x == ps[k].x) continue;
        const double s = (ps[j].y - ps[k].y) / (ps[j].x - ps[k].x);
        a_lo = std::min(a_lo, s);
        a_hi = std::max(a_hi, s);
      }
    }
    if (!std::isfinite(a_lo)) a_lo = a_hi = 0.0;
    double b_lo = std::numeric_limits<double>::infinity(), b_hi = -b_lo;
    for (const Point& p : ps) {
      for (double a : {a_lo, a_hi}) {
        b_lo = std::min(b_lo, p.y - a * p.x);
        b_hi = std::max(b_hi, p.y - a * p.x);
      }
    }
    g.lo = {a_lo, b_lo};
    g.hi = {a_hi, b_hi};
  } else {
    double r = 0.0;
    for (const Point& p : ps) r = std::max(r, norm(p.pos()));
    g.lo = {0.0, -r};
    g.hi = {std::numbers::pi, r};
    g.resolution = 128;
  }
  return g;
}

struct OracleResult {
  double objective = 0.0;
  std::array<double, 2> params{};
  /// Lipschitz bound times the final cell diagonal.
  double error_bound = 0.0;
  std::vector<double> level_objectives;
};

namespace detail {

inline Line grid_line(std::array<double, 2> x, DistanceKind kind) {
  if (kind == DistanceKind::vertical) return LineSI{x[0], x[1]};
  return LineHesse::from_angle(x[0], x[1]);
}

// Local Lipschitz constant of the objective in the grid parameters around x
// within radius rad.
inline double lipschitz(const PointSet& ps, Norm nm, DistanceKind kind, std::array<double, 2> x, double rad) {
  const Line l = grid_line(x, kind);
  const std::vector<double> r = signed_residuals(ps, l, kind);
  double total = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    // |dr/dparam| bound: (1 + |x_j|) vertically, (1 + |p_j|) orthogonally.
    const double sens = 1.0 + (kind == DistanceKind::vertical ? std::abs(ps[i].x) : norm(ps[i].pos()));
    if (nm.is_inf()) {
      worst = std::max(worst, sens);
    } else if (nm.p == 1.0) {
      total += static_cast<double>(ps[i].mult) * sens;
    } else {
      const double reach = std::abs(r[i]) + rad * sens;
      total += static_cast<double>(ps[i].mult) * nm.p * std::pow(reach, nm.p - 1.0) * sens;
    }
  }
  return nm.is_inf() ? worst : total;
}

}  // namespace detail

/// Dense grid minimization with box refinement around the incumbent.
inline OracleResult grid_oracle(const PointSet& ps, Norm nm, DistanceKind kind, const GridSpec& spec) {
  spec.validate();
  OracleResult out;
  std::array<double, 2> lo = spec.lo, hi = spec.hi;
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 2> arg = {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
  const int n = spec.resolution;
  std::array<double, 2> cell{};
  for (int level = 0; level < spec.levels; ++level) {
    for (int i = 0; i < 2; ++i) cell[i] = (hi[i] - lo[i]) / (n - 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::array<double, 2> x{lo[0] + i * cell[0], lo[1] + j * cell[1]};
        const double v = objective(ps, detail::grid_line(x, kind), nm, kind);
        // Lexicographic tie-break keeps the first minimal grid point.
        if (v < best) {
          best = v;
          arg = x;
        }
      }
    }
    out.level_objectives.push_back(best);
    for (int i = 0; i < 2; ++i) {
      const double half = 0.5 * (hi[i] - lo[i]) / spec.shrink;
      lo[i] = arg[i] - half;
      hi[i] = arg[i] + half;
    }
  }
  out.objective = best;
  out.params = arg;
  const double diag = std::hypot(cell[0], cell[1]);
  out.error_bound = detail::lipschitz(ps, nm, kind, arg, diag) * diag;
  return out;
}

inline OracleResult grid_oracle(const PointSet& ps, Norm nm, DistanceKind kind) {
  return grid_oracle(ps, nm, kind, default_grid(ps, kind));
}

struct PairsOracleResult {
  double objective = 0.0;
  std::size_t j = 0;
  std::size_t k = 0;
};

/// Exact minimum over every two-point line (p = 1) or every two-point
/// direction with mid-range offset over all points (p = inf). No pruning.
/// Lines are built with the same two-point formulas the solvers use, so the
/// minima agree bit for bit.
inline PairsOracleResult exhaustive_pairs_oracle(const PointSet& ps, Norm nm, DistanceKind kind) {
  if (!(nm.p == 1.0 || nm.is_inf())) {
    throw Error(ErrorCode::InvalidArgument, "exhaustive oracle supports p = 1 and p = inf");
  }
  if (ps.total_multiplicity() > 12) throw Error(ErrorCode::TooLarge, "exhaustive oracle limited to 12 points");
  PairsOracleResult best{std::numeric_limits<double>::infinity(), 0, 0};
  bool any = false;
  for (std::size_t j = 1; j < ps.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      const Point& pj = ps[j];
      const Point& pk = ps[k];
      Line line;
      if (kind == DistanceKind::vertical) {
        if (pj.x == pk.x) continue;
        const double dx = pj.x - pk.x;
        const double a = (pj.y - pk.y) / dx;
        if (nm.p == 1.0) {
          line = LineSI{a, (pk.y * pj.x - pj.y * pk.x) / dx};
        } else {
          double lo = std::numeric_limits<double>::infinity(), hi = -lo;
          for (const Point& p : ps) {
            lo = std::min(lo, p.y - a * p.x);
            hi = std::max(hi, p.y - a * p.x);
          }
          line = LineSI{a, 0.5 * (lo + hi)};
        }
      } else {
        if (pj.pos() == pk.pos()) continue;
        const LineHesse through = LineHesse::through(pj.pos(), pk.pos());
        const Vec2 n = through.normal();
        if (nm.p == 1.0) {
          line = through;
        } else {
          double lo = std::numeric_limits<double>::infinity(), hi = -lo;
          for (const Point& p : ps) {
            lo = std::min(lo, dot(p.pos(), n));
            hi = std::max(hi, dot(p.pos(), n));
          }
          line = LineHesse::from_normal(n, 0.5 * (lo + hi));
        }
      }
      any = true;
      const double v = objective(ps, line, nm, kind);
      if (v < best.objective) best = {v, j, k};
    }
  }
  if (!any) {
    // Every pair coincides in x (vertical) or in position (orthogonal).
    if (kind == DistanceKind::orthogonal) return {0.0, 0, 0};
    double v = std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Point& p : ps) {
      lo = std::min(lo, p.y);
      hi = std::max(hi, p.y);
    }
    if (nm.is_inf()) return {0.5 * (hi - lo), 0, 0};
    for (const Point& p : ps) v = std::min(v, objective(ps, LineSI{0.0, p.y}, nm, kind));
    return {v, 0, 0};
  }
  return best;
}

struct ConvexityProbeResult {
  bool pass = true;
  double worst_violation = 0.0;
};

/// Checks f(t x1 + (1 - t) x0) <= t f(x1) + (1 - t) f(x0) at random t.
/// Violations above 1e-10 * scale fail; scale defaults to 1 + max(|f(x0)|, |f(x1)|).
template <class F>
ConvexityProbeResult convexity_probe(F&& f, std::array<double, 2> x0, std::array<double, 2> x1, int samples,
                                     std::uint64_t seed = 1, double scale = 0.0) {
  const double f0 = f(x0);
  const double f1 = f(x1);
  if (!(scale > 0.0)) scale = 1.0 + std::max(std::abs(f0), std::abs(f1));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ConvexityProbeResult res;
  for (int s = 0; s < samples; ++s) {
    const double t = unit(rng);
    const std::array<double, 2> x{t * x1[0] + (1.0 - t) * x0[0], t * x1[1] + (1.0 - t) * x0[1]};
    const double violation = f(x) - (t * f1 + (1.0 - t) * f0);
    res.worst_violation = std::max(res.worst_violation, violation);
  }
  res.pass = res.worst_violation <= 1e-10 * scale;
  return res;
}

}  // namespace linefit

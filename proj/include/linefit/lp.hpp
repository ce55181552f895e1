#pragma once

// L^p line fits for 1 < p < inf.
//
// Vertical distance: f(a, b) is strictly convex. The minimizer is found by
// nested monotone bisection: for fixed a the optimal intercept b*(a) is the
// root of the decreasing function df/db, and a* is the root of the increasing
// envelope derivative a -> df/da(a, b*(a)). Both roots are bracketed a priori,
// so the result does not depend on a starting point. A damped Newton method on
// a smoothed objective is run from random starts as an independent audit of
// uniqueness.
//
// Orthogonal distance: for each direction the optimal offset is unique and
// found the same way; the direction is located by an angle scan followed by
// golden-section refinement and bisection on the angular derivative.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "linefit/error.hpp"
#include "linefit/geometry.hpp"
#include "linefit/report.hpp"

namespace linefit {

struct LpSolverConfig {
  double p = 2.0;
  /// Stationarity threshold relative to 1 + f.
  double grad_tol = 1e-9;
  int max_iter = 500;
  int angle_samples = 720;
  /// Smoothing radius for the Newton audit when p < 2, relative to the data scale.
  double smoothing_eps = 1e-3;
  std::uint64_t seed = 0x5eed;
  int multistarts = 8;
  /// Relative objective band for reporting several geometric optima.
  double tie_tol = 1e-9;

  void validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "p must be finite and > 1");
    if (!(grad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "grad_tol must be > 0");
    if (angle_samples < 8) throw Error(ErrorCode::InvalidArgument, "angle_samples must be >= 8");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
    if (multistarts < 0) throw Error(ErrorCode::InvalidArgument, "multistarts must be >= 0");
    if (!(smoothing_eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "smoothing_eps must be > 0");
  }
};

/// Analytic gradient of f = sum mult |r|^p. Parameters are (a, b) for
/// vertical distance and (c, theta) for orthogonal distance.
inline std::array<double, 2> lp_gradient(const PointSet& ps, std::array<double, 2> params, double p,
                                         DistanceKind kind) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be > 1");
  std::array<double, 2> g{0.0, 0.0};
  if (kind == DistanceKind::vertical) {
    const double a = params[0], b = params[1];
    for (const Point& q : ps) {
      const double r = q.y - a * q.x - b;
      const double w = static_cast<double>(q.mult) * p * std::copysign(std::pow(std::abs(r), p - 1.0), r);
      g[0] -= w * q.x;
      g[1] -= w;
    }
  } else {
    const double c = params[0], theta = params[1];
    const Vec2 n{std::cos(theta), std::sin(theta)};
    const Vec2 t = quarter_turn(n);
    for (const Point& q : ps) {
      const double r = c - dot(q.pos(), n);
      const double w = static_cast<double>(q.mult) * p * std::copysign(std::pow(std::abs(r), p - 1.0), r);
      g[0] += w;
      g[1] -= w * dot(q.pos(), t);
    }
  }
  return g;
}

namespace detail {

struct Weighted1D {
  double v;
  double m;
};

// Sign of sum m sign(v - c) |v - c|^(p-1), scaled by the largest |v - c| so
// that large p neither overflows nor underflows.
inline double offset_balance(std::span<const Weighted1D> vals, double c, double p) {
  double big = 0.0;
  for (const auto& w : vals) big = std::max(big, std::abs(w.v - c));
  if (big == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& w : vals) {
    const double r = (w.v - c) / big;
    s += w.m * std::copysign(std::pow(std::abs(r), p - 1.0), r);
  }
  return s;
}

// Root of a function that is >= 0 at lo and <= 0 at hi, bisected until the
// floating-point bracket cannot shrink further.
template <class F>
double bisect_decreasing(F&& fn, double lo, double hi, int* iterations = nullptr) {
  int it = 0;
  if (lo > hi) std::swap(lo, hi);
  if (fn(lo) <= 0.0) return lo;
  if (fn(hi) >= 0.0) return hi;
  for (; it < 2200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double v = fn(mid);
    if (v == 0.0) {
      lo = hi = mid;
      break;
    }
    (v > 0.0 ? lo : hi) = mid;
  }
  if (iterations) *iterations += it;
  return lo + 0.5 * (hi - lo);
}

inline double optimal_offset_1d(std::span<const Weighted1D> vals, double p, double lo, double hi) {
  return bisect_decreasing([&](double c) { return offset_balance(vals, c, p); }, lo, hi);
}

inline double sum_pow(std::span<const Weighted1D> vals, double c, double p) {
  double s = 0.0;
  for (const auto& w : vals) s += w.m * std::pow(std::abs(w.v - c), p);
  return s;
}

}  // namespace detail

/// Unique minimizer of c -> sum mult |c - <p_j, n>|^p inside [lo, hi]. Any
/// bracket containing the projection range yields the same offset.
inline double lp_optimal_offset(const PointSet& ps, Vec2 normal, double p, double lo, double hi) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be > 1");
  const double len = norm(normal);
  if (!(len > 0.0)) throw Error(ErrorCode::InvalidArgument, "normal vector must be nonzero");
  const Vec2 n = (1.0 / len) * normal;
  std::vector<detail::Weighted1D> vals;
  for (const Point& q : ps) vals.push_back({dot(q.pos(), n), static_cast<double>(q.mult)});
  return detail::optimal_offset_1d(vals, p, lo, hi);
}

namespace detail {

struct Centered {
  Vec2 center;
  std::vector<Vec2> q;
  std::vector<double> m;
};

inline Centered center_points(const PointSet& ps) {
  Centered c;
  c.center = ps.stats().centroid;
  for (const Point& p : ps) {
    c.q.push_back(p.pos() - c.center);
    c.m.push_back(static_cast<double>(p.mult));
  }
  return c;
}

// Vertical problem in centered coordinates.
struct VerticalLp {
  const Centered& data;
  double p;
  mutable int inner_iterations = 0;

  std::vector<Weighted1D> intercepts(double a) const {
    std::vector<Weighted1D> beta;
    beta.reserve(data.q.size());
    for (std::size_t i = 0; i < data.q.size(); ++i) beta.push_back({data.q[i].y - a * data.q[i].x, data.m[i]});
    return beta;
  }

  double best_intercept(double a) const {
    const auto beta = intercepts(a);
    double lo = beta.front().v, hi = lo;
    for (const auto& w : beta) {
      lo = std::min(lo, w.v);
      hi = std::max(hi, w.v);
    }
    return bisect_decreasing([&](double b) { return offset_balance(beta, b, p); }, lo, hi, &inner_iterations);
  }

  // Negative multiple of the envelope derivative d/da f(a, b*(a)).
  double slope_balance(double a) const {
    const double b = best_intercept(a);
    double big = 0.0;
    for (std::size_t i = 0; i < data.q.size(); ++i) big = std::max(big, std::abs(data.q[i].y - a * data.q[i].x - b));
    if (big == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < data.q.size(); ++i) {
      const double r = (data.q[i].y - a * data.q[i].x - b) / big;
      s += data.m[i] * data.q[i].x * std::copysign(std::pow(std::abs(r), p - 1.0), r);
    }
    return s;
  }

  double value(double a, double b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < data.q.size(); ++i) {
      s += data.m[i] * std::pow(std::abs(data.q[i].y - a * data.q[i].x - b), p);
    }
    return s;
  }
};

// Damped Newton on sum m (r^2 + eps^2)^(p/2), eps shrinking geometrically to
// zero for p < 2. Returns centered (a, b).
inline std::array<double, 2> newton_audit(const Centered& d, double p, std::array<double, 2> x, double eps0,
                                          int max_iter) {
  const double eps_floor = p < 2.0 ? eps0 * 1e-9 : 0.0;
  double eps = p < 2.0 ? eps0 : 0.0;
  auto value = [&](double a, double b, double e) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.q.size(); ++i) {
      const double r = d.q[i].y - a * d.q[i].x - b;
      s += d.m[i] * std::pow(r * r + e * e, 0.5 * p);
    }
    return s;
  };
  int iter = 0;
  while (true) {
    const bool last_stage = eps <= eps_floor;
    for (int k = 0; (last_stage || k < 60) && iter < max_iter; ++k, ++iter) {
      double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
      for (std::size_t i = 0; i < d.q.size(); ++i) {
        const double xi = d.q[i].x;
        const double r = d.q[i].y - x[0] * xi - x[1];
        const double s2 = r * r + eps * eps;
        if (s2 == 0.0) continue;
        const double d1 = p * r * std::pow(s2, 0.5 * p - 1.0);
        const double d2 = p * std::pow(s2, 0.5 * p - 2.0) * ((p - 1.0) * r * r + eps * eps);
        ga -= d.m[i] * d1 * xi;
        gb -= d.m[i] * d1;
        haa += d.m[i] * d2 * xi * xi;
        hab += d.m[i] * d2 * xi;
        hbb += d.m[i] * d2;
      }
      const double mu = 1e-14 * (haa + hbb) + 1e-300;
      haa += mu;
      hbb += mu;
      const double det = haa * hbb - hab * hab;
      if (!(det > 0.0) || !std::isfinite(det)) break;
      const double da = -(hbb * ga - hab * gb) / det;
      const double db = -(haa * gb - hab * ga) / det;
      const double f0 = value(x[0], x[1], eps);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        const double f1 = value(x[0] + t * da, x[1] + t * db, eps);
        if (f1 < f0) {
          x = {x[0] + t * da, x[1] + t * db};
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (eps <= eps_floor || iter >= max_iter) break;
    eps *= 0.1;
    if (eps < eps_floor) eps = eps_floor;
  }
  return x;
}

inline double data_scale(const Centered& d) {
  double s = 0.0;
  for (const Vec2& q : d.q) s = std::max({s, std::abs(q.x), std::abs(q.y)});
  return s > 0.0 ? s : 1.0;
}

}  // namespace detail

/// Unique L^p line under vertical distance.
inline FitReport fit_algebraic_lp(const PointSet& ps, const LpSolverConfig& cfg) {
  cfg.validate();
  require_min_points(ps, 2, "algebraic Lp fit");
  FitReport r;
  r.solver = "lp.algebraic";
  r.norm = Norm::lp(cfg.p);
  r.kind = DistanceKind::vertical;
  const double tol = default_tolerance(ps);

  if (ps.all_x_equal()) {
    std::vector<detail::Weighted1D> ys;
    double lo = ps[0].y, hi = ps[0].y;
    for (const Point& q : ps) {
      ys.push_back({q.y, static_cast<double>(q.mult)});
      lo = std::min(lo, q.y);
      hi = std::max(hi, q.y);
    }
    const double b0 = detail::optimal_offset_1d(ys, cfg.p, lo, hi);
    r.optimal_set = VerticalDegenerate{ps[0].x, b0, b0};
    r.objective = detail::sum_pow(ys, b0, cfg.p);
    r.diagnostics.notes.push_back("all x equal: any slope through the optimal intercept");
    attach_residuals(r, ps, tol);
    return r;
  }

  const detail::Centered data = detail::center_points(ps);
  detail::VerticalLp prob{data, cfg.p};

  double a_lo = std::numeric_limits<double>::infinity();
  double a_hi = -a_lo;
  for (std::size_t j = 1; j < ps.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      if (ps[j].x == ps[k].x) continue;
      const double s = (ps[j].y - ps[k].y) / (ps[j].x - ps[k].x);
      a_lo = std::min(a_lo, s);
      a_hi = std::max(a_hi, s);
    }
  }
  int outer = 0;
  // slope_balance is decreasing in a.
  const double a = detail::bisect_decreasing([&](double s) { return prob.slope_balance(s); }, a_lo, a_hi, &outer);
  const double b = prob.best_intercept(a);
  double best_val = prob.value(a, b);
  std::array<double, 2> best{a, b};

  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(best_val)) {
    throw NoConvergenceError("algebraic Lp bisection produced a non-finite iterate", {a, b}, best_val,
                             std::numeric_limits<double>::quiet_NaN());
  }

  // Multi-start audit.
  const double scale = detail::data_scale(data);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double spread = 0.0;
  const double slope_span = std::max(1.0, a_hi - a_lo);
  for (int s = 0; s < cfg.multistarts; ++s) {
    const std::array<double, 2> start{a + slope_span * unit(rng), b + scale * unit(rng)};
    const std::array<double, 2> x = detail::newton_audit(data, cfg.p, start, cfg.smoothing_eps * scale, cfg.max_iter);
    if (!std::isfinite(x[0]) || !std::isfinite(x[1])) continue;
    spread = std::max(spread, std::hypot(x[0] - a, (x[1] - b) / scale));
    const double v = prob.value(x[0], x[1]);
    if (v < best_val - 1e-12 * best_val) {
      best_val = v;
      best = x;
    }
  }
  r.diagnostics.multistart_spread = spread;
  if (spread > 1e-7) {
    r.diagnostics.near_degenerate = true;
    r.diagnostics.notes.push_back("multi-start spread above 1e-7");
  }

  const Vec2 c0 = data.center;
  const LineSI line{best[0], best[1] + c0.y - best[0] * c0.x};
  r.optimal_set = UniqueLine{line};
  r.objective = objective(ps, line, r.norm, r.kind);
  const auto g = lp_gradient(ps, {line.a, line.b}, cfg.p, r.kind);
  r.diagnostics.gradient_norm = std::hypot(g[0], g[1]);
  r.diagnostics.iterations = outer + prob.inner_iterations;
  if (!(r.diagnostics.gradient_norm <= cfg.grad_tol * (1.0 + r.objective))) {
    // The bracket has collapsed to adjacent doubles; near-kink gradients for p
    // close to 1 cannot be resolved further.
    r.diagnostics.precision_limited = true;
    r.diagnostics.notes.push_back("stopped on a collapsed bracket above the gradient threshold");
  }
  attach_residuals(r, ps, tol);
  return r;
}

namespace detail {

struct AngleProblem {
  const Centered& data;
  double p;

  std::vector<Weighted1D> projections(double theta) const {
    const Vec2 n{std::cos(theta), std::sin(theta)};
    std::vector<Weighted1D> g;
    g.reserve(data.q.size());
    for (std::size_t i = 0; i < data.q.size(); ++i) g.push_back({dot(data.q[i], n), data.m[i]});
    return g;
  }

  // Optimal centered offset and objective for direction theta.
  std::pair<double, double> solve(double theta) const {
    const auto g = projections(theta);
    double lo = g.front().v, hi = lo;
    for (const auto& w : g) {
      lo = std::min(lo, w.v);
      hi = std::max(hi, w.v);
    }
    const double c = optimal_offset_1d(g, p, lo, hi);
    return {c, sum_pow(g, c, p)};
  }

  double value(double theta) const { return solve(theta).second; }

  // Sign-preserving multiple of dh/dtheta, which equals df/dtheta at c_theta.
  double derivative(double theta) const {
    const auto [c, v] = solve(theta);
    const Vec2 n{std::cos(theta), std::sin(theta)};
    const Vec2 t = quarter_turn(n);
    double big = 0.0;
    for (const Vec2& q : data.q) big = std::max(big, std::abs(c - dot(q, n)));
    if (big == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < data.q.size(); ++i) {
      const double r = (c - dot(data.q[i], n)) / big;
      s -= data.m[i] * std::copysign(std::pow(std::abs(r), p - 1.0), r) * dot(data.q[i], t);
    }
    return s;
  }
};

}  // namespace detail

/// L^p lines under orthogonal distance. Every distinct basin of the angle scan
/// whose refined value ties the global minimum is reported.
inline FitReport fit_geometric_lp(const PointSet& ps, const LpSolverConfig& cfg) {
  cfg.validate();
  require_min_points(ps, 2, "geometric Lp fit");
  FitReport r;
  r.solver = "lp.geometric";
  r.norm = Norm::lp(cfg.p);
  r.kind = DistanceKind::orthogonal;
  const double tol = default_tolerance(ps);

  if (ps.all_identical()) {
    r.optimal_set = AllLinesThroughPoint{ps[0].pos()};
    r.objective = 0.0;
    r.diagnostics.notes.push_back("all points coincide");
    attach_residuals(r, ps, tol);
    return r;
  }

  const detail::Centered data = detail::center_points(ps);
  const detail::AngleProblem prob{data, cfg.p};
  const int n = cfg.angle_samples;
  const double step = std::numbers::pi / n;
  std::vector<double> vals(n);
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = 0.0;
  for (int i = 0; i < n; ++i) {
    vals[i] = prob.value(i * step);
    vmin = std::min(vmin, vals[i]);
    vmax = std::max(vmax, vals[i]);
  }
  if (!std::isfinite(vmin) || !std::isfinite(vmax)) {
    throw NoConvergenceError("non-finite objective in the angle scan", {0.0, 0.0}, vmin,
                             std::numeric_limits<double>::quiet_NaN());
  }
  const Vec2 center = data.center;
  auto to_line = [&](double theta, double c_centered) {
    const Vec2 nn{std::cos(theta), std::sin(theta)};
    return LineHesse::from_normal(nn, c_centered + dot(center, nn));
  };

  if (vmax - vmin <= cfg.tie_tol * (1.0 + vmin)) {
    // Flat profile: test whether the per-angle lines share a point.
    double sxx = 0, sxy = 0, syy = 0, bx = 0, by = 0;
    std::vector<std::pair<Vec2, double>> lines;
    for (int i = 0; i < n; ++i) {
      const double th = i * step;
      const Vec2 nn{std::cos(th), std::sin(th)};
      const double c = prob.solve(th).first;
      lines.emplace_back(nn, c);
      sxx += nn.x * nn.x;
      sxy += nn.x * nn.y;
      syy += nn.y * nn.y;
      bx += nn.x * c;
      by += nn.y * c;
    }
    const double det = sxx * syy - sxy * sxy;
    const Vec2 z{(syy * bx - sxy * by) / det, (sxx * by - sxy * bx) / det};
    double worst = 0.0;
    for (const auto& [nn, c] : lines) worst = std::max(worst, std::abs(dot(z, nn) - c));
    if (worst <= tol) {
      r.optimal_set = AllLinesThroughPoint{z + center};
      r.diagnostics.notes.push_back("objective is constant in the direction; optimal lines share a point");
    } else {
      LineFamilies fams;
      for (int i = 0; i < n; ++i) {
        const LineHesse l = to_line(i * step, lines[i].second);
        fams.families.push_back({l.normal(), l.c(), l.c()});
      }
      r.optimal_set = std::move(fams);
      r.diagnostics.notes.push_back("objective is constant in the direction; listing the scanned lines");
    }
    r.objective = vmin;
    r.diagnostics.at_tolerance = vmax != vmin;
    attach_residuals(r, ps, tol);
    return r;
  }

  struct Basin {
    double theta;
    double value;
  };
  std::vector<Basin> basins;
  int refinements = 0;
  constexpr double inv_phi = 0.6180339887498949;
  for (int i = 0; i < n; ++i) {
    const double left = vals[(i + n - 1) % n];
    const double right = vals[(i + 1) % n];
    if (!(vals[i] <= left && vals[i] <= right)) continue;
    if (vals[i] == left && vals[i] == right) continue;  // interior of a plateau
    double lo = (i - 1) * step;
    double hi = (i + 1) * step;
    // Bisection on the angular derivative when it brackets the basin, golden
    // section otherwise.
    if (prob.derivative(lo) < 0.0 && prob.derivative(hi) > 0.0) {
      const double theta =
          detail::bisect_decreasing([&](double t) { return -prob.derivative(t); }, lo, hi, &refinements);
      basins.push_back({theta, prob.value(theta)});
      continue;
    }
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = prob.value(x1), f2 = prob.value(x2);
    for (int it = 0; it < cfg.max_iter && hi - lo > 1e-6 * step; ++it, ++refinements) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = prob.value(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = prob.value(x2);
      }
    }
    const double theta = 0.5 * (lo + hi);
    basins.push_back({theta, prob.value(theta)});
  }
  if (basins.empty()) {
    throw NoConvergenceError("angle scan found no local minimum", {0.0, 0.0}, vmin,
                             std::numeric_limits<double>::quiet_NaN());
  }

  double best = std::numeric_limits<double>::infinity();
  for (const Basin& b : basins) best = std::min(best, b.value);
  LineFamilies fams;
  for (const Basin& b : basins) {
    if (b.value > best + cfg.tie_tol * (1.0 + best)) continue;
    if (b.value != best) r.diagnostics.at_tolerance = true;
    const LineHesse l = to_line(b.theta, prob.solve(b.theta).first);
    const bool dup = std::any_of(fams.families.begin(), fams.families.end(), [&](const LineFamily& f) {
      return norm(f.normal - l.normal()) <= 1e-7 && std::abs(f.c_lo - l.c()) <= 1e-7 * (1.0 + std::abs(l.c()));
    });
    if (!dup) fams.families.push_back({l.normal(), l.c(), l.c()});
  }
  r.optimal_set = std::move(fams);
  r.objective = objective(ps, r.representative(), r.norm, r.kind);
  r.diagnostics.iterations = refinements;

  const LineHesse rep = as_hesse(r.representative());
  const auto g = lp_gradient(ps, {rep.c(), rep.theta()}, cfg.p, r.kind);
  r.diagnostics.gradient_norm = std::hypot(g[0], g[1]);
  if (!(r.diagnostics.gradient_norm <= cfg.grad_tol * (1.0 + r.objective))) {
    r.diagnostics.precision_limited = true;
    r.diagnostics.notes.push_back("stopped on a collapsed bracket above the gradient threshold");
  }
  if (std::abs(cfg.p / 2.0 - std::round(cfg.p / 2.0)) > 0.0) {
    r.diagnostics.notes.push_back("basins are those resolved by the angle scan");
  }
  attach_residuals(r, ps, tol);
  return r;
}

}  // namespace linefit

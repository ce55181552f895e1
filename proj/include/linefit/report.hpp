#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "linefit/geometry.hpp"

namespace linefit {

// ---------------------------------------------------------------------------
// Optimal sets
// ---------------------------------------------------------------------------

struct UniqueLine {
  Line line;
  friend bool operator==(const UniqueLine&, const UniqueLine&) = default;
};

/// Convex polytope of (a, b) parameters; vertices in counter-clockwise order
/// (two vertices describe a segment).
struct ParameterPolytope {
  std::vector<LineSI> vertices;
  friend bool operator==(const ParameterPolytope&, const ParameterPolytope&) = default;
};

/// Parallel lines {<q, normal> = c : c_lo <= c <= c_hi}.
struct LineFamily {
  Vec2 normal;
  double c_lo = 0.0;
  double c_hi = 0.0;

  LineHesse at(double c) const { return LineHesse::from_canonical(normal, c); }
  bool single() const { return c_lo == c_hi; }

  friend bool operator==(const LineFamily&, const LineFamily&) = default;
};

struct LineFamilies {
  std::vector<LineFamily> families;
  friend bool operator==(const LineFamilies&, const LineFamilies&) = default;
};

/// Every line through center is optimal.
struct AllLinesThroughPoint {
  Vec2 center;
  friend bool operator==(const AllLinesThroughPoint&, const AllLinesThroughPoint&) = default;
};

/// All-x-equal algebraic input: lines y = a (x - x0) + b for every slope a and
/// every b in [b_lo, b_hi].
struct VerticalDegenerate {
  double x0 = 0.0;
  double b_lo = 0.0;
  double b_hi = 0.0;
  friend bool operator==(const VerticalDegenerate&, const VerticalDegenerate&) = default;
};

using OptimalSet =
    std::variant<UniqueLine, ParameterPolytope, LineFamilies, AllLinesThroughPoint, VerticalDegenerate>;

inline const char* optimal_set_kind(const OptimalSet& s) {
  constexpr const char* names[] = {"unique_line", "parameter_polytope", "line_families",
                                   "all_lines_through_point", "vertical_degenerate"};
  return names[s.index()];
}

/// Number of distinct optimal lines, or nullopt when there are infinitely many.
inline std::optional<std::size_t> line_count(const OptimalSet& s) {
  if (std::holds_alternative<UniqueLine>(s)) return 1;
  if (const auto* poly = std::get_if<ParameterPolytope>(&s)) {
    if (poly->vertices.size() == 1) return 1;
    return std::nullopt;
  }
  if (const auto* fam = std::get_if<LineFamilies>(&s)) {
    for (const LineFamily& f : fam->families) {
      if (!f.single()) return std::nullopt;
    }
    return fam->families.size();
  }
  return std::nullopt;
}

/// Sample lines from an optimal set: every vertex / family endpoint, plus
/// `fan` evenly spaced members of each continuous family.
inline std::vector<Line> representatives(const OptimalSet& s, std::size_t fan = 5) {
  std::vector<Line> out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniqueLine>) {
          out.push_back(v.line);
        } else if constexpr (std::is_same_v<T, ParameterPolytope>) {
          for (const LineSI& l : v.vertices) out.emplace_back(l);
        } else if constexpr (std::is_same_v<T, LineFamilies>) {
          for (const LineFamily& f : v.families) {
            if (f.single() || fan < 2) {
              out.emplace_back(f.at(f.c_lo));
              continue;
            }
            for (std::size_t i = 0; i < fan; ++i) {
              const double t = static_cast<double>(i) / static_cast<double>(fan - 1);
              out.emplace_back(f.at(f.c_lo + t * (f.c_hi - f.c_lo)));
            }
          }
        } else if constexpr (std::is_same_v<T, AllLinesThroughPoint>) {
          const std::size_t k = std::max<std::size_t>(fan, 1);
          for (std::size_t i = 0; i < k; ++i) {
            const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(k);
            const Vec2 n{std::cos(theta), std::sin(theta)};
            out.emplace_back(LineHesse::from_normal(n, dot(v.center, n)));
          }
        } else {
          const std::size_t k = std::max<std::size_t>(fan, 1);
          for (std::size_t i = 0; i < k; ++i) {
            const double a = k == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(k - 1);
            const double b = v.b_lo + (k == 1 ? 0.0 : (v.b_hi - v.b_lo) * static_cast<double>(i) / static_cast<double>(k - 1));
            out.emplace_back(LineSI{a, b - a * v.x0});
          }
        }
      },
      s);
  return out;
}

// ---------------------------------------------------------------------------
// Certificates and diagnostics
// ---------------------------------------------------------------------------

/// Line through input points j and k (j > k) examined by the L1 solvers.
struct CandidateLine {
  std::size_t j = 0;
  std::size_t k = 0;
  std::optional<LineSI> si;
  LineHesse hesse;
  double objective = 0.0;
  IndexDecomposition decomposition;
  bool certified = false;
  bool optimal = false;

  friend bool operator==(const CandidateLine&, const CandidateLine&) = default;
};

/// Equioscillation witness for an L-infinity optimum: the line is parallel to
/// hull edge (k1, k2) and the residual magnitude `value` is attained at k1,
/// k2 (one sign) and k3 (the other sign).
struct LinfCertificate {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t k3 = 0;
  double value = 0.0;

  friend bool operator==(const LinfCertificate&, const LinfCertificate&) = default;
};

struct Diagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;
  /// Some optimal member was admitted by the tie band rather than exactly.
  bool at_tolerance = false;
  bool near_degenerate = false;
  /// The optimizer stopped on a collapsed floating-point bracket rather than
  /// on the gradient threshold.
  bool precision_limited = false;
  double multistart_spread = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> notes;

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

struct FitReport {
  std::string solver;
  Norm norm;
  DistanceKind kind = DistanceKind::vertical;
  double objective = 0.0;
  OptimalSet optimal_set = UniqueLine{LineSI{}};
  /// Signed residuals at the representative line, input order.
  std::vector<double> residuals;
  IndexDecomposition decomposition;
  /// L1 solvers: every examined point pair.
  std::vector<CandidateLine> candidates;
  std::vector<LinfCertificate> linf_certificates;
  Diagnostics diagnostics;

  Line representative() const { return representatives(optimal_set, 1).front(); }

  friend bool operator==(const FitReport&, const FitReport&) = default;
};

/// Fills residuals and decomposition from the representative line.
inline void attach_residuals(FitReport& r, const PointSet& ps, double tol) {
  const Line rep = r.representative();
  r.residuals = signed_residuals(ps, rep, r.kind);
  r.decomposition = decompose(ps, rep, r.kind, tol);
  r.diagnostics.tolerance = tol;
}

}  // namespace linefit

#include <catch_amalgamated.hpp>

#include <cmath>

#include "linefit/l1.hpp"
#include "linefit/linf.hpp"
#include "linefit/oracle.hpp"
#include "support.hpp"

using namespace linefit;
using namespace linefit::testing;
using Catch::Approx;

TEST_CASE("exhaustive oracle on the goldens", "[oracle]") {
  CHECK(exhaustive_pairs_oracle(four_points(), Norm::l1(), DistanceKind::vertical).objective == 1.5);
  CHECK(exhaustive_pairs_oracle(five_points(), Norm::l1(), DistanceKind::vertical).objective == 4.0);
  CHECK(exhaustive_pairs_oracle(five_points(), Norm::l1(), DistanceKind::orthogonal).objective ==
        Approx(8.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(exhaustive_pairs_oracle(four_points(), Norm::linf(), DistanceKind::vertical).objective == 0.5);
  CHECK(exhaustive_pairs_oracle(five_points(), Norm::linf(), DistanceKind::orthogonal).objective == 1.0);
}

TEST_CASE("exhaustive oracle limits", "[oracle]") {
  std::vector<Point> many;
  for (int i = 0; i < 13; ++i) many.push_back({double(i), double(i * i % 7)});
  try {
    exhaustive_pairs_oracle(PointSet(many), Norm::l1(), DistanceKind::vertical);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
  CHECK_THROWS_AS(exhaustive_pairs_oracle(four_points(), Norm::l2(), DistanceKind::vertical), Error);
  // Multiplicity counts toward the limit.
  CHECK_THROWS_AS(exhaustive_pairs_oracle(PointSet({{0, 0, 10}, {1, 1, 3}}), Norm::l1(), DistanceKind::vertical),
                  Error);
}

TEST_CASE("grid oracle brackets the known optima", "[oracle]") {
  const OracleResult g = grid_oracle(four_points(), Norm::l2(), DistanceKind::vertical);
  const double exact = vertical_power_sum(four_points(), 0.55, 0.3, 2.0);
  CHECK(g.objective >= exact);
  CHECK(g.objective - exact <= g.error_bound);
  CHECK(g.level_objectives.size() == 6);
  for (std::size_t i = 1; i < g.level_objectives.size(); ++i) {
    CHECK(g.level_objectives[i] <= g.level_objectives[i - 1]);
  }

  const OracleResult o = grid_oracle(five_points(), Norm::l1(), DistanceKind::orthogonal);
  CHECK(o.objective >= 8.0 / std::sqrt(5.0));
  CHECK(o.objective - 8.0 / std::sqrt(5.0) <= o.error_bound);
}

TEST_CASE("grid specification validation", "[oracle]") {
  GridSpec g = default_grid(four_points(), DistanceKind::vertical);
  g.resolution = 4;
  CHECK_THROWS_AS(grid_oracle(four_points(), Norm::l1(), DistanceKind::vertical, g), Error);
  g = default_grid(four_points(), DistanceKind::vertical);
  g.lo[0] = g.hi[0] + 1;
  CHECK_THROWS_AS(grid_oracle(four_points(), Norm::l1(), DistanceKind::vertical, g), Error);
}

TEST_CASE("default grid contains the optimum", "[oracle]") {
  const GridSpec g = default_grid(four_points(), DistanceKind::vertical);
  CHECK(g.lo[0] <= 0.55);
  CHECK(g.hi[0] >= 0.55);
  CHECK(g.lo[1] <= 0.3);
  CHECK(g.hi[1] >= 0.3);
}

TEST_CASE("convexity probe detects a concave function", "[oracle]") {
  auto concave = [](std::array<double, 2> x) { return -(x[0] * x[0] + x[1] * x[1]); };
  CHECK_FALSE(convexity_probe(concave, {-1, 0}, {1, 0}, 100).pass);
  auto convex = [](std::array<double, 2> x) { return std::abs(x[0]) + x[1] * x[1]; };
  CHECK(convexity_probe(convex, {-1, 3}, {2, -1}, 1000).pass);
}

TEST_CASE("property: solvers and oracles agree", "[oracle][property]") {
  Rng rng(71);
  for (int t = 0; t < 40; ++t) {
    const PointSet ps = random_points(rng, {.min_points = 3, .max_points = 6, .multiplicities = true, .max_total = 8});
    CHECK(fit_algebraic_l1(ps).objective == exhaustive_pairs_oracle(ps, Norm::l1(), DistanceKind::vertical).objective);
    CHECK(fit_geometric_l1(ps).objective ==
          exhaustive_pairs_oracle(ps, Norm::l1(), DistanceKind::orthogonal).objective);
    CHECK(fit_algebraic_linf(ps).objective ==
          exhaustive_pairs_oracle(ps, Norm::linf(), DistanceKind::vertical).objective);
    CHECK(fit_geometric_linf(ps).objective ==
          exhaustive_pairs_oracle(ps, Norm::linf(), DistanceKind::orthogonal).objective);
  }
}

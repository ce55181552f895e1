#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "linefit/geometry.hpp"
#include "support.hpp"

using namespace linefit;
using namespace linefit::testing;
using Catch::Approx;

TEST_CASE("vertical residual sign and magnitude", "[geometry]") {
  CHECK(vertical_residual({1, 1}, {1, 0}) == 0.0);
  CHECK(vertical_residual({0, 1}, {0, 0}) == 1.0);
  // Hand substitution: 3/2 - (33/20 + 3/10) = -9/20.
  CHECK(vertical_residual({3, 1.5}, {11.0 / 20.0, 3.0 / 10.0}) == Approx(-9.0 / 20.0).margin(1e-15));
}

TEST_CASE("orthogonal residual follows c - <p, n>", "[geometry]") {
  const double half_pi = std::numbers::pi / 2;
  CHECK(orthogonal_residual({0, 0}, LineHesse::from_angle(half_pi, 0)) == Approx(0.0).margin(1e-15));
  CHECK(orthogonal_residual({2, 3}, LineHesse::from_angle(0, 2)) == 0.0);
  CHECK(orthogonal_residual({0, 1}, LineHesse::from_angle(half_pi, 0)) == Approx(-1.0));
}

TEST_CASE("decomposition of the symmetric set about y = 0", "[geometry]") {
  const auto d = decompose(five_points(), LineSI{0, 0}, DistanceKind::vertical, 0.0);
  CHECK(d.plus == std::vector<std::size_t>{0, 4});
  CHECK(d.zero == std::vector<std::size_t>{2});
  CHECK(d.minus == std::vector<std::size_t>{1, 3});
  CHECK(d.w_plus == 2);
  CHECK(d.w_zero == 1);
  CHECK(d.w_minus == 2);
}

TEST_CASE("decomposition edge cases", "[geometry]") {
  const PointSet ps = four_points();
  const auto below = decompose(ps, LineSI{0, -100}, DistanceKind::vertical, 0.0);
  CHECK(below.minus.empty());
  CHECK(below.zero.empty());
  CHECK(below.w_plus == 4);

  const PointSet line({{0, 1}, {1, 3}, {2, 5}});
  const auto on = decompose(line, LineSI{2, 1}, DistanceKind::vertical, 0.0);
  CHECK(on.zero.size() == 3);

  // Orthogonal orientation: J+ holds <p, n> > c.
  const auto orth = decompose(five_points(), LineHesse::from_normal({0, 1}, 0), DistanceKind::orthogonal, 0.0);
  CHECK(orth.plus == std::vector<std::size_t>{0, 4});
  CHECK_THROWS_AS(decompose(ps, LineSI{}, DistanceKind::vertical, -1.0), Error);
}

TEST_CASE("objective goldens", "[geometry]") {
  const PointSet four = four_points();
  CHECK(objective(four, LineSI{1, 0}, Norm::l1(), DistanceKind::vertical) == 1.5);
  CHECK(objective(four, LineSI{-0.5, 3}, Norm::l1(), DistanceKind::vertical) == 4.5);
  const LineHesse g31 = LineHesse::through({0, 0}, {-2, 1});
  CHECK(objective(five_points(), g31, Norm::l1(), DistanceKind::orthogonal) ==
        Approx(8.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(objective(four, LineSI{0.5, 0.5}, Norm::linf(), DistanceKind::vertical) == 0.5);
  CHECK_THROWS_AS(objective(four, LineHesse::from_normal({1, 0}, 1), Norm::l1(), DistanceKind::vertical), Error);
}

TEST_CASE("scatter statistics", "[geometry]") {
  const ScatterStats& s = scatter(four_points());
  CHECK(s.centroid.x == 1.5);
  CHECK(s.centroid.y == 1.125);
  CHECK(s.sxx == Approx(5.0).epsilon(1e-15));
  CHECK(s.syy == Approx(35.0 / 16.0).epsilon(1e-15));
  CHECK(s.sxy == Approx(11.0 / 4.0).epsilon(1e-15));

  const ScatterStats& one = scatter(PointSet({{7, -3, 4}}));
  CHECK(one.centroid == Vec2{7, -3});
  CHECK(one.sxx == 0.0);
  CHECK(one.sxy == 0.0);
  CHECK(one.syy == 0.0);

  const ScatterStats& pair = scatter(PointSet({{-1, 0}, {1, 0}}));
  CHECK(pair.centroid == Vec2{0, 0});
  CHECK(pair.sxx == 2.0);
  CHECK(pair.sxy == 0.0);
  CHECK(pair.syy == 0.0);
}

TEST_CASE("multiplicity equals repetition", "[geometry]") {
  const PointSet folded({{0, 0, 3}, {1, 2}});
  const PointSet repeated({{0, 0}, {0, 0}, {0, 0}, {1, 2}});
  CHECK(folded.total_multiplicity() == 4);
  CHECK(scatter(folded).sxx == Approx(scatter(repeated).sxx));
  CHECK(scatter(folded).sxy == Approx(scatter(repeated).sxy));
  CHECK(objective(folded, LineSI{1, 0.5}, Norm::lp(1.7), DistanceKind::vertical) ==
        Approx(objective(repeated, LineSI{1, 0.5}, Norm::lp(1.7), DistanceKind::vertical)));
}

TEST_CASE("point set validation", "[geometry]") {
  CHECK_THROWS_AS(PointSet({}), Error);
  CHECK_THROWS_AS(PointSet({{0, std::nan("")}}), Error);
  CHECK_THROWS_AS(PointSet({{0, 0, 0}}), Error);
  CHECK_THROWS_AS(PointSet({{INFINITY, 0}}), Error);
  CHECK_THROWS_AS(Norm::lp(0.5), Error);
  try {
    require_min_points(PointSet({{0, 0}}), 2, "test");
    FAIL("expected InsufficientPoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientPoints);
  }
}

TEST_CASE("hesse form is canonical", "[geometry]") {
  const LineHesse a = LineHesse::from_normal({0, -2}, 3);
  CHECK(a.normal() == Vec2{0, 1});
  CHECK(a.c() == -1.5);
  const LineHesse b = LineHesse::from_normal({-1, 0}, 2);
  CHECK(b.normal() == Vec2{1, 0});
  CHECK(b.c() == -2.0);
  CHECK(b.theta() == 0.0);
  CHECK(b.is_vertical());
  CHECK_THROWS_AS(b.to_si(), Error);
  CHECK_THROWS_AS(LineHesse::from_normal({0, 0}, 1), Error);
  CHECK_THROWS_AS(LineHesse::through({1, 1}, {1, 1}), Error);
}

TEST_CASE("property: slope-intercept round trip", "[geometry][property]") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double mag = std::pow(10.0, uniform(rng, -3, 6));
    const LineSI l{(uniform_int(rng, 0, 1) ? 1 : -1) * mag * uniform(rng, 0, 1), uniform(rng, -1e3, 1e3)};
    const LineSI back = LineHesse::from_si(l).to_si();
    INFO("a=" << l.a << " b=" << l.b);
    CHECK(std::abs(back.a - l.a) <= 1e-12 * std::max(1.0, std::abs(l.a)));
    CHECK(std::abs(back.b - l.b) <= 1e-12 * std::max(1.0, std::abs(l.b)));
    const double theta = LineHesse::from_si(l).theta();
    CHECK(theta >= 0.0);
    CHECK(theta < std::numbers::pi);
  }
}

TEST_CASE("property: vertical distance dominates orthogonal distance", "[geometry][property]") {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const LineSI l{uniform(rng, -4, 4), uniform(rng, -4, 4)};
    const Point p{uniform(rng, -5, 5), uniform(rng, -5, 5)};
    const double dv = std::abs(vertical_residual(p, l));
    const double dorth = std::abs(orthogonal_residual(p, LineHesse::from_si(l)));
    CHECK(dv >= dorth - 1e-12);
    CHECK(dv == Approx(dorth * std::sqrt(1 + l.a * l.a)).margin(1e-10));
  }
  // Equality for horizontal lines.
  const Point p{1.5, -2.0};
  CHECK(std::abs(vertical_residual(p, {0, 1})) == std::abs(orthogonal_residual(p, LineHesse::from_si({0, 1}))));
}

TEST_CASE("property: L2 vertical objective is the sum of squared residuals", "[geometry][property]") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const PointSet ps = random_points(rng, {.multiplicities = true});
    const LineSI l{uniform(rng, -3, 3), uniform(rng, -3, 3)};
    double s = 0;
    for (const Point& p : ps) s += static_cast<double>(p.mult) * vertical_residual(p, l) * vertical_residual(p, l);
    CHECK(objective(ps, l, Norm::l2(), DistanceKind::vertical) == Approx(s).epsilon(1e-14));
  }
}

TEST_CASE("property: decomposition partitions and empties under large shifts", "[geometry][property]") {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    const PointSet ps = random_points(rng, {.multiplicities = true});
    const LineSI l{uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const auto d = decompose(ps, l, DistanceKind::vertical, 0.0);
    CHECK(d.plus.size() + d.zero.size() + d.minus.size() == ps.size());
    CHECK(d.w_plus + d.w_zero + d.w_minus == ps.total_multiplicity());

    double big = 0;
    for (const Point& p : ps) big = std::max(big, std::abs(vertical_residual(p, l)));
    const auto up = decompose(ps, LineSI{l.a, l.b + big + 1}, DistanceKind::vertical, 0.0);
    CHECK(up.plus.empty());
    CHECK(up.zero.empty());
    const auto down = decompose(ps, LineSI{l.a, l.b - big - 1}, DistanceKind::vertical, 0.0);
    CHECK(down.minus.empty());
  }
}

TEST_CASE("property: scatter satisfies Cauchy-Schwarz", "[geometry][property]") {
  Rng rng(15);
  for (int i = 0; i < 500; ++i) {
    const PointSet ps = random_points(rng, {.multiplicities = true});
    const ScatterStats& s = scatter(ps);
    CHECK(s.sxx >= 0);
    CHECK(s.syy >= 0);
    CHECK(s.sxx * s.syy - s.sxy * s.sxy >= -1e-9 * (s.sxx + s.syy) * (s.sxx + s.syy));
  }
  // Collinear points reach equality.
  const PointSet line({{0, 1}, {1, 3}, {2, 5}, {-4, -7}});
  const ScatterStats& s = scatter(line);
  const double scale = (s.sxx + s.syy) * (s.sxx + s.syy);
  CHECK(std::abs(s.sxx * s.syy - s.sxy * s.sxy) <= 1e-9 * scale);
}

#include <cmath>
#include <stdexcept>
#include <random>

#include "doctest.h"

#include "expanse/flows.hpp"
#include "expanse/spaces.hpp"

using namespace expanse;

namespace {

std::vector<Space> all_spaces() {
  return {Space::interval01(), Space::circle_union({std::exp(-1.0), std::exp(-2.0), 0.05}),
          Space::torus2(), Space::finite_set({Point(0.0), Point(0.4), Point(1.0)})};
}

Point random_point(const Space& sp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (sp.kind()) {
    case SpaceKind::Interval01: return Point(u(rng));
    case SpaceKind::Torus2: return Point(u(rng), u(rng));
    case SpaceKind::CircleUnion: {
      std::uniform_int_distribution<std::size_t> k(0, sp.radii().size());
      const std::size_t i = k(rng);
      if (i == sp.radii().size()) return Point(0.0, 0.0);
      const double a = 2.0 * M_PI * u(rng);
      return Point(sp.radii()[i] * std::cos(a), sp.radii()[i] * std::sin(a));
    }
    case SpaceKind::FiniteSet: {
      std::uniform_int_distribution<std::size_t> k(0, sp.members().size() - 1);
      return sp.members()[k(rng)];
    }
  }
  return Point(0.0);
}

}  // namespace

TEST_CASE("distance to the interval endpoints is min(z, 1 - z)") {
  const FlowModel f = make_interval_flow(1.0);
  CHECK(dist_point_set(Point(0.3), f.singular, f.space) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(dist_point_set(Point(0.0), f.singular, f.space) == 0.0);
  CHECK(dist_point_set(Point(1.0), f.singular, f.space) == 0.0);
}

TEST_CASE("distance from a circle point to the origin is its radius") {
  const FlowModel f = make_circles_flow(RadiiFamily::Harmonic, 16);
  CHECK(dist_point_set(Point(1.0 / 9.0, 0.0), f.singular, f.space) == doctest::Approx(1.0 / 9.0));
  CHECK(f.sing_dist(Point(0.0, 0.0)) == 0.0);
}

TEST_CASE("member list without closed form uses the metric") {
  const Space sp = Space::interval01();
  SingularSet s;
  s.points = {Point(0.0), Point(1.0)};
  CHECK(dist_point_set(Point(0.8), s, sp) == doctest::Approx(0.2));
  CHECK(dist_point_set(Point(1.0), s, sp) == 0.0);
}

TEST_CASE("empty singular set is at distance diam(X)") {
  for (const Space& sp : all_spaces()) {
    SingularSet empty;
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k)
      CHECK(dist_point_set(random_point(sp, rng), empty, sp) == sp.diameter());
  }
}

TEST_CASE("closed-form diameters") {
  CHECK(space_diameter(Space::interval01()) == 1.0);
  CHECK(space_diameter(Space::finite_set({Point(0.25)})) == 0.0);
  CHECK(space_diameter(Space::torus2()) == doctest::Approx(std::sqrt(0.5)));

  const Space c = Space::circle_union({std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)});
  CHECK(space_diameter(c) == doctest::Approx(2.0 * std::exp(-1.0)));
  // oracle: dense sampling of the union
  std::vector<Point> dense;
  for (double r : c.radii())
    for (int k = 0; k < 720; ++k)
      dense.emplace_back(r * std::cos(2 * M_PI * k / 720), r * std::sin(2 * M_PI * k / 720));
  double sampled = 0.0;
  for (std::size_t i = 0; i < dense.size(); i += 7)
    for (const Point& q : dense) sampled = std::max(sampled, c.distance(dense[i], q));
  CHECK(std::fabs(sampled - c.diameter()) <= 0.01 * c.diameter());
}

TEST_CASE("metric axioms on random triples") {
  for (const Space& sp : all_spaces()) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10000; ++k) {
      const Point a = random_point(sp, rng), b = random_point(sp, rng), c = random_point(sp, rng);
      REQUIRE(sp.distance(a, b) >= 0.0);
      REQUIRE(sp.distance(a, a) == 0.0);
      REQUIRE(sp.distance(a, b) == sp.distance(b, a));
      REQUIRE(sp.distance(a, c) <= sp.distance(a, b) + sp.distance(b, c) + 1e-12);
      REQUIRE(sp.distance(a, b) <= sp.diameter() + 1e-12);
    }
  }
}

TEST_CASE("dist to Sing is 1-Lipschitz") {
  const std::vector<FlowModel> flows = {make_interval_flow(1.0),
                                        make_circles_flow(RadiiFamily::Exp, 6)};
  for (const FlowModel& f : flows) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 5000; ++k) {
      const Point a = random_point(f.space, rng), b = random_point(f.space, rng);
      REQUIRE(std::fabs(f.sing_dist(a) - f.sing_dist(b)) <= f.space.distance(a, b) + 1e-12);
    }
  }
}

TEST_CASE("torus metric wraps around") {
  const Space t = Space::torus2();
  CHECK(t.distance(Point(0.05, 0.0), Point(0.95, 0.0)) == doctest::Approx(0.1));
  CHECK(t.distance(Point(0.0, 0.5), Point(0.5, 0.0)) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("containment tolerance") {
  const Space c = Space::circle_union({1.0, 0.5});
  CHECK(c.contains(Point(0.0, 1.0)));
  CHECK(c.contains(Point(0.0, 0.0)));
  CHECK_FALSE(c.contains(Point(0.0, 0.75)));
  CHECK(c.contains(Point(0.5 + 1e-13, 0.0)));
  CHECK_FALSE(Space::interval01().contains(Point(1.0 + 1e-9)));
  CHECK(Space::interval01().contains(Point(1.0 + 1e-13)));
}

TEST_CASE("ball samples stay in the ball and in the space") {
  for (const Space& sp : all_spaces()) {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 200; ++k) {
      const Point x = random_point(sp, rng);
      const double r = 0.3 * sp.diameter() * (k % 5) / 4.0;
      for (const Point& y : sp.ball_samples(x, r, 9)) {
        REQUIRE(sp.contains(y, 1e-9));
        REQUIRE(sp.distance(x, y) <= r + 1e-12);
      }
      Point y = sp.random_point_in_ball(x, r, rng);
      if (sp.contains(y)) REQUIRE(sp.distance(x, y) <= r + 1e-12);
    }
  }
}

TEST_CASE("interval ball samples reach both boundaries of the ball") {
  const auto ys = Space::interval01().ball_samples(Point(0.5), 0.2, 5);
  REQUIRE(ys.size() == 5);
  CHECK(ys.front().x() == doctest::Approx(0.3));
  CHECK(ys.back().x() == doctest::Approx(0.7));
}

TEST_CASE("default grids") {
  const FlowModel f = make_interval_flow(1.0);
  GridSpec g;
  g.per_dim = 9;
  g.geometric_levels = 3;
  const auto pts = default_grid(f.space, f.singular, g);
  // i/10 for i = 1..9, then 1/8, 1/4, 3/4, 7/8; 1/2 is shared
  CHECK(pts.size() == 13);
  CHECK(std::is_sorted(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x() < b.x(); }));
  CHECK(pts.front().x() == 0.1);
  CHECK(pts[1].x() == 0.125);

  const FlowModel c = make_circles_flow(RadiiFamily::Exp, 4);
  GridSpec gc;
  gc.angles = 6;
  CHECK(default_grid(c.space, c.singular, gc).size() == 24);
  gc.include_singular = true;
  CHECK(default_grid(c.space, c.singular, gc).back() == Point(0.0, 0.0));

  GridSpec gt;
  gt.per_dim = 16;
  gt.rows = 1;
  const auto line = default_grid(Space::torus2(), SingularSet{}, gt);
  CHECK(line.size() == 16);
  for (const Point& p : line) CHECK(p.y() == 0.0);
}

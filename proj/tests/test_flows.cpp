#include <cmath>
#include <stdexcept>
#include <random>

#include "doctest.h"

#include "expanse/errors.hpp"
#include "expanse/flows.hpp"

using namespace expanse;

namespace {

/// March RK4 from x until the trajectory passes y, then bisect inside the
/// last step. Independent of the closed-form transit formula.
double rk4_transit_time(const FlowModel& f, double x, double y, double step) {
  const double dir = y > x ? 1.0 : -1.0;
  Point p(x);
  double t = 0.0;
  while ((p.x() - y) * dir < 0.0) {
    Point next = integrate_flow(f.field, dir * step, p, step);
    if ((next.x() - y) * dir >= 0.0) {
      double lo = 0.0, hi = step;
      for (int k = 0; k < 80; ++k) {
        double mid = 0.5 * (lo + hi);
        if ((integrate_flow(f.field, dir * mid, p, mid).x() - y) * dir < 0.0) lo = mid;
        else hi = mid;
      }
      return t + dir * 0.5 * (lo + hi);
    }
    p = next;
    t += dir * step;
  }
  return t;
}

}  // namespace

TEST_CASE("phi_0 is the identity and Sing is fixed") {
  const std::vector<FlowModel> flows = {make_interval_flow(1.0), make_interval_flow(2.5),
                                        make_circles_flow(RadiiFamily::Exp, 5),
                                        make_suspension_doubling()};
  for (const FlowModel& f : flows) {
    for (const Point& s : f.singular.points)
      for (double t : {-10.0, -1.0, 0.5, 3.0, 10.0})
        CHECK(f.space.distance(f.evaluate(t, s), s) <= 1e-10);
    CHECK(f.evaluate(0.0, f.space.kind() == SpaceKind::Interval01 ? Point(0.37) : Point(0.3, 0.2)) ==
          (f.space.kind() == SpaceKind::Interval01 ? Point(0.37) : Point(0.3, 0.2)));
  }
}

TEST_CASE("group law on the invertible flows") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0), tt(-4.0, 4.0);
  const FlowModel iv = make_interval_flow(1.0);
  const FlowModel circ = make_circles_flow(RadiiFamily::Harmonic, 8);
  for (int k = 0; k < 2000; ++k) {
    const double s = tt(rng), t = tt(rng);
    const Point x(u(rng));
    REQUIRE(iv.space.distance(iv.evaluate(s + t, x), iv.evaluate(s, iv.evaluate(t, x))) <= 1e-12);
    const double r = circ.space.radii()[k % 8], a = 6.28 * u(rng);
    const Point z(r * std::cos(a), r * std::sin(a));
    REQUIRE(circ.space.distance(circ.evaluate(s + t, z), circ.evaluate(s, circ.evaluate(t, z))) <= 1e-12);
  }
}

TEST_CASE("suspension of the doubling map obeys the semigroup law forward") {
  const FlowModel f = make_suspension_doubling();
  CHECK_FALSE(f.invertible);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0), tt(0.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const Point z(u(rng), u(rng));
    const double s = tt(rng), t = tt(rng);
    REQUIRE(f.space.distance(f.evaluate(s + t, z), f.evaluate(s, f.evaluate(t, z))) <= 1e-9);
    // forward motion undoes the fixed inverse branch
    REQUIRE(f.space.distance(f.evaluate(t, f.evaluate(-t, z)), z) <= 1e-9);
  }
  // one unit of time doubles the angle
  const Point p = f.evaluate(1.0, Point(0.3, 0.0));
  CHECK(f.space.distance(p, Point(0.6, 0.0)) <= 1e-12);
  CHECK(f.space.distance(f.evaluate(0.5, Point(0.3, 0.0)), Point(0.3, 0.5)) <= 1e-12);
}

TEST_CASE("closed forms agree with RK4 integration of the field") {
  const FlowModel iv = make_interval_flow(1.0);
  for (double x : {1e-6, 0.01, 0.2, 0.5, 0.9, 1.0 - 1e-6})
    for (double t : {-7.0, -1.5, 0.25, 3.0, 9.0})
      CHECK(std::fabs(iv.evaluate(t, Point(x)).x() - integrate_flow(iv.field, t, Point(x), 1e-3).x()) <= 1e-10);
  const FlowModel c = make_circles_flow(RadiiFamily::Exp, 3);
  for (double t : {-5.0, 0.7, 6.0}) {
    const Point z(0.0, std::exp(-1.0));
    CHECK(c.space.distance(c.evaluate(t, z), integrate_flow(c.field, t, z, 1e-3)) <= 1e-10);
  }
}

TEST_CASE("interval evaluation saturates without NaN at extreme times") {
  for (double x : {1e-300, 1e-12, 0.5, 1.0 - 1e-12}) {
    for (double t : {-1e6, -800.0, 800.0, 1e6}) {
      const double v = interval_flow_eval(1.0, t, x);
      REQUIRE(std::isfinite(v));
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
    CHECK(interval_flow_eval(1.0, 1e6, x) == doctest::Approx(1.0));
    CHECK(interval_flow_eval(1.0, -1e6, x) == doctest::Approx(0.0));
  }
  CHECK(interval_flow_eval(1.0, 5.0, 0.0) == 0.0);
  CHECK(interval_flow_eval(1.0, -5.0, 1.0) == 1.0);
}

TEST_CASE("transit time: closed form against bisected RK4") {
  const FlowModel iv = make_interval_flow(1.0);
  CHECK(interval_flow_transit_time(1.0 / 3.0, 2.0 / 3.0) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(interval_flow_transit_time(0.4, 0.4) == 0.0);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int k = 0; k < 60; ++k) {
    const double x = u(rng), y = u(rng);
    const double oracle = rk4_transit_time(iv, x, y, 1e-3);
    REQUIRE(std::fabs(interval_flow_transit_time(x, y) - oracle) <= 1e-8);
  }
}

TEST_CASE("orbit samples are centred and cover the window") {
  const FlowModel f = make_interval_flow(1.0);
  const OrbitSample s = sample_orbit(f, Point(0.5), 1.0, 0.1);
  REQUIRE(s.size() == 21);
  CHECK(s.times[10] == 0.0);
  CHECK(s.points[10] == Point(0.5));
  CHECK(s.times.front() == doctest::Approx(-1.0));
  CHECK(s.times.back() == doctest::Approx(1.0));
  CHECK(s.sing_dists[10] == 0.5);
  CHECK(s.field_norms[10] == doctest::Approx(0.25));

  // T / h not integral: the step shrinks so that T stays a sample time
  const OrbitSample a = sample_orbit(f, Point(0.5), 1.0, 0.3);
  CHECK(a.times.back() == doctest::Approx(1.0));
  CHECK(a.step_h <= 0.3);

  const OrbitSample r = sample_orbit_range(f, Point(0.2), -3, 5, 0.25);
  CHECK(r.size() == 9);
  CHECK(r.times.front() == doctest::Approx(-0.75));
}

TEST_CASE("catalog radii and construction") {
  const auto e = circle_radii(RadiiFamily::Exp, 3);
  CHECK(e == std::vector<double>{1.0, std::exp(-1.0), std::exp(-2.0)});
  const auto h = circle_radii(RadiiFamily::Harmonic, 4);
  CHECK(h == std::vector<double>{1.0, 0.5, 1.0 / 3.0, 0.25});

  FlowSpec bad;
  bad.name = "pendulum";
  CHECK_THROWS_AS(make_flow(bad), std::invalid_argument);
  FlowSpec neg;
  neg.name = "circles";
  neg.depth = 0;
  CHECK_THROWS(make_flow(neg));

  FlowSpec triv;
  triv.name = "trivial";
  triv.finite_points = {Point(0.0), Point(1.0)};
  const FlowModel t = make_flow(triv);
  CHECK(t.sing_dist(Point(1.0)) == 0.0);
  CHECK(t.evaluate(7.0, Point(1.0)) == Point(1.0));
}

TEST_CASE("long integrations hit the work budget") {
  const FlowModel iv = make_interval_flow(1.0);
  CHECK_THROWS_AS(integrate_flow(iv.field, 1e9, Point(0.5), 1e-3), BudgetExceeded);
}

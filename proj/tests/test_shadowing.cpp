#include <cmath>
#include <stdexcept>
#include <sstream>

#include "doctest.h"

#include "expanse/shadowing.hpp"

using namespace expanse;

namespace {

PseudoOrbit three_segments() {
  PseudoOrbit po;
  po.first_index = 0;
  po.points = {Point(0.2), Point(0.4), Point(0.6)};
  po.durations = {2.0, 3.0, 5.0};
  return po;
}

}  // namespace

TEST_CASE("cumulative clock") {
  const PseudoOrbit po = three_segments();
  CHECK(cumulative_clock(po, 0) == 0.0);
  CHECK(cumulative_clock(po, 2) == 5.0);
  CHECK(cumulative_clock(po, 3) == 10.0);
  CHECK_THROWS(cumulative_clock(po, 4));

  PseudoOrbit back = three_segments();
  back.first_index = -2;
  // S(-2) = -(t_{-2} + t_{-1}); S(i+1) - S(i) = t_i everywhere
  CHECK(cumulative_clock(back, -2) == -5.0);
  CHECK(cumulative_clock(back, -1) == -3.0);
  for (long i = back.first_index; i <= back.last_index(); ++i)
    CHECK(cumulative_clock(back, i + 1) - cumulative_clock(back, i) == doctest::Approx(back.t(i)));
}

TEST_CASE("pseudo-trajectory follows each segment and takes the left limit at the end") {
  const FlowModel f = make_interval_flow(1.0);
  const PseudoOrbit po = three_segments();
  CHECK(pseudo_trajectory(f, po, 0.0) == Point(0.2));
  CHECK(pseudo_trajectory(f, po, 2.0) == Point(0.4));
  CHECK(pseudo_trajectory(f, po, 1.0).x() == doctest::Approx(f.evaluate(1.0, Point(0.2)).x()));
  CHECK(pseudo_trajectory(f, po, 10.0).x() == doctest::Approx(f.evaluate(5.0, Point(0.6)).x()));
}

TEST_CASE("generated pseudo-orbits respect delta and the duration range") {
  const FlowModel f = make_interval_flow(1.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PseudoOrbit po = generate_pseudo_orbit(f, Point(0.5), 10, 1e-3, 1.0, seed);
    CHECK(po.size() == 10);
    CHECK(po.first_index == -5);
    CHECK(po.x(0) == Point(0.5));
    CHECK(max_seam_jump(f, po) <= 1e-3 + 1e-15);
    for (double t : po.durations) {
      CHECK(t >= 1.0);
      CHECK(t <= 2.0);
    }
  }
  const PseudoOrbit a = generate_pseudo_orbit(f, Point(0.3), 6, 1e-2, 1.0, 42);
  const PseudoOrbit b = generate_pseudo_orbit(f, Point(0.3), 6, 1e-2, 1.0, 42);
  CHECK(a.points == b.points);
  CHECK(a.durations == b.durations);
  CHECK_THROWS_AS(generate_pseudo_orbit(f, Point(0.3), 6, 1e-2, 0.5, 1), std::invalid_argument);
}

TEST_CASE("semi-flows only run forward") {
  const FlowModel f = make_suspension_doubling();
  const PseudoOrbit po = generate_pseudo_orbit(f, Point(0.1, 0.2), 5, 1e-3, 1.0, 9);
  CHECK(po.first_index == 0);
  CHECK(max_seam_jump(f, po) <= 1e-3 + 1e-15);
}

TEST_CASE("a zero-jump chain is shadowed by its base point") {
  const FlowModel f = make_interval_flow(1.0);
  const PseudoOrbit po = generate_pseudo_orbit(f, Point(0.4), 6, 0.0, 1.0, 3);
  CHECK(max_seam_jump(f, po) <= 1e-12);
  const auto r = find_shadow(f, po, 0.05);
  REQUIRE(r.has_value());
  CHECK(r->candidate_index == 0);
  CHECK(r->max_error <= 1e-9);
}

TEST_CASE("interval pseudo-orbits are shadowed with Rep(eps) time changes") {
  const FlowModel f = make_interval_flow(1.0);
  ShadowOptions o;
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    for (double x0 : {0.5, 0.01, 0.999}) {
      const PseudoOrbit po = generate_pseudo_orbit(f, Point(x0), 10, 1e-3, 1.0, seed);
      const auto r = find_shadow(f, po, 0.05, o);
      REQUIRE(r.has_value());
      CHECK(r->max_error <= 0.05);
      CHECK(rep_epsilon_check(r->reparam, 0.05));
      CHECK(recompute_shadow_error(f, po, r->shadow_point, r->reparam, o.h) ==
            doctest::Approx(r->max_error).epsilon(1e-9));
    }
  }
}

TEST_CASE("radial drift on the rotation flow is not shadowed") {
  std::vector<double> radii;
  for (int i = 0; i <= 10; ++i) radii.push_back(0.5 + 0.02 * i);
  const FlowModel f = make_circles_flow(RadiiFamily::List, 0, radii);
  const PseudoOrbit po = radial_drift_pseudo_orbit(f, 0.5, 0.02, 11, 1.0);
  CHECK(max_seam_jump(f, po) == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(f.space.distance(po.points.front(), po.points.back()) >= 0.2 - 1e-12);
  CHECK_FALSE(find_shadow(f, po, 0.05).has_value());
  // any true orbit keeps its radius, so the error is at least half the drift
  CHECK(best_shadow(f, po, 0.05).max_error >= 0.1 - 1e-9);
}

TEST_CASE("more candidates never worsen the best shadow") {
  const FlowModel f = make_interval_flow(1.0);
  const PseudoOrbit po = generate_pseudo_orbit(f, Point(0.3), 8, 5e-3, 1.0, 77);
  ShadowOptions coarse, fine;
  coarse.candidate_count = 3;
  fine.candidate_count = 5;  // contains the three coarse ball samples
  const ShadowResult a = best_shadow(f, po, 0.05, coarse);
  const ShadowResult b = best_shadow(f, po, 0.05, fine);
  CHECK(b.max_error <= a.max_error + 1e-15);
  CHECK(b.candidates_tried >= a.candidates_tried);
}

TEST_CASE("candidate order") {
  const FlowModel f = make_interval_flow(1.0);
  const PseudoOrbit po = three_segments();
  ShadowOptions o;
  o.candidate_count = 5;
  const auto c = shadow_candidates(f, po, 0.1, o);
  CHECK(c.front() == Point(0.2));
  // anchored orbit of x_2 pulled back by S(2) = 5
  CHECK(c[2].x() == doctest::Approx(f.evaluate(-5.0, Point(0.6)).x()));
}

TEST_CASE("pseudo-orbit records round-trip") {
  const FlowModel f = make_circles_flow(RadiiFamily::Exp, 3);
  const PseudoOrbit po = generate_pseudo_orbit(f, Point(std::exp(-1.0), 0.0), 6, 1e-3, 1.0, 5);
  std::stringstream ss;
  write_pseudo_orbit(ss, po);
  const PseudoOrbit back = read_pseudo_orbit(ss);
  CHECK(back.first_index == po.first_index);
  CHECK(back.delta == po.delta);
  CHECK(back.points == po.points);
  CHECK(back.durations == po.durations);

  std::stringstream bad("# first_index 0 delta 0.1 t_min 1\n0.5\n");
  CHECK_THROWS(read_pseudo_orbit(bad));
}

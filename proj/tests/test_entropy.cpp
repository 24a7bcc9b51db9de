#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>

#include "doctest.h"

#include "expanse/entropy.hpp"

using namespace expanse;

namespace {

std::vector<Point> circle_grid(double r, int n) {
  std::vector<Point> out;
  for (int k = 0; k < n; ++k)
    out.emplace_back(r * std::cos(2 * std::numbers::pi * k / n), r * std::sin(2 * std::numbers::pi * k / n));
  return out;
}

/// Smallest (t, eps)-spanning subset by enumeration in increasing size.
std::size_t brute_force_span(const FlowModel& f, const std::vector<Point>& K, double t, double eps, double h) {
  const std::size_t n = K.size();
  std::vector<std::uint32_t> cover(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (bowen_ball_test(f, K[i], K[j], t, eps, h)) cover[i] |= 1u << j;
  const std::uint32_t all = n == 32 ? ~0u : (1u << n) - 1;
  std::size_t best = n;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const std::size_t size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    std::uint32_t got = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) got |= cover[i];
    if (got == all) best = size;
  }
  return best;
}

}  // namespace

TEST_CASE("Bowen balls") {
  const FlowModel iv = make_interval_flow(1.0);
  CHECK(bowen_ball_test(iv, Point(0.3), Point(0.3), 10.0, 1e-9, 0.1));
  CHECK_FALSE(bowen_ball_test(iv, Point(0.3), Point(0.31), 10.0, 0.01, 0.1));
  CHECK(bowen_ball_test(iv, Point(0.3), Point(0.31), 0.0, 0.0101, 0.1));
  // rotation keeps distances, so the horizon is irrelevant
  const FlowModel rot = make_circles_flow(RadiiFamily::Exp, 2);
  const Point a(1.0, 0.0), b(std::cos(0.1), std::sin(0.1));
  for (double t : {0.0, 3.3, 40.0}) CHECK(bowen_ball_test(rot, a, b, t, 0.1, 0.1));
}

TEST_CASE("the final time is always sampled") {
  // d(phi_s x, phi_s y) grows in s here; t = 1.05 lies between samples
  const FlowModel iv = make_interval_flow(1.0);
  const Point x(0.1), y(0.1001);
  const double at_t = std::fabs(iv.evaluate(1.05, x).x() - iv.evaluate(1.05, y).x());
  const double at_1 = std::fabs(iv.evaluate(1.0, x).x() - iv.evaluate(1.0, y).x());
  const double eps = 0.5 * (at_t + at_1);
  CHECK_FALSE(bowen_ball_test(iv, x, y, 1.05, eps, 0.5));
}

TEST_CASE("two far points need two centres at every horizon") {
  const FlowModel f = make_trivial_flow(Space::finite_set({Point(0.0), Point(1.0)}));
  for (double t : {0.0, 1.0, 10.0}) {
    const SpanningEstimate s = spanning_cardinality(f, {Point(0.0), Point(1.0)}, t, 0.5, 0.1);
    CHECK(s.cardinality == 2);
    CHECK(s.verified);
  }
}

TEST_CASE("covering a circle grid matches the arc-counting formula") {
  const FlowModel rot = make_circles_flow(RadiiFamily::List, 0, {1.0});
  for (int n : {360, 97, 50}) {
    for (double eps : {0.5, 0.2, 0.05}) {
      int m = 0;
      while (2.0 * std::sin(std::numbers::pi * (m + 1) / n) <= eps) ++m;
      const std::size_t expected = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / (2 * m + 1)));
      const SpanningEstimate s = spanning_cardinality(rot, circle_grid(1.0, n), 3.0, eps, 0.1);
      CHECK(s.cardinality == expected);
      CHECK(s.verified);
    }
  }
  // continuum covering number of the unit circle by chord balls of radius 0.5
  CHECK(spanning_cardinality(rot, circle_grid(1.0, 360), 1.0, 0.5, 0.1).cardinality ==
        static_cast<std::size_t>(std::ceil(std::numbers::pi / (2.0 * std::asin(0.25)))));
}

TEST_CASE("exact minimum on small grids agrees with enumeration and never beats greedy") {
  const FlowModel iv = make_interval_flow(1.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<Point> K;
    for (int k = 0; k < 12; ++k) K.emplace_back(u(rng));
    const double t = 1.0 + trial % 3, eps = 0.05 + 0.02 * (trial % 4);
    const SpanningEstimate ex = spanning_cardinality(iv, K, t, eps, 0.1, SpanningMethod::ExactSmall);
    const SpanningEstimate gr = spanning_cardinality(iv, K, t, eps, 0.1, SpanningMethod::GreedyCover);
    REQUIRE(ex.cardinality == brute_force_span(iv, K, t, eps, 0.1));
    REQUIRE(ex.cardinality <= gr.cardinality);
    REQUIRE(ex.verified);
    REQUIRE(gr.verified);
  }
  std::vector<Point> big(21, Point(0.5));
  CHECK_THROWS_AS(spanning_cardinality(iv, big, 1.0, 0.1, 0.1, SpanningMethod::ExactSmall), std::invalid_argument);
}

TEST_CASE("spanning counts grow with t and shrink with eps") {
  const FlowModel iv = make_interval_flow(1.0);
  GridSpec g;
  g.per_dim = 200;
  g.geometric_levels = 8;
  const auto K = default_grid(iv.space, iv.singular, g);
  const EntropyEstimate e = entropy_estimate(iv, K, {1.0, 2.0, 4.0}, {0.2, 0.1, 0.05}, 0.1);
  CHECK(e.monotone_in_t);
  CHECK(e.monotone_in_eps);
  for (std::size_t i = 1; i < e.table.size(); ++i)
    if (e.table[i].eps == e.table[i - 1].eps) CHECK(e.table[i].r >= e.table[i - 1].r);
}

TEST_CASE("entropy of the doubling suspension grows") {
  const FlowModel f = make_suspension_doubling();
  GridSpec g;
  g.per_dim = 1024;
  g.rows = 1;
  const auto K = default_grid(f.space, f.singular, g);
  const EntropyEstimate e = entropy_estimate(f, K, {2.0, 4.0, 6.0}, {0.1}, 0.1);
  CHECK(e.h_estimate > 0.4);
  CHECK(e.table[2].r > 2 * e.table[1].r);
}

TEST_CASE("rotation and trivial flows have zero entropy") {
  const FlowModel rot = make_circles_flow(RadiiFamily::Exp, 3);
  GridSpec g;
  g.angles = 32;
  const EntropyEstimate e = entropy_estimate(rot, default_grid(rot.space, rot.singular, g), {5.0, 10.0, 20.0},
                                             {0.1, 0.05}, 0.1);
  for (const auto& [eps, slope] : e.per_eps_slopes) CHECK(std::fabs(slope) <= 1e-12);
  const FlowModel triv = make_trivial_flow(Space::finite_set({Point(0.0), Point(1.0)}));
  const EntropyEstimate z = entropy_estimate(triv, {Point(0.0), Point(1.0)}, {1.0, 2.0}, {0.5}, 0.1);
  CHECK(z.h_estimate == 0.0);
  CHECK(z.table.front().r == 2);
}

TEST_CASE("degenerate ladders are rejected") {
  const FlowModel iv = make_interval_flow(1.0);
  const std::vector<Point> K = {Point(0.5)};
  CHECK_THROWS_AS(entropy_estimate(iv, K, {1.0}, {0.1}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(entropy_estimate(iv, K, {1.0, 2.0}, {}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(entropy_estimate(iv, K, {2.0, 1.0}, {0.1}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(spanning_cardinality(iv, {}, 1.0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("X_delta keeps the circles far from the origin") {
  const FlowModel f = make_circles_flow(RadiiFamily::Exp, 8);
  GridSpec g;
  g.angles = 8;
  const auto grid = default_grid(f.space, f.singular, g);
  const auto x = x_delta_set(f, 0.2, grid, 50.0);
  CHECK(x.size() == 16);
  for (const Point& p : x) CHECK(p.norm() >= 0.2);
  // nested in delta
  const auto wide = x_delta_set(f, 0.01, grid, 50.0);
  for (const Point& p : x) CHECK(std::find(wide.begin(), wide.end(), p) != wide.end());
  CHECK(x_delta_set(f, 1.5 * f.space.diameter(), grid, 50.0).empty());
}

TEST_CASE("X_delta of the interval is empty: every orbit tends to an endpoint") {
  const FlowModel f = make_interval_flow(1.0);
  const auto grid = default_grid(f.space, f.singular, {});
  CHECK(x_delta_set(f, 0.1, grid, 50.0).empty());
  const EntropyEstimate h = h_star_estimate(f, {0.2, 0.1}, {1.0, 2.0}, {0.1}, grid, 50.0, 0.1);
  CHECK(h.all_empty);
  CHECK(h.h_estimate == 0.0);
}

TEST_CASE("h_star of the rotation matches its entropy") {
  const FlowModel f = make_circles_flow(RadiiFamily::Exp, 4);
  GridSpec g;
  g.angles = 16;
  const auto grid = default_grid(f.space, f.singular, g);
  const EntropyEstimate h = h_star_estimate(f, {0.3, 0.1}, {5.0, 10.0}, {0.1}, grid, 20.0, 0.1);
  const EntropyEstimate e = entropy_estimate(f, grid, {5.0, 10.0}, {0.1}, 0.1);
  CHECK_FALSE(h.all_empty);
  CHECK(std::fabs(h.h_estimate - e.h_estimate) <= 0.02);
}

TEST_CASE("least-squares slope") {
  CHECK(ls_slope({1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}) == doctest::Approx(2.0));
  CHECK(ls_slope({0.0, 1.0, 2.0, 3.0}, {1.0, 0.0, 1.0, 0.0}) == doctest::Approx(-0.2));
}

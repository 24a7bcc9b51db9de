#pragma once

#include <string>
#include <vector>

#include "expanse/flows.hpp"

namespace expanse {

/// max over s in {0, h, ..., t} of d(phi_s x, phi_s y) <= eps. The last
/// sample is t itself even when h does not divide t.
bool bowen_ball_test(const FlowModel& flow, const Point& x, const Point& y,
                     double t, double eps, double h_sample);

enum class SpanningMethod { GreedyCover, ExactSmall };

std::string to_string(SpanningMethod m);

struct SpanningEstimate {
  double t = 0.0;
  double eps = 0.0;
  std::size_t cardinality = 0;
  std::vector<Point> spanning_points;
  std::vector<std::size_t> indices;  // into the grid
  SpanningMethod method = SpanningMethod::GreedyCover;
  /// Re-checked with bowen_ball_test point by point.
  bool verified = false;
};

/// Exact minimum needs at most this many grid points.
inline constexpr std::size_t kExactSmallLimit = 20;

SpanningEstimate spanning_cardinality(const FlowModel& flow,
                                      const std::vector<Point>& K_grid, double t,
                                      double eps, double h_sample,
                                      SpanningMethod method = SpanningMethod::GreedyCover);

struct SpanningRow {
  double t = 0.0;
  double eps = 0.0;
  std::size_t r = 0;
};

struct EntropyEstimate {
  std::vector<std::pair<double, double>> per_eps_slopes;  // (eps, slope)
  double h_estimate = 0.0;
  std::string K_descriptor;
  std::size_t K_size = 0;
  std::vector<SpanningRow> table;
  bool monotone_in_t = true;
  bool monotone_in_eps = true;
  /// Slopes never decrease as eps shrinks.
  bool slopes_monotone_in_eps = true;
  /// h_star only: every X_delta on the ladder was empty.
  bool all_empty = false;
  std::vector<std::pair<double, double>> per_delta_h;  // h_star only
  std::vector<std::pair<double, std::size_t>> per_delta_size;
};

/// Least-squares slope of ln r(t, eps) against t for each eps; h_estimate is
/// the slope at the smallest eps.
EntropyEstimate entropy_estimate(const FlowModel& flow,
                                 const std::vector<Point>& K_grid,
                                 const std::vector<double>& t_ladder,
                                 const std::vector<double>& eps_ladder,
                                 double h_sample,
                                 const std::string& K_descriptor = "grid");

/// Grid points whose sampled orbit on [-T_escape, T_escape] never comes
/// strictly closer than delta to the singular set.
std::vector<Point> x_delta_set(const FlowModel& flow, double delta,
                               const std::vector<Point>& grid, double T_escape,
                               double h = 0.01);

/// Max over the delta ladder of the entropy estimate on X_delta.
EntropyEstimate h_star_estimate(const FlowModel& flow,
                                const std::vector<double>& delta_ladder,
                                const std::vector<double>& t_ladder,
                                const std::vector<double>& eps_ladder,
                                const std::vector<Point>& grid, double T_escape,
                                double h_sample, double h_escape = 0.01);

/// Least-squares slope of ys against xs.
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace expanse

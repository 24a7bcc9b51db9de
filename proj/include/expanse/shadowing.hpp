#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "expanse/alignment.hpp"
#include "expanse/flows.hpp"

namespace expanse {

/// Finite chain of orbit segments (x_i, t_i), i = first_index .. first_index
/// + size() - 1. The entry with index 0 is the base point x_0.
struct PseudoOrbit {
  long first_index = 0;
  std::vector<Point> points;
  std::vector<double> durations;
  double t_min = 1.0;
  double delta = 0.0;

  std::size_t size() const { return points.size(); }
  long last_index() const { return first_index + static_cast<long>(size()) - 1; }
  const Point& x(long i) const;
  double t(long i) const;
};

/// S(i): 0 at i = 0, t_0 + ... + t_{i-1} for i > 0 and -(t_i + ... + t_{-1})
/// for i < 0. Valid for first_index <= i <= last_index + 1.
double cumulative_clock(const PseudoOrbit& po, long i);

/// Segments run forward from x_0 and, for invertible flows, backward too
/// (n_segments / 2 of them). Durations are uniform in [t_min, 2 t_min] and
/// jumps uniform in the delta-ball; a jump that keeps leaving the space is
/// redrawn up to 100 times before giving up.
PseudoOrbit generate_pseudo_orbit(const FlowModel& flow, const Point& x0,
                                  int n_segments, double delta, double t_min,
                                  std::uint64_t seed);

/// Circle-union control: segment i runs on the circle of radius r0 + i hop
/// with a radial hop at every seam. Entries start at index 0.
PseudoOrbit radial_drift_pseudo_orbit(const FlowModel& flow, double r0,
                                      double hop, int n_segments,
                                      double duration);

/// Largest seam jump d(phi_{t_i}(x_i), x_{i+1}).
double max_seam_jump(const FlowModel& flow, const PseudoOrbit& po);

/// The pseudo-trajectory at clock time tau: phi_{tau - S(i)}(x_i) on
/// S(i) <= tau < S(i+1); the final endpoint takes the left limit.
Point pseudo_trajectory(const FlowModel& flow, const PseudoOrbit& po, double tau);

void write_pseudo_orbit(std::ostream& os, const PseudoOrbit& po);
PseudoOrbit read_pseudo_orbit(std::istream& is);

struct ShadowOptions {
  double h = 0.01;
  int refine = 20;
  /// Non-positive means eps times the clock span.
  double band_width = 0.0;
  /// Non-positive means eps.
  double candidate_radius = 0.0;
  int candidate_count = 9;
};

struct ShadowResult {
  Point shadow_point;
  Reparam reparam;
  double max_error = 0.0;
  std::vector<double> per_segment_errors;
  std::size_t candidate_index = 0;
  std::size_t candidates_tried = 0;
};

/// x_0, then phi_{-S(i)}(x_i) for every segment i in index order, then
/// deterministic samples of the candidate ball around x_0, nearest first.
/// Duplicates are dropped.
std::vector<Point> shadow_candidates(const FlowModel& flow, const PseudoOrbit& po,
                                     double eps, const ShadowOptions& opts);

/// First candidate (in grid order) whose Rep(eps) alignment keeps the error
/// at most eps on every reference sample.
std::optional<ShadowResult> find_shadow(const FlowModel& flow, const PseudoOrbit& po,
                                        double eps, const ShadowOptions& opts = {});

/// Smallest achievable error over all candidates, without the eps cut-off.
ShadowResult best_shadow(const FlowModel& flow, const PseudoOrbit& po, double eps,
                         const ShadowOptions& opts = {});

/// sup over the reference times of d(phi_{s(tau)}(x), pseudo-trajectory(tau)).
double recompute_shadow_error(const FlowModel& flow, const PseudoOrbit& po,
                              const Point& x, const Reparam& s, double h);

}  // namespace expanse

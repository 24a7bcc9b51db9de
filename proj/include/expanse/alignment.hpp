#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expanse/flows.hpp"

namespace expanse {

/// Monotone piecewise-linear time change, extended by unit slope outside
/// its knots.
class Reparam {
 public:
  Reparam() = default;
  /// Both knot arrays must be strictly increasing and of equal length.
  Reparam(std::vector<double> knots_t, std::vector<double> knots_s);

  static Reparam identity(double T);
  static Reparam shift(double T, double offset);

  double operator()(double t) const;
  const std::vector<double>& knots_t() const { return knots_t_; }
  const std::vector<double>& knots_s() const { return knots_s_; }
  std::size_t size() const { return knots_t_.size(); }

 private:
  std::vector<double> knots_t_;
  std::vector<double> knots_s_;
};

enum class WeightKind { Unit, FieldNorm, SingDist };

std::string to_string(WeightKind w);
WeightKind weight_kind_from_string(const std::string& s);

struct AlignOptions {
  WeightKind weight = WeightKind::Unit;
  bool fix_zero = false;
  double band_width = 2.0;
  double slope_min = 0.5;
  double slope_max = 2.0;
  /// Alignment stops once every partial path costs more than this; the
  /// result is then a lower bound flagged as pruned.
  double abort_above = std::numeric_limits<double>::infinity();
};

struct AlignmentResult {
  double cost = 0.0;
  Reparam reparam;
  double argmax_t = 0.0;
  WeightKind weight_kind = WeightKind::Unit;
  bool pruned = false;
  /// Index into ys of s(t_i) for every x sample (empty when pruned).
  std::vector<long> target_index;
};

/// One trajectory sampled for both roles of an alignment: `coarse` at step h
/// on [-T, T] and `fine` at step h / y_refine on [-(T + band), T + band].
/// The coarse points are a subsample of the fine ones.
struct AlignmentSamples {
  OrbitSample coarse;
  OrbitSample fine;
};

AlignmentSamples sample_for_alignment(const FlowModel& flow, const Point& x,
                                      double T, double h, int y_refine,
                                      double band_width);

/// Minimises sup_t d(x(t), y(s(t))) / w(x(t)) over monotone lattice paths.
///
/// xs is sampled at step h; ys at step h / R for an integer R >= 1 and may
/// cover a wider window than xs. Per x-step the path advances between
/// ceil(R slope_min) and floor(R slope_max) y-steps (at least one), and stays
/// in the band |s(t) - t| <= band_width. Among optimal paths the one closest
/// to the identity in sum |s(t) - t| is returned.
AlignmentResult align(const Space& space, const OrbitSample& xs,
                      const OrbitSample& ys, const AlignOptions& opts);

/// Samples x on [-T, T] at step h and y on [-(T + band), T + band] at step
/// h / y_refine, then aligns.
AlignmentResult align_points(const FlowModel& flow, const Point& x,
                             const Point& y, double T, double h, int y_refine,
                             const AlignOptions& opts);

/// sup over t in times of d(phi_t x, phi_{s(t)} y) / w(phi_t x), evaluated
/// through the flow.
double recompute_cost(const FlowModel& flow, const Point& x, const Point& y,
                      const Reparam& s, WeightKind weight,
                      std::span<const double> times);

/// True iff every knot-interval slope of s lies in [1 - eps, 1 + eps].
bool rep_epsilon_check(const Reparam& s, double eps);

/// Some t0 in [-eps, eps] with d(phi_{t0}(x), y) <= tol, if one exists.
std::optional<double> orbit_membership(const FlowModel& flow, const Point& x,
                                       const Point& y, double eps,
                                       double tol = 1e-7);

namespace detail {

/// Minimax warping of a reference sequence onto a finer target sequence.
/// Times are integer indices: reference index i sits at time (ref_first + i)
/// h and target index k at (target_first + k) h / refine.
struct WarpProblem {
  const Space* space = nullptr;
  std::span<const Point> ref;
  std::span<const double> ref_weights;  // empty means unit weight
  std::span<const Point> target;
  long ref_first = 0;
  long target_first = 0;
  int refine = 1;
  long band_cells = 0;
  int step_min = 1;
  int step_max = 1;
  std::optional<long> pin_ref;     // reference index forced onto pin_target
  std::optional<long> pin_target;
  double abort_above = std::numeric_limits<double>::infinity();
};

struct WarpPath {
  double cost = 0.0;
  bool pruned = false;
  std::vector<long> target_index;  // one per reference sample
  std::size_t argmax = 0;
};

WarpPath solve_warp(const WarpProblem& p);

double weighted_separation(double d, double w);

}  // namespace detail

}  // namespace expanse

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expanse/alignment.hpp"
#include "expanse/flows.hpp"

namespace expanse {

enum class Property {
  Expansive,
  KStar,
  Rescaling,
  SingularExpansive,
  Equicontinuous,
  SingularEquicontinuous
};

enum class Verdict { Falsified, CertifiedAtScale, Inconclusive };

std::string to_string(Property p);
std::string to_string(Verdict v);
Property property_from_string(const std::string& s);

/// Weight and zero-pinning each alignment-based property searches with.
WeightKind property_weight(Property p);
bool property_fixes_zero(Property p);

/// Truncations a check ran under. Everything here ends up in the report.
struct ScaleInfo {
  double T = 20.0;
  double h = 0.01;
  double band_width = 2.0;
  int y_refine = 2;
  double slope_min = 0.5;
  double slope_max = 2.0;
  std::size_t grid_size = 0;
  std::size_t pairs_total = 0;
  std::size_t pairs_checked = 0;
};

struct Witness {
  Point x;
  Point y;
  /// Present for alignment-based properties.
  std::optional<AlignmentResult> alignment;
  /// Equicontinuity: sup separation and the time it occurs. Ball inclusion:
  /// d(x, y) and the radius of the ball.
  double separation = 0.0;
  double time = 0.0;
  /// The t0 window over which the conclusion was refuted.
  double t0_lo = 0.0;
  double t0_hi = 0.0;
  std::size_t t0_tested = 0;
};

struct PairRecord {
  std::size_t xi = 0;
  std::size_t yi = 0;
  double cost = 0.0;
  bool pruned = false;
  bool hypothesis = false;
  bool conclusion = true;
  /// Ball-sampled partner; yi is unused when set.
  std::optional<Point> y_sample;
};

struct PropertyReport {
  Property property = Property::Expansive;
  Verdict verdict = Verdict::Inconclusive;
  double eps = 0.0;
  double delta = 0.0;
  bool strict_t0 = false;
  std::optional<Witness> witness;
  ScaleInfo scale;
  std::vector<Point> grid;
  std::vector<PairRecord> pairs;
  std::size_t hypothesis_hits = 0;
  /// Ball inclusion: largest |t0| used. Equicontinuity: largest separation.
  double max_statistic = 0.0;
  std::string note;
};

struct CheckOptions {
  double T = 20.0;
  double h = 0.01;
  double band_width = 2.0;
  int y_refine = 2;
  double slope_min = 0.5;
  double slope_max = 2.0;
  /// Conclusion only at t0 = 0 for the properties that allow any t0.
  bool strict_t0 = false;
  int t0_stride = 1;
  std::size_t max_pairs = 1'000'000;
  double cost_tol = 1e-9;
  double orbit_tol = 1e-7;
  int ball_samples = 8;
};

/// Grid points plus the ordered pairs to test; an empty pair list means all
/// ordered pairs (i, j), i != j, in row-major order.
struct PairGrid {
  std::vector<Point> points;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

PairGrid make_pair_grid(const FlowModel& flow, const GridSpec& spec);

PropertyReport check_property(const FlowModel& flow, Property property,
                              double eps, double delta, const PairGrid& grid,
                              const CheckOptions& opts = {});

struct DeltaSearchResult {
  double eps = 0.0;
  /// Largest tested delta without a sampled violation (0 if none).
  double delta_star = 0.0;
  std::vector<std::pair<double, Verdict>> trials;
};

/// Bisects delta in [lo, hi] for the largest value whose check is not falsified.
DeltaSearchResult delta_search(const FlowModel& flow, Property property,
                               double eps, const PairGrid& grid,
                               const CheckOptions& opts, double lo, double hi,
                               int iterations);

/// Samples y in the closed ball of radius delta (times dist(x, Sing) for the
/// singular variant) around each grid point and tests sup_t d <= eps.
PropertyReport check_equicontinuity(const FlowModel& flow, bool singular_variant,
                                    double eps, double delta,
                                    const std::vector<Point>& x_grid,
                                    const CheckOptions& opts = {});

/// Every sampled y in B[x, delta dist(x, Sing)] must be phi_t0(x) for some
/// |t0| <= eps.
PropertyReport ball_inclusion_check(const FlowModel& flow, double eps,
                                    double delta,
                                    const std::vector<Point>& x_grid,
                                    int ball_samples,
                                    const CheckOptions& opts = {});

struct ComparabilityConstants {
  double B = 0.0;
  double C = 0.0;
  Point argmax_B;
  Point argmax_C;
  bool C_unbounded = false;
  std::size_t points_used = 0;
};

/// B = max |V| / dist(., Sing), C = max dist(., Sing) / |V| over the
/// nonsingular grid points.
ComparabilityConstants comparability_constants(const FlowModel& flow,
                                               const std::vector<Point>& grid);

struct LocalNormConstant {
  double c = 0.0;
  double L_hat = 0.0;
  double c_dom = 0.0;
  std::size_t pairs_checked = 0;
  int halvings = 0;
};

LocalNormConstant local_norm_constant(const FlowModel& flow,
                                      const std::vector<Point>& grid,
                                      std::size_t n_pairs = 10000,
                                      std::uint64_t seed = 1);

/// Grid-estimated Lipschitz constant of the field (central differences).
double estimate_lipschitz(const FlowModel& flow, const std::vector<Point>& grid);

struct ReturnViolation {
  Point x;
  double delta = 0.0;
  double t = 0.0;
};

struct ReturnTimeReport {
  double r0 = 0.0;
  /// No violation up to the scanned horizon; r0 is the horizon itself.
  bool capped = false;
  std::optional<ReturnViolation> violation;
  std::size_t triples_checked = 0;
  /// Largest |t| < r0 with phi_t(x) in the ball, over all (x, delta).
  double max_dwell = 0.0;
};

ReturnTimeReport return_time_bound_check(const FlowModel& flow,
                                         const std::vector<Point>& x_grid,
                                         const std::vector<double>& delta_grid,
                                         double t_max = 10.0, double h = 1e-3);

struct HierarchyStats {
  std::size_t pairs = 0;
  std::size_t antecedent_true = 0;
  std::size_t violations = 0;
  double diameter = 0.0;
};

/// cost_sing <= delta / diam(X) must force cost_kstar <= delta, both
/// computed in the zero-fixing class.
HierarchyStats hierarchy_check(const FlowModel& flow, double delta,
                               const PairGrid& grid, const CheckOptions& opts,
                               std::size_t max_pairs);

struct WeightBridgeStats {
  std::size_t points = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;
};

/// |V(z)| <= B dist(z, Sing) and dist(z, Sing) <= C |V(z)| on every grid point.
WeightBridgeStats weight_bridge_check(const FlowModel& flow,
                                      const ComparabilityConstants& bc,
                                      const std::vector<Point>& grid,
                                      double tol = 1e-9);

}  // namespace expanse

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "expanse/spaces.hpp"

namespace expanse {

using VectorField = std::function<Point(const Point&)>;

/// A flow phi(t, x) on a compact space, with its singular set.
///
/// Catalog flows evaluate in closed form; flows without a closed form are
/// integrated from their vector field with fixed-step RK4.
struct FlowModel {
  std::string name;
  Space space = Space::interval01();
  SingularSet singular;
  std::function<Point(double, const Point&)> closed_form;
  VectorField field;
  std::optional<double> lipschitz_L;
  /// False for semi-flows; negative times then follow a fixed inverse branch.
  bool invertible = true;
  double integration_step = 1e-3;

  Point evaluate(double t, const Point& x) const;
  bool has_field() const { return static_cast<bool>(field); }
  double sing_dist(const Point& x) const {
    return dist_point_set(x, singular, space);
  }
};

/// x e^{lt} / (1 + x (e^{lt} - 1)), evaluated without overflow.
double interval_flow_eval(double lambda, double t, double x);

/// Time t with interval_flow_eval(1, t, x) = y, for x, y in (0, 1).
double interval_flow_transit_time(double x, double y);

/// Rigid rotation generated by V(x, y) = (-y, x).
Point rotation_flow_eval(double t, const Point& z);

/// Fixed-step classical RK4 endpoint; the step is shrunk to divide |t|.
Point integrate_flow(const VectorField& field, double t, const Point& x,
                     double step);

/// Uniform-time trajectory sample on the grid {k h : first <= k <= last}.
struct OrbitSample {
  Point base;
  double window_T = 0.0;
  double step_h = 0.0;
  long first_index = 0;
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<double> sing_dists;
  std::vector<double> field_norms;  // empty when the flow has no field

  std::size_t size() const { return points.size(); }
  double time_at(std::size_t i) const { return times[i]; }
};

/// Samples phi_t(x) for t in [-T, T] at step h (adjusted so that T/h is
/// integral; t = 0 is always a sample).
OrbitSample sample_orbit(const FlowModel& flow, const Point& x, double T,
                         double h);

/// Samples phi_t(x) at t = k h for first_index <= k <= last_index.
OrbitSample sample_orbit_range(const FlowModel& flow, const Point& x,
                               long first_index, long last_index, double h);

double field_norm(const FlowModel& flow, const Point& x);

/// Smallest diameter among the sampled orbit segments of the grid points.
double min_orbit_diameter(const FlowModel& flow, const std::vector<Point>& grid,
                          double T, double h);

// Catalog.

enum class RadiiFamily { Exp, Harmonic, List };

struct FlowSpec {
  std::string name = "interval";  // interval | circles | trivial | suspension_doubling
  double lambda = 1.0;
  RadiiFamily radii = RadiiFamily::Exp;
  int depth = 32;
  std::vector<double> radii_list;
  /// Space for the trivial flow: "finite" uses finite_points, "interval" [0, 1].
  std::string trivial_space = "finite";
  std::vector<Point> finite_points;
};

FlowModel make_interval_flow(double lambda);
FlowModel make_circles_flow(RadiiFamily family, int depth,
                            std::vector<double> radii_list = {});
FlowModel make_trivial_flow(Space space);
FlowModel make_suspension_doubling();
FlowModel make_flow(const FlowSpec& spec);

/// Radii of the circle families: e^{-n} for n = 0..depth-1, 1/n for n = 1..depth.
std::vector<double> circle_radii(RadiiFamily family, int depth);

}  // namespace expanse

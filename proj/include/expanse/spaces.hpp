#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace expanse {

/// A point of a one- or two-dimensional space. Velocities share the layout.
struct Point {
  std::array<double, 2> c{0.0, 0.0};
  int dim = 1;

  Point() = default;
  explicit Point(double x) : c{x, 0.0}, dim(1) {}
  Point(double x, double y) : c{x, y}, dim(2) {}

  double x() const { return c[0]; }
  double y() const { return c[1]; }
  double norm() const;

  friend bool operator==(const Point&, const Point&) = default;
};

Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double s, const Point& a);

enum class SpaceKind { Interval01, CircleUnion, Torus2, FiniteSet };

std::string to_string(SpaceKind kind);

/// Compact metric space with a closed-form diameter.
///
/// CircleUnion carries the Euclidean (chord) metric of the plane and always
/// contains the origin. Torus2 is the unit square with the flat quotient
/// metric. Spaces are immutable once built.
class Space {
 public:
  static Space interval01();
  /// Radii need not be sorted; they are stored in decreasing order.
  static Space circle_union(std::vector<double> radii);
  static Space torus2();
  static Space finite_set(std::vector<Point> members);

  SpaceKind kind() const { return kind_; }
  int dimension() const;
  double distance(const Point& a, const Point& b) const;
  double diameter() const { return diameter_; }
  bool contains(const Point& p, double tol = 1e-12) const;

  std::span<const double> radii() const { return radii_; }
  std::span<const Point> members() const { return members_; }

  /// Deterministic points of the space inside the closed ball B[center, r].
  /// Boundary points are included whenever the boundary meets the space.
  std::vector<Point> ball_samples(const Point& center, double r,
                                  int count) const;

  /// A random point of the space within distance r of center, or the
  /// center itself when nothing else qualifies.
  Point random_point_in_ball(const Point& center, double r,
                             std::mt19937_64& rng) const;

  /// Index of the circle carrying p (CircleUnion only), -1 for the origin.
  int circle_index(const Point& p) const;

 private:
  SpaceKind kind_ = SpaceKind::Interval01;
  std::vector<double> radii_;
  std::vector<Point> members_;
  double diameter_ = 1.0;
};

/// Finite singular set, optionally with a closed-form distance.
struct SingularSet {
  std::vector<Point> points;
  std::function<double(const Point&)> distance_fn;

  bool empty() const { return points.empty() && !distance_fn; }
  bool contains(const Point& p, const Space& space, double tol = 1e-12) const;
};

/// dist(z, S); the space diameter when S is empty.
double dist_point_set(const Point& z, const SingularSet& s, const Space& space);

double space_diameter(const Space& space);

/// Sampling grid over a space; near-singular strata are refined geometrically.
struct GridSpec {
  int per_dim = 64;
  int geometric_levels = 20;
  int angles = 8;
  /// Torus2 rows; negative means per_dim (rows are placed at u = i / rows).
  int rows = -1;
  bool include_singular = false;
};

std::vector<Point> default_grid(const Space& space, const SingularSet& sing,
                                const GridSpec& spec);

}  // namespace expanse

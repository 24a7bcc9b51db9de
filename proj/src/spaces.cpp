#include "expanse/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace expanse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap01(double v) {
  double w = v - std::floor(v);
  return w >= 1.0 ? 0.0 : w;
}

double circular_gap(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace

double Point::norm() const {
  return dim == 1 ? std::fabs(c[0]) : std::hypot(c[0], c[1]);
}

Point operator+(const Point& a, const Point& b) {
  Point r = a;
  r.c[0] += b.c[0];
  r.c[1] += b.c[1];
  return r;
}

Point operator-(const Point& a, const Point& b) {
  Point r = a;
  r.c[0] -= b.c[0];
  r.c[1] -= b.c[1];
  return r;
}

Point operator*(double s, const Point& a) {
  Point r = a;
  r.c[0] *= s;
  r.c[1] *= s;
  return r;
}

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Interval01: return "interval01";
    case SpaceKind::CircleUnion: return "circle_union";
    case SpaceKind::Torus2: return "torus2";
    case SpaceKind::FiniteSet: return "finite_set";
  }
  return "unknown";
}

Space Space::interval01() {
  Space s;
  s.kind_ = SpaceKind::Interval01;
  s.diameter_ = 1.0;
  return s;
}

Space Space::circle_union(std::vector<double> radii) {
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("circle radii must be positive and finite");
  }
  std::sort(radii.begin(), radii.end(), std::greater<>());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  Space s;
  s.kind_ = SpaceKind::CircleUnion;
  s.radii_ = std::move(radii);
  s.diameter_ = s.radii_.empty() ? 0.0 : 2.0 * s.radii_.front();
  return s;
}

Space Space::torus2() {
  Space s;
  s.kind_ = SpaceKind::Torus2;
  s.diameter_ = std::sqrt(0.5);
  return s;
}

Space Space::finite_set(std::vector<Point> members) {
  if (members.empty()) throw std::invalid_argument("finite set must be nonempty");
  Space s;
  s.kind_ = SpaceKind::FiniteSet;
  s.members_ = std::move(members);
  double diam = 0.0;
  for (std::size_t i = 0; i < s.members_.size(); ++i)
    for (std::size_t j = i + 1; j < s.members_.size(); ++j)
      diam = std::max(diam, (s.members_[i] - s.members_[j]).norm());
  s.diameter_ = diam;
  return s;
}

int Space::dimension() const {
  switch (kind_) {
    case SpaceKind::Interval01: return 1;
    case SpaceKind::CircleUnion:
    case SpaceKind::Torus2: return 2;
    case SpaceKind::FiniteSet: return members_.front().dim;
  }
  return 1;
}

double Space::distance(const Point& a, const Point& b) const {
  switch (kind_) {
    case SpaceKind::Interval01: return std::fabs(a.c[0] - b.c[0]);
    case SpaceKind::Torus2:
    {
      const double dx = circular_gap(a.c[0], b.c[0]);
      const double dy = circular_gap(a.c[1], b.c[1]);
      return std::sqrt(dx * dx + dy * dy);
    }
    case SpaceKind::CircleUnion:
    case SpaceKind::FiniteSet:
    {
      if (a.dim == 1) return std::fabs(a.c[0] - b.c[0]);
      const double dx = a.c[0] - b.c[0];
      const double dy = a.c[1] - b.c[1];
      return std::sqrt(dx * dx + dy * dy);
    }
  }
  return 0.0;
}

int Space::circle_index(const Point& p) const {
  if (kind_ != SpaceKind::CircleUnion)
    throw std::logic_error("circle_index on a space without circles");
  const double rho = p.norm();
  if (rho == 0.0 || radii_.empty()) return -1;
  int best = -1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < radii_.size(); ++k) {
    double gap = std::fabs(rho / radii_[k] - 1.0);
    if (gap < best_gap) {
      best_gap = gap;
      best = static_cast<int>(k);
    }
  }
  // the origin wins when p is closer to it than to any circle
  if (rho < std::fabs(rho - radii_[static_cast<std::size_t>(best)])) return -1;
  return best;
}

bool Space::contains(const Point& p, double tol) const {
  switch (kind_) {
    case SpaceKind::Interval01:
      return p.dim == 1 && p.c[0] >= -tol && p.c[0] <= 1.0 + tol;
    case SpaceKind::Torus2:
      return p.dim == 2 && p.c[0] >= -tol && p.c[0] <= 1.0 + tol &&
             p.c[1] >= -tol && p.c[1] <= 1.0 + tol;
    case SpaceKind::CircleUnion: {
      if (p.dim != 2) return false;
      const double rho = p.norm();
      if (rho <= tol * (radii_.empty() ? 1.0 : radii_.back())) return true;
      int k = circle_index(p);
      if (k < 0) return false;
      return std::fabs(rho / radii_[static_cast<std::size_t>(k)] - 1.0) <= tol;
    }
    case SpaceKind::FiniteSet:
      return std::any_of(members_.begin(), members_.end(), [&](const Point& m) {
        return m.dim == p.dim && distance(m, p) <= tol;
      });
  }
  return false;
}

std::vector<Point> Space::ball_samples(const Point& center, double r,
                                       int count) const {
  if (r < 0.0) throw std::invalid_argument("ball radius must be nonnegative");
  count = std::max(count, 1);
  std::vector<Point> out;
  switch (kind_) {
    case SpaceKind::Interval01: {
      const double lo = std::max(0.0, center.c[0] - r);
      const double hi = std::min(1.0, center.c[0] + r);
      if (count == 1 || hi <= lo) return {center};
      for (int k = 0; k < count; ++k)
        out.emplace_back(lo + (hi - lo) * k / (count - 1));
      return out;
    }
    case SpaceKind::CircleUnion: {
      const double rc = center.norm();
      const double phase = rc > 0.0 ? std::atan2(center.c[1], center.c[0]) : 0.0;
      if (rc <= r) out.emplace_back(0.0, 0.0);
      for (double rho : radii_) {
        if (std::fabs(rho - rc) > r) continue;
        bool full = rc == 0.0;
        double half = std::numbers::pi;
        if (!full) {
          double cosmin = (rho * rho + rc * rc - r * r) / (2.0 * rho * rc);
          if (cosmin <= -1.0) full = true;
          else half = std::acos(std::min(1.0, cosmin));
        }
        if (full) {
          for (int k = 0; k < count; ++k) {
            double a = phase + kTwoPi * k / count;
            out.emplace_back(rho * std::cos(a), rho * std::sin(a));
          }
        } else if (count == 1 || half == 0.0) {
          out.emplace_back(rho * std::cos(phase), rho * std::sin(phase));
        } else {
          for (int k = 0; k < count; ++k) {
            double a = phase - half + 2.0 * half * k / (count - 1);
            out.emplace_back(rho * std::cos(a), rho * std::sin(a));
          }
        }
      }
      return out;
    }
    case SpaceKind::Torus2: {
      int side = std::max(1, static_cast<int>(std::ceil(std::sqrt(count))));
      for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
          double dx = side == 1 ? 0.0 : -r + 2.0 * r * i / (side - 1);
          double dy = side == 1 ? 0.0 : -r + 2.0 * r * j / (side - 1);
          if (std::hypot(dx, dy) > r) continue;
          out.emplace_back(wrap01(center.c[0] + dx), wrap01(center.c[1] + dy));
        }
      }
      if (out.empty()) out.push_back(center);
      return out;
    }
    case SpaceKind::FiniteSet:
      for (const Point& m : members_)
        if (distance(m, center) <= r + 1e-12) out.push_back(m);
      return out;
  }
  return out;
}

Point Space::random_point_in_ball(const Point& center, double r,
                                  std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  switch (kind_) {
    case SpaceKind::Interval01:
      // may leave [0, 1]; callers decide whether to retry
      return Point(center.c[0] + r * unit(rng));
    case SpaceKind::Torus2: {
      for (;;) {
        double dx = unit(rng), dy = unit(rng);
        if (dx * dx + dy * dy <= 1.0)
          return Point(wrap01(center.c[0] + r * dx), wrap01(center.c[1] + r * dy));
      }
    }
    case SpaceKind::CircleUnion: {
      // uniform over the circles meeting the ball, then uniform on the arc
      const double rc = center.norm();
      const double phase = rc > 0.0 ? std::atan2(center.c[1], center.c[0]) : 0.0;
      std::vector<std::pair<double, double>> arcs;  // (radius, half angle)
      for (double rho : radii_) {
        if (std::fabs(rho - rc) > r) continue;
        if (rc == 0.0) {
          arcs.emplace_back(rho, std::numbers::pi);
          continue;
        }
        double cosmin = (rho * rho + rc * rc - r * r) / (2.0 * rho * rc);
        arcs.emplace_back(rho, cosmin <= -1.0 ? std::numbers::pi
                                              : std::acos(std::min(1.0, cosmin)));
      }
      if (rc <= r) arcs.emplace_back(0.0, 0.0);
      if (arcs.empty()) return center;
      std::uniform_int_distribution<std::size_t> pick(0, arcs.size() - 1);
      auto [rho, half] = arcs[pick(rng)];
      double a = phase + half * unit(rng);
      return Point(rho * std::cos(a), rho * std::sin(a));
    }
    case SpaceKind::FiniteSet: {
      auto near = ball_samples(center, r, 1);
      if (near.empty()) return center;
      std::uniform_int_distribution<std::size_t> pick(0, near.size() - 1);
      return near[pick(rng)];
    }
  }
  return center;
}

bool SingularSet::contains(const Point& p, const Space& space, double tol) const {
  if (distance_fn) return distance_fn(p) <= tol;
  return std::any_of(points.begin(), points.end(), [&](const Point& s) {
    return space.distance(s, p) <= tol;
  });
}

double dist_point_set(const Point& z, const SingularSet& s, const Space& space) {
  if (s.distance_fn) return s.distance_fn(z);
  if (s.points.empty()) return space.diameter();
  double best = std::numeric_limits<double>::infinity();
  for (const Point& p : s.points) best = std::min(best, space.distance(z, p));
  return best;
}

double space_diameter(const Space& space) { return space.diameter(); }

std::vector<Point> default_grid(const Space& space, const SingularSet& sing,
                                const GridSpec& spec) {
  std::vector<Point> out;
  switch (space.kind()) {
    case SpaceKind::Interval01: {
      std::vector<double> xs;
      for (int i = 1; i <= spec.per_dim; ++i)
        xs.push_back(static_cast<double>(i) / (spec.per_dim + 1));
      for (const Point& s : sing.points) {
        for (int k = 1; k <= spec.geometric_levels; ++k) {
          double off = std::ldexp(1.0, -k);
          for (double v : {s.c[0] - off, s.c[0] + off})
            if (v > 0.0 && v < 1.0) xs.push_back(v);
        }
      }
      if (spec.include_singular)
        for (const Point& s : sing.points) xs.push_back(s.c[0]);
      std::sort(xs.begin(), xs.end());
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      for (double v : xs) out.emplace_back(v);
      break;
    }
    case SpaceKind::CircleUnion: {
      for (double rho : space.radii()) {
        for (int k = 0; k < spec.angles; ++k) {
          double a = kTwoPi * k / spec.angles;
          out.emplace_back(rho * std::cos(a), rho * std::sin(a));
        }
      }
      if (spec.include_singular) out.emplace_back(0.0, 0.0);
      break;
    }
    case SpaceKind::Torus2: {
      const int rows = spec.rows < 0 ? spec.per_dim : spec.rows;
      for (int j = 0; j < rows; ++j)
        for (int i = 0; i < spec.per_dim; ++i)
          out.emplace_back(static_cast<double>(i) / spec.per_dim,
                           static_cast<double>(j) / rows);
      break;
    }
    case SpaceKind::FiniteSet:
      out.assign(space.members().begin(), space.members().end());
      break;
  }
  return out;
}

}  // namespace expanse

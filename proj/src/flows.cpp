#include "expanse/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "expanse/errors.hpp"

namespace expanse {

namespace {

constexpr double kMaxRkSteps = 1e8;
constexpr long kMaxSamples = 10'000'000;

Point rk4_step(const VectorField& f, const Point& x, double h) {
  Point k1 = f(x);
  Point k2 = f(x + (0.5 * h) * k1);
  Point k3 = f(x + (0.5 * h) * k2);
  Point k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Point suspension_doubling_eval(double t, const Point& p) {
  double theta = p.c[0];
  const double s = p.c[1] + t;
  const double turns = std::floor(s);
  double u = s - turns;
  if (u >= 1.0) u = 0.0;
  if (turns >= 0.0) {
    // doubling is exact in binary; after ~1100 turns every double is 0
    const long n = static_cast<long>(std::min(turns, 1100.0));
    for (long k = 0; k < n; ++k) {
      theta *= 2.0;
      theta -= std::floor(theta);
    }
  } else {
    theta = std::ldexp(theta, static_cast<int>(std::max(turns, -1100.0)));
  }
  return Point(theta, u);
}

}  // namespace

Point FlowModel::evaluate(double t, const Point& x) const {
  if (closed_form) return closed_form(t, x);
  if (field) return integrate_flow(field, t, x, integration_step);
  throw std::logic_error("flow '" + name + "' has neither closed form nor field");
}

double interval_flow_eval(double lambda, double t, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("interval flow requires 0 <= x <= 1");
  const double lt = lambda * t;
  if (x == 0.0 || x == 1.0) return x;
  if (std::fabs(lt) > 700.0) return lt > 0.0 ? 1.0 : 0.0;
  if (lt >= 0.0) {
    const double e = std::exp(-lt);
    return x / (x + (1.0 - x) * e);
  }
  const double e = std::exp(lt);
  return x * e / (1.0 - x + x * e);
}

double interval_flow_transit_time(double x, double y) {
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
    throw std::domain_error("transit time requires interior points of (0, 1)");
  return (std::log(y) - std::log(x)) + (std::log1p(-x) - std::log1p(-y));
}

Point rotation_flow_eval(double t, const Point& z) {
  const double c = std::cos(t), s = std::sin(t);
  return Point(z.c[0] * c - z.c[1] * s, z.c[0] * s + z.c[1] * c);
}

Point integrate_flow(const VectorField& field, double t, const Point& x,
                     double step) {
  if (!(step > 0.0)) throw std::invalid_argument("integration step must be positive");
  if (t == 0.0) return x;
  const double steps = std::ceil(std::fabs(t) / step);
  if (steps > kMaxRkSteps) throw BudgetExceeded("RK4 step count exceeds 1e8");
  const long n = static_cast<long>(steps);
  const double h = t / static_cast<double>(n);
  Point p = x;
  for (long k = 0; k < n; ++k) p = rk4_step(field, p, h);
  return p;
}

OrbitSample sample_orbit_range(const FlowModel& flow, const Point& x,
                               long first_index, long last_index, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("sample step must be positive");
  if (last_index < first_index) throw std::invalid_argument("empty sample range");
  if (last_index - first_index + 1 > kMaxSamples)
    throw BudgetExceeded("orbit sample exceeds 1e7 points");

  OrbitSample s;
  s.base = x;
  s.step_h = h;
  s.first_index = first_index;
  s.window_T = std::max(std::fabs(first_index * h), std::fabs(last_index * h));
  const std::size_t n = static_cast<std::size_t>(last_index - first_index + 1);
  s.times.resize(n);
  s.points.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    s.times[i] = static_cast<double>(first_index + static_cast<long>(i)) * h;

  if (flow.closed_form) {
    for (std::size_t i = 0; i < n; ++i) s.points[i] = flow.closed_form(s.times[i], x);
  } else {
    // march outward from t = 0 so every sample costs one step
    auto put = [&](long k, const Point& p) {
      if (k >= first_index && k <= last_index)
        s.points[static_cast<std::size_t>(k - first_index)] = p;
    };
    put(0, x);
    Point p = x;
    for (long k = 1; k <= last_index; ++k) {
      p = integrate_flow(flow.field, h, p, flow.integration_step);
      put(k, p);
    }
    p = x;
    for (long k = -1; k >= first_index; --k) {
      p = integrate_flow(flow.field, -h, p, flow.integration_step);
      put(k, p);
    }
  }

  s.sing_dists.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.sing_dists[i] = flow.sing_dist(s.points[i]);
  if (flow.has_field()) {
    s.field_norms.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.field_norms[i] = flow.field(s.points[i]).norm();
  }
  return s;
}

OrbitSample sample_orbit(const FlowModel& flow, const Point& x, double T,
                         double h) {
  if (!(T > 0.0) || !(h > 0.0))
    throw std::invalid_argument("sample_orbit requires T > 0 and h > 0");
  if (T / h > 1e7) throw BudgetExceeded("T/h exceeds 1e7");
  long m = std::lround(T / h);
  double step = h;
  if (m < 1 || std::fabs(static_cast<double>(m) * h - T) > 1e-9 * T) {
    m = static_cast<long>(std::ceil(T / h));
    step = T / static_cast<double>(m);
  }
  OrbitSample s = sample_orbit_range(flow, x, -m, m, step);
  s.window_T = static_cast<double>(m) * step;
  return s;
}

double field_norm(const FlowModel& flow, const Point& x) {
  if (!flow.has_field())
    throw std::logic_error("flow '" + flow.name + "' has no vector field");
  return flow.field(x).norm();
}

double min_orbit_diameter(const FlowModel& flow, const std::vector<Point>& grid,
                          double T, double h) {
  if (grid.empty()) throw std::invalid_argument("min_orbit_diameter on empty grid");
  double best = std::numeric_limits<double>::infinity();
  for (const Point& x : grid) {
    OrbitSample s = sample_orbit(flow, x, T, h);
    double diam = 0.0;
    if (flow.space.kind() == SpaceKind::Interval01) {
      auto [lo, hi] = std::minmax_element(
          s.points.begin(), s.points.end(),
          [](const Point& a, const Point& b) { return a.c[0] < b.c[0]; });
      diam = hi->c[0] - lo->c[0];
    } else {
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
          diam = std::max(diam, flow.space.distance(s.points[i], s.points[j]));
    }
    best = std::min(best, diam);
  }
  return best;
}

std::vector<double> circle_radii(RadiiFamily family, int depth) {
  if (depth < 1) throw std::invalid_argument("circle depth must be >= 1");
  std::vector<double> radii;
  for (int n = 0; n < depth; ++n) {
    if (family == RadiiFamily::Exp) radii.push_back(std::exp(-static_cast<double>(n)));
    else if (family == RadiiFamily::Harmonic) radii.push_back(1.0 / (n + 1));
    else throw std::invalid_argument("explicit radii lists have no family formula");
  }
  return radii;
}

FlowModel make_interval_flow(double lambda) {
  FlowModel f;
  f.name = "interval";
  f.space = Space::interval01();
  if (lambda != 0.0) {
    f.singular.points = {Point(0.0), Point(1.0)};
    f.singular.distance_fn = [](const Point& z) {
      return std::min(z.c[0], 1.0 - z.c[0]);
    };
  } else {
    f.singular.distance_fn = [](const Point&) { return 0.0; };
  }
  f.closed_form = [lambda](double t, const Point& x) {
    return Point(interval_flow_eval(lambda, t, x.c[0]));
  };
  f.field = [lambda](const Point& x) {
    return Point(lambda * x.c[0] * (1.0 - x.c[0]));
  };
  f.lipschitz_L = std::fabs(lambda);
  return f;
}

FlowModel make_circles_flow(RadiiFamily family, int depth,
                            std::vector<double> radii_list) {
  FlowModel f;
  f.name = "circles";
  std::vector<double> radii =
      family == RadiiFamily::List ? std::move(radii_list) : circle_radii(family, depth);
  f.space = Space::circle_union(std::move(radii));
  f.singular.points = {Point(0.0, 0.0)};
  f.singular.distance_fn = [](const Point& z) { return z.norm(); };
  f.closed_form = [](double t, const Point& z) { return rotation_flow_eval(t, z); };
  f.field = [](const Point& z) { return Point(-z.c[1], z.c[0]); };
  f.lipschitz_L = 1.0;
  return f;
}

FlowModel make_trivial_flow(Space space) {
  FlowModel f;
  f.name = "trivial";
  if (space.kind() == SpaceKind::FiniteSet)
    f.singular.points.assign(space.members().begin(), space.members().end());
  f.singular.distance_fn = [](const Point&) { return 0.0; };
  const int dim = space.dimension();
  f.space = std::move(space);
  f.closed_form = [](double, const Point& x) { return x; };
  f.field = [dim](const Point&) { return dim == 1 ? Point(0.0) : Point(0.0, 0.0); };
  f.lipschitz_L = 0.0;
  return f;
}

FlowModel make_suspension_doubling() {
  FlowModel f;
  f.name = "suspension_doubling";
  f.space = Space::torus2();
  f.closed_form = suspension_doubling_eval;
  f.invertible = false;
  return f;
}

FlowModel make_flow(const FlowSpec& spec) {
  if (spec.name == "interval") return make_interval_flow(spec.lambda);
  if (spec.name == "circles") return make_circles_flow(spec.radii, spec.depth, spec.radii_list);
  if (spec.name == "trivial") {
    if (spec.trivial_space == "interval") return make_trivial_flow(Space::interval01());
    if (spec.trivial_space == "finite") {
      std::vector<Point> pts = spec.finite_points;
      if (pts.empty()) pts = {Point(0.0), Point(1.0)};
      return make_trivial_flow(Space::finite_set(std::move(pts)));
    }
    throw std::invalid_argument("unknown trivial space '" + spec.trivial_space + "'");
  }
  if (spec.name == "suspension_doubling") return make_suspension_doubling();
  throw std::invalid_argument("unknown flow '" + spec.name + "'");
}

}  // namespace expanse

#include "expanse/expansivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <tuple>

#include "expanse/errors.hpp"

namespace expanse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_alignment_property(Property p) {
  return p != Property::Equicontinuous && p != Property::SingularEquicontinuous;
}

/// t0 indices of the coarse sample ordered by |t|: 0, +1, -1, +2, ...
std::vector<std::size_t> t0_order(const OrbitSample& xs, int stride) {
  const long m = -xs.first_index;
  std::vector<std::size_t> out;
  out.push_back(static_cast<std::size_t>(m));
  const long step = std::max(stride, 1);
  for (long k = step; k <= m; k += step) {
    out.push_back(static_cast<std::size_t>(m + k));
    out.push_back(static_cast<std::size_t>(m - k));
  }
  return out;
}

ScaleInfo scale_from(const CheckOptions& o) {
  ScaleInfo s;
  s.T = o.T;
  s.h = o.h;
  s.band_width = o.band_width;
  s.y_refine = o.y_refine;
  s.slope_min = o.slope_min;
  s.slope_max = o.slope_max;
  return s;
}

void require_positive(double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

}  // namespace

std::string to_string(Property p) {
  switch (p) {
    case Property::Expansive: return "expansive";
    case Property::KStar: return "kstar";
    case Property::Rescaling: return "rescaling";
    case Property::SingularExpansive: return "singular_expansive";
    case Property::Equicontinuous: return "equicontinuous";
    case Property::SingularEquicontinuous: return "singular_equicontinuous";
  }
  return "expansive";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Falsified: return "falsified";
    case Verdict::CertifiedAtScale: return "certified_at_scale";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Property property_from_string(const std::string& s) {
  for (Property p : {Property::Expansive, Property::KStar, Property::Rescaling,
                     Property::SingularExpansive, Property::Equicontinuous,
                     Property::SingularEquicontinuous})
    if (to_string(p) == s) return p;
  throw std::invalid_argument("unknown property '" + s + "'");
}

WeightKind property_weight(Property p) {
  switch (p) {
    case Property::Rescaling: return WeightKind::FieldNorm;
    case Property::SingularExpansive: return WeightKind::SingDist;
    default: return WeightKind::Unit;
  }
}

bool property_fixes_zero(Property p) {
  return p == Property::Expansive || p == Property::KStar;
}

PairGrid make_pair_grid(const FlowModel& flow, const GridSpec& spec) {
  PairGrid g;
  g.points = default_grid(flow.space, flow.singular, spec);
  return g;
}

PropertyReport check_property(const FlowModel& flow, Property property,
                              double eps, double delta, const PairGrid& grid,
                              const CheckOptions& opts) {
  require_positive(eps, delta);
  if (!is_alignment_property(property))
    throw std::invalid_argument("equicontinuity is checked by check_equicontinuity");
  if (property == Property::Rescaling && !flow.has_field())
    throw std::invalid_argument("rescaling expansivity needs a vector field");

  PropertyReport rep;
  rep.property = property;
  rep.eps = eps;
  rep.delta = delta;
  rep.strict_t0 = opts.strict_t0;
  rep.grid = grid.points;
  rep.scale = scale_from(opts);
  rep.scale.grid_size = grid.points.size();

  const std::size_t n = grid.points.size();
  const std::size_t total = grid.pairs.empty() ? (n < 2 ? 0 : n * (n - 1)) : grid.pairs.size();
  rep.scale.pairs_total = total;

  AlignOptions ao;
  ao.weight = property_weight(property);
  ao.fix_zero = property_fixes_zero(property);
  ao.band_width = opts.band_width;
  ao.slope_min = opts.slope_min;
  ao.slope_max = opts.slope_max;
  ao.abort_above = delta + opts.cost_tol;

  try {
    std::vector<AlignmentSamples> samples;
    samples.reserve(n);
    for (const Point& p : grid.points)
      samples.push_back(sample_for_alignment(flow, p, opts.T, opts.h, opts.y_refine,
                                             opts.band_width));
    if (!samples.empty()) rep.scale.h = samples.front().coarse.step_h;

    auto pair_at = [&](std::size_t k) -> std::pair<std::size_t, std::size_t> {
      if (!grid.pairs.empty()) return grid.pairs[k];
      const std::size_t i = k / (n - 1), r = k % (n - 1);
      return {i, r < i ? r : r + 1};
    };

    const std::size_t limit = std::min(total, opts.max_pairs);
    for (std::size_t k = 0; k < limit; ++k) {
      auto [xi, yi] = pair_at(k);
      const AlignmentSamples& X = samples.at(xi);
      const AlignmentSamples& Y = samples.at(yi);
      AlignmentResult res = align(flow.space, X.coarse, Y.fine, ao);
      ++rep.scale.pairs_checked;

      PairRecord rec{xi, yi, res.cost, res.pruned, false, true, std::nullopt};
      rec.hypothesis = !res.pruned && res.cost <= delta + opts.cost_tol;
      if (!rec.hypothesis) {
        rep.pairs.push_back(rec);
        continue;
      }
      ++rep.hypothesis_hits;

      const Point& x = grid.points[xi];
      const Point& y = grid.points[yi];
      Witness w;
      w.x = x;
      w.y = y;
      bool holds = false;
      switch (property) {
        case Property::Expansive:
          w.t0_tested = 1;
          holds = orbit_membership(flow, x, y, eps, opts.orbit_tol).has_value();
          break;
        case Property::Rescaling: {
          w.t0_tested = 1;
          const Point ys0 = flow.evaluate(res.reparam(0.0), y);
          holds = orbit_membership(flow, x, ys0, eps, opts.orbit_tol).has_value();
          break;
        }
        case Property::KStar:
        case Property::SingularExpansive: {
          const auto order = opts.strict_t0 ? std::vector<std::size_t>{
                                                  static_cast<std::size_t>(-X.coarse.first_index)}
                                            : t0_order(X.coarse, opts.t0_stride);
          for (std::size_t i : order) {
            const double t0 = X.coarse.times[i];
            w.t0_lo = std::min(w.t0_lo, t0);
            w.t0_hi = std::max(w.t0_hi, t0);
            ++w.t0_tested;
            const Point& a = X.coarse.points[i];
            const Point& b = Y.fine.points[static_cast<std::size_t>(res.target_index[i])];
            if (orbit_membership(flow, a, b, eps, opts.orbit_tol)) {
              holds = true;
              break;
            }
          }
          break;
        }
        default: break;
      }
      rec.conclusion = holds;
      rep.pairs.push_back(rec);
      if (!holds) {
        w.alignment = std::move(res);
        w.separation = w.alignment->cost;
        w.time = w.alignment->argmax_t;
        rep.witness = std::move(w);
        rep.verdict = Verdict::Falsified;
        return rep;
      }
    }
    if (limit < total) {
      rep.verdict = Verdict::Inconclusive;
      rep.note = "pair budget exhausted before every pair was checked";
    } else {
      rep.verdict = Verdict::CertifiedAtScale;
    }
  } catch (const BudgetExceeded& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  return rep;
}

DeltaSearchResult delta_search(const FlowModel& flow, Property property,
                               double eps, const PairGrid& grid,
                               const CheckOptions& opts, double lo, double hi,
                               int iterations) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("delta search needs 0 < lo < hi");
  DeltaSearchResult out;
  out.eps = eps;
  auto trial = [&](double d) {
    PropertyReport r = check_property(flow, property, eps, d, grid, opts);
    out.trials.emplace_back(d, r.verdict);
    return r.verdict != Verdict::Falsified;
  };
  if (trial(hi)) {
    out.delta_star = hi;
    return out;
  }
  if (!trial(lo)) return out;
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (trial(mid)) lo = mid;
    else hi = mid;
  }
  out.delta_star = lo;
  return out;
}

PropertyReport check_equicontinuity(const FlowModel& flow, bool singular_variant,
                                    double eps, double delta,
                                    const std::vector<Point>& x_grid,
                                    const CheckOptions& opts) {
  require_positive(eps, delta);
  PropertyReport rep;
  rep.property = singular_variant ? Property::SingularEquicontinuous : Property::Equicontinuous;
  rep.eps = eps;
  rep.delta = delta;
  rep.grid = x_grid;
  rep.scale = scale_from(opts);
  rep.scale.grid_size = x_grid.size();

  try {
    for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
      const Point& x = x_grid[xi];
      const double r = singular_variant ? delta * flow.sing_dist(x) : delta;
      if (!(r > 0.0)) continue;
      const OrbitSample xs = sample_orbit(flow, x, opts.T, opts.h);
      rep.scale.h = xs.step_h;
      for (const Point& y : flow.space.ball_samples(x, r, opts.ball_samples)) {
        if (y == x) continue;
        ++rep.scale.pairs_total;
        ++rep.scale.pairs_checked;
        ++rep.hypothesis_hits;
        double sup = 0.0, at = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double d = flow.space.distance(xs.points[i], flow.evaluate(xs.times[i], y));
          if (d > sup) {
            sup = d;
            at = xs.times[i];
          }
        }
        rep.max_statistic = std::max(rep.max_statistic, sup);
        PairRecord rec{xi, 0, sup, false, true, sup <= eps + opts.cost_tol, y};
        rep.pairs.push_back(rec);
        if (!rec.conclusion) {
          Witness w;
          w.x = x;
          w.y = y;
          w.separation = sup;
          w.time = at;
          w.t0_lo = -xs.window_T;
          w.t0_hi = xs.window_T;
          rep.witness = w;
          rep.verdict = Verdict::Falsified;
          return rep;
        }
      }
    }
    rep.verdict = Verdict::CertifiedAtScale;
  } catch (const BudgetExceeded& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  return rep;
}

PropertyReport ball_inclusion_check(const FlowModel& flow, double eps,
                                    double delta,
                                    const std::vector<Point>& x_grid,
                                    int ball_samples,
                                    const CheckOptions& opts) {
  require_positive(eps, delta);
  if (flow.space.kind() == SpaceKind::Interval01 && !(delta < 0.5))
    throw std::invalid_argument("interval ball inclusion needs delta < 1/2");
  PropertyReport rep;
  rep.property = Property::SingularExpansive;
  rep.eps = eps;
  rep.delta = delta;
  rep.grid = x_grid;
  rep.scale = scale_from(opts);
  rep.scale.grid_size = x_grid.size();
  rep.note = "ball inclusion B[x, delta dist(x, Sing)] in phi_[-eps, eps](x)";

  for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
    const Point& x = x_grid[xi];
    const double r = delta * flow.sing_dist(x);
    for (const Point& y : flow.space.ball_samples(x, r, ball_samples)) {
      ++rep.scale.pairs_total;
      ++rep.scale.pairs_checked;
      ++rep.hypothesis_hits;
      auto t0 = orbit_membership(flow, x, y, eps, opts.orbit_tol);
      PairRecord rec{xi, 0, t0 ? std::fabs(*t0) : kInf, false, true, t0.has_value(), y};
      rep.pairs.push_back(rec);
      if (!t0) {
        Witness w;
        w.x = x;
        w.y = y;
        w.separation = flow.space.distance(x, y);
        w.time = r;
        w.t0_lo = -eps;
        w.t0_hi = eps;
        rep.witness = w;
        rep.verdict = Verdict::Falsified;
        return rep;
      }
      rep.max_statistic = std::max(rep.max_statistic, std::fabs(*t0));
    }
  }
  rep.verdict = Verdict::CertifiedAtScale;
  return rep;
}

ComparabilityConstants comparability_constants(const FlowModel& flow,
                                               const std::vector<Point>& grid) {
  if (!flow.has_field())
    throw std::invalid_argument("flow '" + flow.name + "' has no vector field");
  ComparabilityConstants out;
  for (const Point& z : grid) {
    const double dist = flow.sing_dist(z);
    if (!(dist > 0.0)) continue;
    const double v = flow.field(z).norm();
    ++out.points_used;
    const double b = v / dist;
    if (out.points_used == 1 || b > out.B) {
      out.B = b;
      out.argmax_B = z;
    }
    const double c = v > 0.0 ? dist / v : kInf;
    if (out.points_used == 1 || c > out.C) {
      out.C = c;
      out.argmax_C = z;
    }
  }
  if (out.points_used == 0)
    throw std::invalid_argument("no nonsingular grid points for comparability constants");
  out.C_unbounded = std::isinf(out.C);
  return out;
}

double estimate_lipschitz(const FlowModel& flow, const std::vector<Point>& grid) {
  if (!flow.has_field())
    throw std::invalid_argument("flow '" + flow.name + "' has no vector field");
  constexpr double eta = 1e-6;
  double L = 0.0;
  for (const Point& z : grid) {
    if (z.dim == 1) {
      const Point a(z.c[0] - eta), b(z.c[0] + eta);
      L = std::max(L, (flow.field(b) - flow.field(a)).norm() / (2.0 * eta));
      continue;
    }
    // largest directional derivative over 16 directions
    const Point jx = (1.0 / (2.0 * eta)) * (flow.field(z + Point(eta, 0.0)) - flow.field(z - Point(eta, 0.0)));
    const Point jy = (1.0 / (2.0 * eta)) * (flow.field(z + Point(0.0, eta)) - flow.field(z - Point(0.0, eta)));
    for (int k = 0; k < 16; ++k) {
      const double a = std::numbers::pi * k / 16.0;
      L = std::max(L, (std::cos(a) * jx + std::sin(a) * jy).norm());
    }
  }
  return L;
}

LocalNormConstant local_norm_constant(const FlowModel& flow,
                                      const std::vector<Point>& grid,
                                      std::size_t n_pairs, std::uint64_t seed) {
  if (!flow.has_field())
    throw std::invalid_argument("flow '" + flow.name + "' has no vector field");
  LocalNormConstant out;
  out.L_hat = flow.lipschitz_L ? *flow.lipschitz_L : estimate_lipschitz(flow, grid);

  std::vector<Point> moving;
  for (const Point& z : grid)
    if (flow.field(z).norm() > 0.0) moving.push_back(z);

  out.c_dom = kInf;
  if (flow.space.kind() == SpaceKind::Interval01) {
    for (const Point& z : moving)
      out.c_dom = std::min(out.c_dom, std::min(z.c[0], 1.0 - z.c[0]) / flow.field(z).norm());
  }
  out.c = std::min(out.L_hat > 0.0 ? 1.0 / (4.0 * out.L_hat) : kInf, out.c_dom);
  if (!std::isfinite(out.c)) out.c = 1.0;  // zero field: the bound is vacuous
  if (moving.empty()) return out;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, moving.size() - 1);
  for (;;) {
    bool violated = false;
    out.pairs_checked = 0;
    while (out.pairs_checked < n_pairs) {
      const Point& x = moving[pick(rng)];
      const double vx = flow.field(x).norm();
      const double r = out.c * vx;
      Point y = flow.space.random_point_in_ball(x, r, rng);
      if (!flow.space.contains(y) || !(flow.space.distance(x, y) < r)) {
        if (r > 0.0) continue;
        y = x;
      }
      ++out.pairs_checked;
      const double vy = flow.field(y).norm();
      if (vy < 0.5 * vx || vy > 2.0 * vx) {
        violated = true;
        break;
      }
    }
    if (!violated || out.halvings >= 60) break;
    out.c *= 0.5;
    ++out.halvings;
  }
  return out;
}

ReturnTimeReport return_time_bound_check(const FlowModel& flow,
                                         const std::vector<Point>& x_grid,
                                         const std::vector<double>& delta_grid,
                                         double t_max, double h) {
  if (!flow.has_field())
    throw std::invalid_argument("flow '" + flow.name + "' has no vector field");
  if (!(t_max > 0.0) || !(h > 0.0)) throw std::invalid_argument("need t_max > 0 and h > 0");

  struct Case {
    Point x;
    double delta;
    double t_bad;  // smallest sampled |t| >= 3 delta inside the ball (inf if none)
    std::vector<double> in_ball;  // sampled |t| inside the ball
  };
  std::vector<Case> cases;
  ReturnTimeReport out;
  for (const Point& x : x_grid) {
    const double vx = flow.field(x).norm();
    if (!(vx > 0.0)) continue;
    const OrbitSample s = sample_orbit(flow, x, t_max, h);
    for (double d : delta_grid) {
      if (!(d > 0.0)) continue;
      Case c{x, d, kInf, {}};
      const double r = d * vx;
      for (std::size_t i = 0; i < s.size(); ++i) {
        ++out.triples_checked;
        if (!(flow.space.distance(s.points[i], x) < r)) continue;
        const double at = std::fabs(s.times[i]);
        c.in_ball.push_back(at);
        if (at >= 3.0 * d) c.t_bad = std::min(c.t_bad, at);
      }
      cases.push_back(std::move(c));
    }
  }

  // a triple breaks the bound at scale r when delta < r/3 and t_bad < r
  auto violated_at = [&](double r) -> const Case* {
    const Case* worst = nullptr;
    for (const Case& c : cases)
      if (c.delta < r / 3.0 && c.t_bad < r &&
          (!worst || c.t_bad < worst->t_bad))
        worst = &c;
    return worst;
  };

  const double horizon = t_max;
  if (!violated_at(horizon)) {
    out.r0 = horizon;
    out.capped = true;
  } else {
    double lo = 0.0, hi = horizon;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (violated_at(mid)) hi = mid;
      else lo = mid;
    }
    out.r0 = lo;
    const Case* c = violated_at(hi);
    out.violation = ReturnViolation{c->x, c->delta, c->t_bad};
  }
  for (const Case& c : cases)
    for (double at : c.in_ball)
      if (at < out.r0) out.max_dwell = std::max(out.max_dwell, at);
  return out;
}

HierarchyStats hierarchy_check(const FlowModel& flow, double delta,
                               const PairGrid& grid, const CheckOptions& opts,
                               std::size_t max_pairs) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  HierarchyStats st;
  st.diameter = flow.space.diameter();
  const std::size_t n = grid.points.size();
  if (n < 2 && grid.pairs.empty()) return st;

  std::vector<AlignmentSamples> samples;
  for (const Point& p : grid.points)
    samples.push_back(sample_for_alignment(flow, p, opts.T, opts.h, opts.y_refine, opts.band_width));

  AlignOptions sing;
  sing.weight = WeightKind::SingDist;
  sing.fix_zero = true;
  sing.band_width = opts.band_width;
  sing.slope_min = opts.slope_min;
  sing.slope_max = opts.slope_max;
  AlignOptions unit = sing;
  unit.weight = WeightKind::Unit;

  const double bound = delta / st.diameter;
  const std::size_t total = grid.pairs.empty() ? n * (n - 1) : grid.pairs.size();
  for (std::size_t k = 0; k < std::min(total, max_pairs); ++k) {
    std::size_t xi, yi;
    if (!grid.pairs.empty()) {
      std::tie(xi, yi) = grid.pairs[k];
    } else {
      xi = k / (n - 1);
      const std::size_t r = k % (n - 1);
      yi = r < xi ? r : r + 1;
    }
    ++st.pairs;
    AlignmentResult cs = align(flow.space, samples[xi].coarse, samples[yi].fine, sing);
    if (!(cs.cost <= bound)) continue;
    ++st.antecedent_true;
    AlignmentResult ck = align(flow.space, samples[xi].coarse, samples[yi].fine, unit);
    // w <= diam turns every cell bound d / w <= delta / diam into d <= delta
    if (!(ck.cost <= delta * (1.0 + 1e-12))) ++st.violations;
  }
  return st;
}

WeightBridgeStats weight_bridge_check(const FlowModel& flow,
                                      const ComparabilityConstants& bc,
                                      const std::vector<Point>& grid,
                                      double tol) {
  WeightBridgeStats st;
  for (const Point& z : grid) {
    const double v = flow.field(z).norm();
    const double d = flow.sing_dist(z);
    ++st.points;
    const double e1 = v - bc.B * d;
    const double e2 = std::isinf(bc.C) ? -kInf : d - bc.C * v;
    const double e = std::max(e1, e2);
    if (e > tol) ++st.violations;
    st.worst_excess = std::max(st.worst_excess, e);
  }
  return st;
}

}  // namespace expanse

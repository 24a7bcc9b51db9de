#include "expanse/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace expanse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kJumpRetries = 100;

Point jump_from(const FlowModel& flow, const Point& p, double delta,
                std::mt19937_64& rng) {
  if (delta == 0.0) return p;
  for (int k = 0; k < kJumpRetries; ++k) {
    Point q = flow.space.random_point_in_ball(p, delta, rng);
    if (flow.space.contains(q) && flow.space.distance(p, q) <= delta) return q;
  }
  throw std::runtime_error("pseudo-orbit jump left the space " +
                           std::to_string(kJumpRetries) + " times in a row");
}

/// Clock values S(first_index) .. S(last_index + 1).
std::vector<double> clock_table(const PseudoOrbit& po) {
  std::vector<double> s(po.size() + 1);
  for (std::size_t j = 0; j <= po.size(); ++j)
    s[j] = cumulative_clock(po, po.first_index + static_cast<long>(j));
  return s;
}

struct Reference {
  long first = 0;  // tau_k = (first + k) h
  std::vector<Point> points;
  std::vector<std::size_t> segment;
};

Reference reference_samples(const FlowModel& flow, const PseudoOrbit& po, double h) {
  const std::vector<double> S = clock_table(po);
  Reference ref;
  ref.first = static_cast<long>(std::ceil(S.front() / h - 1e-9));
  const long last = static_cast<long>(std::floor(S.back() / h + 1e-9));
  if (last < ref.first) throw std::invalid_argument("pseudo-orbit shorter than one sample step");
  std::size_t seg = 0;
  for (long k = ref.first; k <= last; ++k) {
    const double tau = static_cast<double>(k) * h;
    while (seg + 1 < po.size() && tau >= S[seg + 1]) ++seg;
    const long i = po.first_index + static_cast<long>(seg);
    ref.points.push_back(flow.evaluate(tau - S[seg], po.x(i)));
    ref.segment.push_back(seg);
  }
  return ref;
}

struct Attempt {
  bool ok = false;
  double cost = kInf;
  ShadowResult result;
};

Attempt shadow_attempt(const FlowModel& flow, const PseudoOrbit& po,
                       const Reference& ref, const Point& candidate, double eps,
                       double abort_above, const ShadowOptions& opts, double band) {
  const double hy = opts.h / opts.refine;
  const long B = static_cast<long>(std::ceil(band / hy - 1e-9));
  const long n = static_cast<long>(ref.points.size());
  const long t_first = ref.first * opts.refine - B;
  const long t_last = (ref.first + n - 1) * opts.refine + B;
  const OrbitSample orbit = sample_orbit_range(flow, candidate, t_first, t_last, hy);

  detail::WarpProblem p;
  p.space = &flow.space;
  p.ref = ref.points;
  p.target = orbit.points;
  p.ref_first = ref.first;
  p.target_first = t_first;
  p.refine = opts.refine;
  p.band_cells = B;
  p.step_min = std::max(1, static_cast<int>(std::ceil(opts.refine * (1.0 - eps) - 1e-9)));
  p.step_max = static_cast<int>(std::floor(opts.refine * (1.0 + eps) + 1e-9));
  p.abort_above = abort_above;
  detail::WarpPath path = detail::solve_warp(p);

  Attempt a;
  a.cost = path.cost;
  if (path.pruned) return a;
  a.ok = true;
  ShadowResult& r = a.result;
  r.shadow_point = candidate;
  r.max_error = path.cost;
  std::vector<double> kt(static_cast<std::size_t>(n)), ks(kt.size());
  r.per_segment_errors.assign(po.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    const std::size_t u = static_cast<std::size_t>(i);
    kt[u] = static_cast<double>(ref.first + i) * opts.h;
    const std::size_t k = static_cast<std::size_t>(path.target_index[u]);
    ks[u] = orbit.times[k];
    double& e = r.per_segment_errors[ref.segment[u]];
    e = std::max(e, flow.space.distance(ref.points[u], orbit.points[k]));
  }
  r.reparam = Reparam(std::move(kt), std::move(ks));
  return a;
}

void check_shadow_inputs(const PseudoOrbit& po, double eps, const ShadowOptions& opts) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("shadowing needs 0 < eps < 1");
  if (po.size() == 0) throw std::invalid_argument("empty pseudo-orbit");
  if (!(opts.h > 0.0) || opts.refine < 1) throw std::invalid_argument("invalid shadow sampling");
}

double shadow_band(const PseudoOrbit& po, double eps, const ShadowOptions& opts) {
  if (opts.band_width > 0.0) return opts.band_width;
  const double span = cumulative_clock(po, po.last_index() + 1) -
                      cumulative_clock(po, po.first_index);
  return std::max(opts.h, eps * span);
}

}  // namespace

const Point& PseudoOrbit::x(long i) const {
  if (i < first_index || i > last_index()) throw std::out_of_range("pseudo-orbit index out of range");
  return points[static_cast<std::size_t>(i - first_index)];
}

double PseudoOrbit::t(long i) const {
  if (i < first_index || i > last_index()) throw std::out_of_range("pseudo-orbit index out of range");
  return durations[static_cast<std::size_t>(i - first_index)];
}

double cumulative_clock(const PseudoOrbit& po, long i) {
  if (i < po.first_index || i > po.last_index() + 1)
    throw std::out_of_range("clock index out of range");
  double s = 0.0;
  if (i > 0) {
    for (long k = 0; k < i; ++k) s += po.t(k);
  } else {
    for (long k = i; k <= -1; ++k) s -= po.t(k);
  }
  return s;
}

PseudoOrbit generate_pseudo_orbit(const FlowModel& flow, const Point& x0,
                                  int n_segments, double delta, double t_min,
                                  std::uint64_t seed) {
  if (n_segments < 1) throw std::invalid_argument("need at least one segment");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  if (!(t_min >= 1.0)) throw std::invalid_argument("t_min must be at least 1");
  if (!flow.space.contains(x0)) throw std::invalid_argument("x0 is outside the space");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dur(t_min, 2.0 * t_min);
  const int n_back = flow.invertible ? n_segments / 2 : 0;
  const int n_fwd = n_segments - n_back;

  std::vector<Point> fwd{x0};
  std::vector<double> fwd_t;
  for (int k = 0; k < n_fwd; ++k) {
    const double t = dur(rng);
    fwd_t.push_back(t);
    if (k + 1 < n_fwd) fwd.push_back(jump_from(flow, flow.evaluate(t, fwd.back()), delta, rng));
  }
  std::vector<Point> back;
  std::vector<double> back_t;
  Point next = x0;
  for (int k = 0; k < n_back; ++k) {
    const double t = dur(rng);
    const Point landing = jump_from(flow, next, delta, rng);
    next = flow.evaluate(-t, landing);
    back.push_back(next);
    back_t.push_back(t);
  }

  PseudoOrbit po;
  po.first_index = -n_back;
  po.t_min = t_min;
  po.delta = delta;
  for (int k = n_back - 1; k >= 0; --k) {
    po.points.push_back(back[static_cast<std::size_t>(k)]);
    po.durations.push_back(back_t[static_cast<std::size_t>(k)]);
  }
  po.points.insert(po.points.end(), fwd.begin(), fwd.end());
  po.durations.insert(po.durations.end(), fwd_t.begin(), fwd_t.end());
  return po;
}

PseudoOrbit radial_drift_pseudo_orbit(const FlowModel& flow, double r0,
                                      double hop, int n_segments,
                                      double duration) {
  if (flow.space.kind() != SpaceKind::CircleUnion)
    throw std::invalid_argument("radial drift needs a union of circles");
  if (n_segments < 1) throw std::invalid_argument("need at least one segment");
  PseudoOrbit po;
  po.t_min = duration;
  po.delta = std::fabs(hop);
  Point p(r0, 0.0);
  for (int i = 0; i < n_segments; ++i) {
    const double r = r0 + hop * i;
    if (i > 0) {
      const Point end = flow.evaluate(duration, po.points.back());
      p = (r / end.norm()) * end;
    }
    if (!flow.space.contains(p, 1e-9))
      throw std::invalid_argument("radial drift leaves the circle union");
    po.points.push_back(p);
    po.durations.push_back(duration);
  }
  return po;
}

double max_seam_jump(const FlowModel& flow, const PseudoOrbit& po) {
  double worst = 0.0;
  for (long i = po.first_index; i < po.last_index(); ++i)
    worst = std::max(worst, flow.space.distance(flow.evaluate(po.t(i), po.x(i)), po.x(i + 1)));
  return worst;
}

Point pseudo_trajectory(const FlowModel& flow, const PseudoOrbit& po, double tau) {
  const std::vector<double> S = clock_table(po);
  std::size_t seg = 0;
  while (seg + 1 < po.size() && tau >= S[seg + 1]) ++seg;
  return flow.evaluate(tau - S[seg], po.x(po.first_index + static_cast<long>(seg)));
}

void write_pseudo_orbit(std::ostream& os, const PseudoOrbit& po) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# first_index " << po.first_index << " delta " << po.delta << " t_min "
      << po.t_min << "\n";
  for (std::size_t i = 0; i < po.size(); ++i) {
    const Point& p = po.points[i];
    out << p.c[0];
    if (p.dim == 2) out << ',' << p.c[1];
    out << ',' << po.durations[i] << "\n";
  }
  os << out.str();
}

PseudoOrbit read_pseudo_orbit(std::istream& is) {
  PseudoOrbit po;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      while (hs >> key) {
        if (key == "first_index") hs >> po.first_index;
        else if (key == "delta") hs >> po.delta;
        else if (key == "t_min") hs >> po.t_min;
        else throw std::runtime_error("unknown pseudo-orbit header key '" + key + "'");
        if (!hs) throw std::runtime_error("malformed pseudo-orbit header");
      }
      header = true;
      continue;
    }
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used == 0) throw std::runtime_error("malformed pseudo-orbit record");
    }
    if (v.size() == 2) po.points.emplace_back(v[0]);
    else if (v.size() == 3) po.points.emplace_back(v[0], v[1]);
    else throw std::runtime_error("pseudo-orbit record needs 2 or 3 fields");
    po.durations.push_back(v.back());
  }
  if (!header) throw std::runtime_error("pseudo-orbit header missing");
  return po;
}

std::vector<Point> shadow_candidates(const FlowModel& flow, const PseudoOrbit& po,
                                     double eps, const ShadowOptions& opts) {
  const Point& x0 = po.x(std::clamp(0L, po.first_index, po.last_index()));
  const double radius = opts.candidate_radius > 0.0 ? opts.candidate_radius : eps;
  std::vector<Point> ball = flow.space.ball_samples(x0, radius, opts.candidate_count);
  std::stable_sort(ball.begin(), ball.end(), [&](const Point& a, const Point& b) {
    return flow.space.distance(a, x0) < flow.space.distance(b, x0);
  });
  std::vector<Point> out{x0};
  auto add = [&](const Point& p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  };
  // The true orbit through x_i at clock time S(i) follows segment i exactly.
  // Near an attracting end of the space the ball grid is far too coarse to
  // hit such an orbit, so these go first.
  for (long i = po.first_index; i <= po.last_index(); ++i)
    add(flow.evaluate(-cumulative_clock(po, i), po.x(i)));
  for (const Point& p : ball) add(p);
  return out;
}

std::optional<ShadowResult> find_shadow(const FlowModel& flow, const PseudoOrbit& po,
                                        double eps, const ShadowOptions& opts) {
  check_shadow_inputs(po, eps, opts);
  const Reference ref = reference_samples(flow, po, opts.h);
  const double band = shadow_band(po, eps, opts);
  const auto cands = shadow_candidates(flow, po, eps, opts);
  for (std::size_t c = 0; c < cands.size(); ++c) {
    Attempt a = shadow_attempt(flow, po, ref, cands[c], eps, eps, opts, band);
    if (a.ok && a.cost <= eps) {
      a.result.candidate_index = c;
      a.result.candidates_tried = c + 1;
      return a.result;
    }
  }
  return std::nullopt;
}

ShadowResult best_shadow(const FlowModel& flow, const PseudoOrbit& po, double eps,
                         const ShadowOptions& opts) {
  check_shadow_inputs(po, eps, opts);
  const Reference ref = reference_samples(flow, po, opts.h);
  const double band = shadow_band(po, eps, opts);
  const auto cands = shadow_candidates(flow, po, eps, opts);
  ShadowResult best;
  best.max_error = kInf;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    Attempt a = shadow_attempt(flow, po, ref, cands[c], eps, kInf, opts, band);
    if (a.ok && a.cost < best.max_error) {
      best = std::move(a.result);
      best.candidate_index = c;
    }
  }
  best.candidates_tried = cands.size();
  return best;
}

double recompute_shadow_error(const FlowModel& flow, const PseudoOrbit& po,
                              const Point& x, const Reparam& s, double h) {
  const Reference ref = reference_samples(flow, po, h);
  double worst = 0.0;
  for (std::size_t k = 0; k < ref.points.size(); ++k) {
    const double tau = static_cast<double>(ref.first + static_cast<long>(k)) * h;
    worst = std::max(worst, flow.space.distance(flow.evaluate(s(tau), x), ref.points[k]));
  }
  return worst;
}

}  // namespace expanse

#include "expanse/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace expanse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double weight_of(const FlowModel& flow, const Point& p, WeightKind w) {
  switch (w) {
    case WeightKind::Unit: return 1.0;
    case WeightKind::FieldNorm: return field_norm(flow, p);
    case WeightKind::SingDist: return flow.sing_dist(p);
  }
  return 1.0;
}

// Preferred predecessor/endpoint order: smaller |o| first, then smaller o.
bool closer_to_diagonal(long a, long b) {
  const long aa = a < 0 ? -a : a, bb = b < 0 ? -b : b;
  return aa != bb ? aa < bb : a < b;
}

}  // namespace

Reparam::Reparam(std::vector<double> knots_t, std::vector<double> knots_s)
    : knots_t_(std::move(knots_t)), knots_s_(std::move(knots_s)) {
  if (knots_t_.size() != knots_s_.size() || knots_t_.empty())
    throw std::invalid_argument("reparam knot arrays must be nonempty and equal length");
  for (std::size_t i = 1; i < knots_t_.size(); ++i) {
    if (!(knots_t_[i] > knots_t_[i - 1]) || !(knots_s_[i] > knots_s_[i - 1]))
      throw std::invalid_argument("reparam knots must be strictly increasing");
  }
}

Reparam Reparam::identity(double T) { return Reparam({-T, T}, {-T, T}); }

Reparam Reparam::shift(double T, double offset) {
  return Reparam({-T, T}, {-T + offset, T + offset});
}

double Reparam::operator()(double t) const {
  if (knots_t_.empty()) return t;
  if (t <= knots_t_.front()) return knots_s_.front() + (t - knots_t_.front());
  if (t >= knots_t_.back()) return knots_s_.back() + (t - knots_t_.back());
  auto it = std::upper_bound(knots_t_.begin(), knots_t_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - knots_t_.begin()) - 1;
  if (t == knots_t_[k]) return knots_s_[k];
  const double w = (t - knots_t_[k]) / (knots_t_[k + 1] - knots_t_[k]);
  return knots_s_[k] + w * (knots_s_[k + 1] - knots_s_[k]);
}

std::string to_string(WeightKind w) {
  switch (w) {
    case WeightKind::Unit: return "unit";
    case WeightKind::FieldNorm: return "field_norm";
    case WeightKind::SingDist: return "sing_dist";
  }
  return "unit";
}

WeightKind weight_kind_from_string(const std::string& s) {
  if (s == "unit") return WeightKind::Unit;
  if (s == "field_norm") return WeightKind::FieldNorm;
  if (s == "sing_dist") return WeightKind::SingDist;
  throw std::invalid_argument("unknown weight kind '" + s + "'");
}

namespace detail {

double weighted_separation(double d, double w) {
  if (w > 0.0) return d / w;
  return d == 0.0 ? 0.0 : kInf;
}

WarpPath solve_warp(const WarpProblem& p) {
  if (p.space == nullptr) throw std::invalid_argument("warp problem without a space");
  if (p.ref.empty() || p.target.empty()) throw std::invalid_argument("empty warp sequence");
  if (!p.ref_weights.empty() && p.ref_weights.size() != p.ref.size())
    throw std::invalid_argument("weight array does not match reference length");
  if (p.refine < 1 || p.step_min < 1 || p.step_max < p.step_min)
    throw std::invalid_argument("invalid warp step bounds");
  if (p.band_cells < 0 || p.band_cells > 30000)
    throw std::invalid_argument("band must span between 0 and 30000 target cells");

  const long n = static_cast<long>(p.ref.size());
  const long ny = static_cast<long>(p.target.size());
  const long B = p.band_cells;
  const long W = 2 * B + 1;
  const long R = p.refine;

  auto diag = [&](long i) { return (p.ref_first + i) * R - p.target_first; };
  auto cell_cost = [&](long i, long k) {
    const double d = p.space->distance(p.ref[static_cast<std::size_t>(i)],
                                       p.target[static_cast<std::size_t>(k)]);
    if (p.ref_weights.empty()) return d;
    return weighted_separation(d, p.ref_weights[static_cast<std::size_t>(i)]);
  };
  auto admissible = [&](long i, long o) {
    const long k = diag(i) + o;
    if (k < 0 || k >= ny) return false;
    if (p.pin_ref && *p.pin_ref == i) return k == *p.pin_target;
    return true;
  };
  // predecessor offsets o' for o satisfy step_min <= R + o - o' <= step_max
  auto pred_lo = [&](long o) { return std::max(-B, o + R - p.step_max); };
  auto pred_hi = [&](long o) { return std::min(B, o + R - p.step_min); };

  // Pass 1: bottleneck cost.
  std::vector<double> prev(static_cast<std::size_t>(W), kInf), cur(prev.size(), kInf);
  std::vector<std::uint8_t> prev_alive(prev.size(), 0), cur_alive(prev.size(), 0);
  double row_low = kInf;
  bool first_row_candidate = false;
  for (long o = -B; o <= B; ++o) {
    const std::size_t u = static_cast<std::size_t>(o + B);
    if (!admissible(0, o)) continue;
    first_row_candidate = true;
    const double c = cell_cost(0, diag(0) + o);
    row_low = std::min(row_low, c);
    if (c <= p.abort_above) {
      cur[u] = c;
      cur_alive[u] = 1;
    }
  }
  auto any_alive = [](const std::vector<std::uint8_t>& a) {
    return std::find(a.begin(), a.end(), std::uint8_t{1}) != a.end();
  };
  if (!first_row_candidate) throw std::invalid_argument("no admissible warping path");
  if (!any_alive(cur_alive)) return WarpPath{row_low, true, {}, 0};
  for (long i = 1; i < n; ++i) {
    std::swap(prev, cur);
    std::swap(prev_alive, cur_alive);
    std::fill(cur_alive.begin(), cur_alive.end(), std::uint8_t{0});
    row_low = kInf;
    bool any_candidate = false;
    for (long o = -B; o <= B; ++o) {
      const std::size_t u = static_cast<std::size_t>(o + B);
      if (!admissible(i, o)) continue;
      double best = kInf;
      bool reach = false;
      for (long q = pred_lo(o); q <= pred_hi(o); ++q) {
        const std::size_t v = static_cast<std::size_t>(q + B);
        if (prev_alive[v]) {
          reach = true;
          best = std::min(best, prev[v]);
        }
      }
      if (!reach) continue;
      any_candidate = true;
      const double c = std::max(best, cell_cost(i, diag(i) + o));
      row_low = std::min(row_low, c);
      if (c <= p.abort_above) {
        cur[u] = c;
        cur_alive[u] = 1;
      }
    }
    if (!any_candidate) throw std::invalid_argument("no admissible warping path");
    if (!any_alive(cur_alive)) return WarpPath{row_low, true, {}, 0};
  }
  double bottleneck = kInf;
  for (std::size_t u = 0; u < cur.size(); ++u)
    if (cur_alive[u]) bottleneck = std::min(bottleneck, cur[u]);

  // Pass 2: among paths within the bottleneck, minimise sum |o|.
  std::vector<std::int16_t> back(static_cast<std::size_t>(n * W), 0);
  std::vector<double> dev(static_cast<std::size_t>(W), kInf), dev_next(dev.size(), kInf);
  std::vector<std::uint8_t> ok(dev.size(), 0), ok_next(dev.size(), 0);
  for (long o = -B; o <= B; ++o) {
    const std::size_t u = static_cast<std::size_t>(o + B);
    if (admissible(0, o) && cell_cost(0, diag(0) + o) <= bottleneck) {
      ok[u] = 1;
      dev[u] = static_cast<double>(o < 0 ? -o : o);
    }
  }
  for (long i = 1; i < n; ++i) {
    std::fill(ok_next.begin(), ok_next.end(), std::uint8_t{0});
    for (long o = -B; o <= B; ++o) {
      const std::size_t u = static_cast<std::size_t>(o + B);
      if (!admissible(i, o)) continue;
      double best = kInf;
      long arg = 0;
      bool reach = false;
      for (long q = pred_lo(o); q <= pred_hi(o); ++q) {
        const std::size_t v = static_cast<std::size_t>(q + B);
        if (!ok[v]) continue;
        if (!reach || dev[v] < best || (dev[v] == best && closer_to_diagonal(q, arg))) {
          best = dev[v];
          arg = q;
          reach = true;
        }
      }
      if (!reach || cell_cost(i, diag(i) + o) > bottleneck) continue;
      ok_next[u] = 1;
      dev_next[u] = best + static_cast<double>(o < 0 ? -o : o);
      back[static_cast<std::size_t>(i * W) + u] = static_cast<std::int16_t>(arg);
    }
    std::swap(dev, dev_next);
    std::swap(ok, ok_next);
  }
  long end_o = 0;
  double end_dev = kInf;
  bool found = false;
  for (long o = -B; o <= B; ++o) {
    const std::size_t u = static_cast<std::size_t>(o + B);
    if (!ok[u]) continue;
    if (!found || dev[u] < end_dev || (dev[u] == end_dev && closer_to_diagonal(o, end_o))) {
      end_o = o;
      end_dev = dev[u];
      found = true;
    }
  }
  if (!found) throw std::logic_error("warp traceback lost the optimal path");

  WarpPath out;
  out.cost = bottleneck;
  out.target_index.resize(static_cast<std::size_t>(n));
  long o = end_o;
  for (long i = n - 1; i >= 0; --i) {
    out.target_index[static_cast<std::size_t>(i)] = diag(i) + o;
    if (i > 0) o = back[static_cast<std::size_t>(i * W + o + B)];
  }
  double worst = -1.0;
  for (long i = 0; i < n; ++i) {
    const double c = cell_cost(i, out.target_index[static_cast<std::size_t>(i)]);
    if (c > worst) {
      worst = c;
      out.argmax = static_cast<std::size_t>(i);
    }
  }
  return out;
}

}  // namespace detail

AlignmentResult align(const Space& space, const OrbitSample& xs,
                      const OrbitSample& ys, const AlignOptions& opts) {
  if (xs.size() == 0 || ys.size() == 0) throw std::invalid_argument("empty orbit sample");
  const double h = xs.step_h;
  const double ratio = h / ys.step_h;
  const long R = std::lround(ratio);
  if (R < 1 || std::fabs(static_cast<double>(R) - ratio) > 1e-9 * ratio)
    throw std::invalid_argument("y step must divide x step by a positive integer");
  if (!(opts.band_width >= h))
    throw std::invalid_argument("infeasible band: band_width < h");

  detail::WarpProblem p;
  p.space = &space;
  p.ref = xs.points;
  p.target = ys.points;
  p.ref_first = xs.first_index;
  p.target_first = ys.first_index;
  p.refine = static_cast<int>(R);
  p.band_cells = static_cast<long>(std::floor(opts.band_width / ys.step_h + 1e-9));
  p.step_min = std::max(1, static_cast<int>(std::ceil(R * opts.slope_min - 1e-9)));
  p.step_max = static_cast<int>(std::floor(R * opts.slope_max + 1e-9));
  if (p.step_max < p.step_min) throw std::invalid_argument("empty slope range for this refinement");
  p.abort_above = opts.abort_above;
  switch (opts.weight) {
    case WeightKind::Unit: break;
    case WeightKind::FieldNorm:
      if (xs.field_norms.empty()) throw std::invalid_argument("field_norm weight needs a vector field");
      p.ref_weights = xs.field_norms;
      break;
    case WeightKind::SingDist: p.ref_weights = xs.sing_dists; break;
  }
  if (opts.fix_zero) {
    p.pin_ref = -xs.first_index;
    p.pin_target = -ys.first_index;
    if (*p.pin_ref < 0 || *p.pin_ref >= static_cast<long>(xs.size()) || *p.pin_target < 0 ||
        *p.pin_target >= static_cast<long>(ys.size()))
      throw std::invalid_argument("fix_zero needs t = 0 inside both samples");
  }

  detail::WarpPath path = detail::solve_warp(p);
  AlignmentResult r;
  r.weight_kind = opts.weight;
  r.cost = path.cost;
  r.pruned = path.pruned;
  if (path.pruned) return r;
  std::vector<double> ks(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    ks[i] = ys.times[static_cast<std::size_t>(path.target_index[i])];
  r.reparam = Reparam(xs.times, std::move(ks));
  r.argmax_t = xs.times[path.argmax];
  r.target_index = std::move(path.target_index);
  return r;
}

AlignmentSamples sample_for_alignment(const FlowModel& flow, const Point& x,
                                      double T, double h, int y_refine,
                                      double band_width) {
  if (y_refine < 1) throw std::invalid_argument("y_refine must be >= 1");
  if (!(T > 0.0) || !(h > 0.0)) throw std::invalid_argument("alignment needs T > 0 and h > 0");
  // same rounding of T/h as sample_orbit
  long m = std::lround(T / h);
  double step = h;
  if (m < 1 || std::fabs(static_cast<double>(m) * h - T) > 1e-9 * T) {
    m = static_cast<long>(std::ceil(T / h));
    step = T / static_cast<double>(m);
  }
  const double hy = step / y_refine;
  const long extra = static_cast<long>(std::ceil(band_width / hy - 1e-9));
  const long half = m * y_refine + extra;

  AlignmentSamples out;
  out.fine = sample_orbit_range(flow, x, -half, half, hy);
  OrbitSample& c = out.coarse;
  c.base = x;
  c.step_h = step;
  c.first_index = -m;
  c.window_T = static_cast<double>(m) * step;
  const bool norms = !out.fine.field_norms.empty();
  for (long i = -m; i <= m; ++i) {
    const std::size_t k = static_cast<std::size_t>(i * y_refine + half);
    c.times.push_back(out.fine.times[k]);
    c.points.push_back(out.fine.points[k]);
    c.sing_dists.push_back(out.fine.sing_dists[k]);
    if (norms) c.field_norms.push_back(out.fine.field_norms[k]);
  }
  return out;
}

AlignmentResult align_points(const FlowModel& flow, const Point& x,
                             const Point& y, double T, double h, int y_refine,
                             const AlignOptions& opts) {
  AlignmentSamples xs = sample_for_alignment(flow, x, T, h, y_refine, opts.band_width);
  AlignmentSamples ys = sample_for_alignment(flow, y, T, h, y_refine, opts.band_width);
  return align(flow.space, xs.coarse, ys.fine, opts);
}

double recompute_cost(const FlowModel& flow, const Point& x, const Point& y,
                      const Reparam& s, WeightKind weight,
                      std::span<const double> times) {
  double worst = 0.0;
  for (double t : times) {
    const Point p = flow.evaluate(t, x);
    const Point q = flow.evaluate(s(t), y);
    worst = std::max(worst, detail::weighted_separation(flow.space.distance(p, q),
                                                        weight_of(flow, p, weight)));
  }
  return worst;
}

bool rep_epsilon_check(const Reparam& s, double eps) {
  const auto& kt = s.knots_t();
  const auto& ks = s.knots_s();
  for (std::size_t i = 1; i < kt.size(); ++i) {
    const double slope = (ks[i] - ks[i - 1]) / (kt[i] - kt[i - 1]);
    if (std::fabs(slope - 1.0) > eps + 1e-9) return false;
  }
  return true;
}

std::optional<double> orbit_membership(const FlowModel& flow, const Point& x,
                                       const Point& y, double eps, double tol) {
  if (eps < 0.0) throw std::invalid_argument("orbit_membership needs eps >= 0");
  auto gap = [&](double t) { return flow.space.distance(flow.evaluate(t, x), y); };
  if (gap(0.0) <= tol) return 0.0;
  if (eps == 0.0) return std::nullopt;

  const long cells = std::clamp(static_cast<long>(std::ceil(2.0 * eps / 0.01)), 64L, 20000L);
  std::vector<double> ts(static_cast<std::size_t>(cells + 1)), fs(ts.size());
  for (long k = 0; k <= cells; ++k) {
    const std::size_t u = static_cast<std::size_t>(k);
    ts[u] = k == cells ? eps : -eps + 2.0 * eps * static_cast<double>(k) / static_cast<double>(cells);
    fs[u] = gap(ts[u]);
  }
  std::vector<std::size_t> minima;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const bool left = k == 0 || fs[k] <= fs[k - 1];
    const bool right = k + 1 == ts.size() || fs[k] <= fs[k + 1];
    if (left && right) minima.push_back(k);
  }
  std::stable_sort(minima.begin(), minima.end(),
                   [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });

  constexpr double kInvPhi = 0.6180339887498949;
  std::optional<double> best_t;
  double best_f = kInf;
  const std::size_t tries = std::min<std::size_t>(minima.size(), 4);
  for (std::size_t m = 0; m < tries; ++m) {
    const std::size_t k = minima[m];
    double a = ts[k == 0 ? 0 : k - 1];
    double b = ts[k + 1 == ts.size() ? k : k + 1];
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = gap(c), fd = gap(d);
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = gap(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = gap(d);
      }
    }
    double t = fc <= fd ? c : d;
    double f = std::min(fc, fd);
    if (fs[k] < f) {
      t = ts[k];
      f = fs[k];
    }
    if (f < best_f || (f == best_f && std::fabs(t) < std::fabs(*best_t))) {
      best_f = f;
      best_t = t;
    }
    if (best_f <= tol) break;
  }
  if (best_f <= tol) return best_t;
  return std::nullopt;
}

}  // namespace expanse

#include "expanse/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace expanse {

namespace {

std::vector<double> bowen_times(double t, double h) {
  if (!(t >= 0.0)) throw std::invalid_argument("Bowen horizon must be nonnegative");
  if (!(h > 0.0)) throw std::invalid_argument("Bowen sample step must be positive");
  std::vector<double> s;
  const long n = static_cast<long>(std::floor(t / h + 1e-9));
  for (long k = 0; k <= n; ++k) s.push_back(static_cast<double>(k) * h);
  if (t - s.back() > 1e-9 * std::max(1.0, t)) s.push_back(t);
  return s;
}

/// Symmetric Bowen-ball neighbourhoods (each point includes itself).
std::vector<std::vector<std::size_t>> bowen_neighbours(const FlowModel& flow,
                                                       const std::vector<Point>& K,
                                                       double t, double eps,
                                                       double h) {
  const std::vector<double> ts = bowen_times(t, h);
  const std::size_t n = K.size(), m = ts.size();
  std::vector<Point> traj(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < m; ++s) traj[i * m + s] = flow.evaluate(ts[s], K[i]);

  std::vector<std::vector<std::size_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i) nb[i].push_back(i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (flow.space.distance(K[i], K[j]) > eps) continue;
      bool close = true;
      for (std::size_t s = 1; s < m && close; ++s)
        close = flow.space.distance(traj[i * m + s], traj[j * m + s]) <= eps;
      if (close) {
        nb[i].push_back(j);
        nb[j].push_back(i);
      }
    }
  }
  for (auto& v : nb) std::sort(v.begin(), v.end());
  return nb;
}

std::vector<std::size_t> greedy_cover(const std::vector<std::vector<std::size_t>>& nb) {
  const std::size_t n = nb.size();
  std::vector<std::uint8_t> covered(n, 0);
  std::vector<std::size_t> gain(n);
  for (std::size_t i = 0; i < n; ++i) gain[i] = nb[i].size();
  std::vector<std::size_t> chosen;
  std::size_t left = n;
  while (left > 0) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!covered[i] && (best == n || gain[i] > gain[best])) best = i;
    chosen.push_back(best);
    for (std::size_t j : nb[best]) {
      if (covered[j]) continue;
      covered[j] = 1;
      --left;
      for (std::size_t k : nb[j]) --gain[k];
    }
  }
  return chosen;
}

std::vector<std::size_t> exact_cover(const std::vector<std::vector<std::size_t>>& nb) {
  const std::size_t n = nb.size();
  std::vector<std::uint32_t> mask(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : nb[i]) mask[i] |= std::uint32_t{1} << j;
  const std::uint32_t full = n == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;
  for (std::size_t k = 1; k <= n; ++k) {
    // combinations of size k in lexicographic order
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (;;) {
      std::uint32_t m = 0;
      for (std::size_t i : idx) m |= mask[i];
      if (m == full) return idx;
      std::size_t p = k;
      while (p > 0 && idx[p - 1] == n - k + p - 1) --p;
      if (p == 0) break;
      ++idx[p - 1];
      for (std::size_t q = p; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
  }
  return {};
}

}  // namespace

std::string to_string(SpanningMethod m) {
  return m == SpanningMethod::ExactSmall ? "exact_small" : "greedy_cover";
}

bool bowen_ball_test(const FlowModel& flow, const Point& x, const Point& y,
                     double t, double eps, double h_sample) {
  for (double s : bowen_times(t, h_sample))
    if (flow.space.distance(flow.evaluate(s, x), flow.evaluate(s, y)) > eps) return false;
  return true;
}

SpanningEstimate spanning_cardinality(const FlowModel& flow,
                                      const std::vector<Point>& K_grid, double t,
                                      double eps, double h_sample,
                                      SpanningMethod method) {
  if (K_grid.empty()) throw std::invalid_argument("spanning set of an empty grid");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (method == SpanningMethod::ExactSmall && K_grid.size() > kExactSmallLimit)
    throw std::invalid_argument("exact spanning sets are limited to 20 grid points");

  const auto nb = bowen_neighbours(flow, K_grid, t, eps, h_sample);
  SpanningEstimate est;
  est.t = t;
  est.eps = eps;
  est.method = method;
  est.indices = method == SpanningMethod::ExactSmall ? exact_cover(nb) : greedy_cover(nb);
  est.cardinality = est.indices.size();
  for (std::size_t i : est.indices) est.spanning_points.push_back(K_grid[i]);

  est.verified = true;
  for (const Point& p : K_grid) {
    bool hit = false;
    for (const Point& q : est.spanning_points)
      if (bowen_ball_test(flow, q, p, t, eps, h_sample)) {
        hit = true;
        break;
      }
    if (!hit) {
      est.verified = false;
      break;
    }
  }
  return est;
}

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("slope needs at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("degenerate ladder");
  return sxy / sxx;
}

EntropyEstimate entropy_estimate(const FlowModel& flow,
                                 const std::vector<Point>& K_grid,
                                 const std::vector<double>& t_ladder,
                                 const std::vector<double>& eps_ladder,
                                 double h_sample, const std::string& K_descriptor) {
  if (t_ladder.size() < 2) throw std::invalid_argument("degenerate ladder: need two t values");
  if (eps_ladder.empty()) throw std::invalid_argument("degenerate ladder: no eps values");
  if (!std::is_sorted(t_ladder.begin(), t_ladder.end()) ||
      std::adjacent_find(t_ladder.begin(), t_ladder.end()) != t_ladder.end())
    throw std::invalid_argument("t ladder must be increasing");
  for (std::size_t i = 1; i < eps_ladder.size(); ++i)
    if (!(eps_ladder[i] < eps_ladder[i - 1]))
      throw std::invalid_argument("eps ladder must be decreasing");

  EntropyEstimate out;
  out.K_descriptor = K_descriptor;
  out.K_size = K_grid.size();
  std::vector<std::vector<std::size_t>> r(eps_ladder.size());
  for (std::size_t e = 0; e < eps_ladder.size(); ++e) {
    std::vector<double> logs;
    for (double t : t_ladder) {
      const SpanningEstimate s = spanning_cardinality(flow, K_grid, t, eps_ladder[e], h_sample);
      out.table.push_back({t, eps_ladder[e], s.cardinality});
      r[e].push_back(s.cardinality);
      logs.push_back(std::log(static_cast<double>(s.cardinality)));
    }
    out.per_eps_slopes.emplace_back(eps_ladder[e], ls_slope(t_ladder, logs));
  }
  for (std::size_t e = 0; e < r.size(); ++e) {
    for (std::size_t k = 1; k < r[e].size(); ++k)
      if (r[e][k] < r[e][k - 1]) out.monotone_in_t = false;
    if (e > 0) {
      for (std::size_t k = 0; k < r[e].size(); ++k)
        if (r[e][k] < r[e - 1][k]) out.monotone_in_eps = false;
      if (out.per_eps_slopes[e].second < out.per_eps_slopes[e - 1].second)
        out.slopes_monotone_in_eps = false;
    }
  }
  out.h_estimate = out.per_eps_slopes.back().second;
  return out;
}

std::vector<Point> x_delta_set(const FlowModel& flow, double delta,
                               const std::vector<Point>& grid, double T_escape,
                               double h) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(T_escape > 0.0)) throw std::invalid_argument("T_escape must be positive");
  std::vector<Point> out;
  if (delta > flow.space.diameter()) return out;
  for (const Point& x : grid) {
    if (!(flow.sing_dist(x) >= delta)) continue;
    const OrbitSample s = sample_orbit(flow, x, T_escape, h);
    if (std::all_of(s.sing_dists.begin(), s.sing_dists.end(),
                    [&](double d) { return d >= delta; }))
      out.push_back(x);
  }
  return out;
}

EntropyEstimate h_star_estimate(const FlowModel& flow,
                                const std::vector<double>& delta_ladder,
                                const std::vector<double>& t_ladder,
                                const std::vector<double>& eps_ladder,
                                const std::vector<Point>& grid, double T_escape,
                                double h_sample, double h_escape) {
  if (delta_ladder.empty()) throw std::invalid_argument("empty delta ladder");
  for (double d : delta_ladder)
    if (!(d > 0.0)) throw std::invalid_argument("delta ladder must be positive");
  EntropyEstimate best;
  best.all_empty = true;
  best.K_descriptor = "X_delta";
  std::vector<std::pair<double, double>> per_delta;
  std::vector<std::pair<double, std::size_t>> sizes;
  for (double d : delta_ladder) {
    const std::vector<Point> K = x_delta_set(flow, d, grid, T_escape, h_escape);
    sizes.emplace_back(d, K.size());
    if (K.empty()) continue;
    EntropyEstimate e = entropy_estimate(flow, K, t_ladder, eps_ladder, h_sample,
                                         "X_delta");
    per_delta.emplace_back(d, e.h_estimate);
    if (best.all_empty || e.h_estimate > best.h_estimate) {
      best = std::move(e);
      best.all_empty = false;
    }
  }
  if (best.all_empty) best.h_estimate = 0.0;
  best.per_delta_h = std::move(per_delta);
  best.per_delta_size = std::move(sizes);
  best.K_descriptor = "X_delta";
  return best;
}

}  // namespace expanse

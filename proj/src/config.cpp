#include "expanse/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace expanse {

namespace {

std::vector<std::string> split_dots(const std::string& key) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string p;
  while (std::getline(ss, p, '.')) {
    if (p.empty()) throw std::invalid_argument("empty segment in key '" + key + "'");
    parts.push_back(p);
  }
  if (parts.empty()) throw std::invalid_argument("empty override key");
  return parts;
}

void merge_into(Json& base, const Json& user, const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw std::invalid_argument("unknown config key '" + key + "'");
    Json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object()) {
      merge_into(slot, it.value(), key);
    } else if (slot.is_object()) {
      throw std::invalid_argument("config key '" + key + "' must be an object");
    } else {
      slot = it.value();
    }
  }
}

const Json& at_path(const Json& cfg, const std::string& key) {
  const Json* node = &cfg;
  for (const auto& p : split_dots(key)) {
    if (!node->is_object() || !node->contains(p))
      throw std::invalid_argument("missing config key '" + key + "'");
    node = &(*node)[p];
  }
  return *node;
}

double num(const Json& cfg, const std::string& key) {
  const Json& v = at_path(cfg, key);
  if (!v.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
  return v.get<double>();
}

long integer(const Json& cfg, const std::string& key) {
  const Json& v = at_path(cfg, key);
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long>(v.get<double>())))
    return static_cast<long>(v.get<double>());
  throw std::invalid_argument("config key '" + key + "' must be an integer");
}

void require_positive(const Json& cfg, const std::string& key) {
  if (!(num(cfg, key) > 0.0))
    throw std::invalid_argument("config key '" + key + "' must be positive");
}

void require_present(const Json& cfg, const std::string& key, const std::string& task) {
  if (at_path(cfg, key).is_null())
    throw std::invalid_argument("task '" + task + "' needs config key '" + key + "'");
}

void require_ladder(const Json& cfg, const std::string& key, std::size_t min_size = 1) {
  const Json& v = at_path(cfg, key);
  if (!v.is_array()) throw std::invalid_argument("config key '" + key + "' must be an array");
  if (v.size() < min_size)
    throw std::invalid_argument("degenerate ladder: config key '" + key + "' needs at least " +
                                std::to_string(min_size) + " values");
  for (const auto& x : v)
    if (!x.is_number() || !(x.get<double>() > 0.0))
      throw std::invalid_argument("config key '" + key + "' must hold positive numbers");
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {
      "check", "falsify", "equicontinuity", "ball-inclusion", "constants",
      "shadow", "entropy", "hstar", "xdelta"};
  return names;
}

Json default_config() {
  return Json::parse(R"({
    "flow": {
      "name": "interval",
      "lambda": 1.0,
      "radii": "exp",
      "depth": 32,
      "radii_list": null,
      "space": "finite",
      "points": null
    },
    "property": "singular_expansive",
    "eps": null,
    "delta": null,
    "strict_t0": false,
    "t0_stride": 1,
    "sampling": {
      "T": 20.0,
      "h": 0.01,
      "band_width": 2.0,
      "y_refine": 2,
      "slope_min": 0.5,
      "slope_max": 2.0,
      "grid": 64,
      "angles": 8,
      "rows": null,
      "geometric_levels": 20,
      "ball_samples": 8,
      "max_pairs": 1000000,
      "tol_orbit": 1e-7,
      "seed": null
    },
    "ladders": {
      "t": [2.0, 4.0, 6.0, 8.0],
      "eps": [0.1],
      "delta": [0.2, 0.1, 0.05]
    },
    "delta_search": {"lo": 0.001, "hi": 1.0, "iterations": 8},
    "shadow": {
      "mode": "random",
      "count": 10,
      "x0": null,
      "n_segments": 10,
      "delta": 0.001,
      "t_min": 1.0,
      "h": 0.01,
      "refine": 20,
      "band_width": 0.0,
      "candidate_radius": 0.0,
      "candidates": 9,
      "r0": 0.5,
      "hop": 0.02
    },
    "entropy": {"h_sample": 0.1},
    "xdelta": {"T_escape": 50.0, "h": 0.01},
    "constants": {
      "pairs": 10000,
      "return_deltas": [0.05, 0.1, 0.2, 0.29],
      "return_t_max": 10.0,
      "return_h": 0.001
    },
    "output": {"dir": "out"}
  })");
}

Json load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config '" + path.string() + "'");
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

Json resolve_config(const Json& user) {
  if (!user.is_object()) throw std::invalid_argument("config must be a JSON object");
  Json cfg = default_config();
  merge_into(cfg, user, "");
  return cfg;
}

void apply_override(Json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must look like key=value, got '" + assignment + "'");
  const auto parts = split_dots(assignment.substr(0, eq));
  const std::string raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::parse_error&) {
    value = raw;
  }
  Json* node = &cfg;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i]))
      throw std::invalid_argument("unknown config key '" + assignment.substr(0, eq) + "'");
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() || !node->contains(parts.back()))
    throw std::invalid_argument("unknown config key '" + assignment.substr(0, eq) + "'");
  (*node)[parts.back()] = value;
}

void validate_config(const Json& cfg, const std::string& task) {
  if (std::find(task_names().begin(), task_names().end(), task) == task_names().end())
    throw std::invalid_argument("unknown task '" + task + "'");
  (void)flow_spec_from(cfg.at("flow"));
  for (const char* k : {"sampling.T", "sampling.h", "sampling.band_width", "sampling.slope_min",
                        "sampling.slope_max", "sampling.tol_orbit"})
    require_positive(cfg, k);
  for (const char* k : {"sampling.y_refine", "sampling.grid", "sampling.angles",
                        "sampling.ball_samples", "sampling.max_pairs", "t0_stride"})
    if (integer(cfg, k) < 1) throw std::invalid_argument(std::string("config key '") + k + "' must be >= 1");
  if (!at_path(cfg, "sampling.rows").is_null() && integer(cfg, "sampling.rows") < 1)
    throw std::invalid_argument("config key 'sampling.rows' must be >= 1");
  if (integer(cfg, "sampling.geometric_levels") < 0)
    throw std::invalid_argument("config key 'sampling.geometric_levels' must be >= 0");
  if (!at_path(cfg, "sampling.seed").is_null() && integer(cfg, "sampling.seed") < 0)
    throw std::invalid_argument("config key 'sampling.seed' must be a nonnegative integer");
  if (!at_path(cfg, "eps").is_null()) require_positive(cfg, "eps");
  if (!at_path(cfg, "delta").is_null()) require_positive(cfg, "delta");
  (void)property_from_string(at_path(cfg, "property").get<std::string>());

  if (task == "falsify" || task == "ball-inclusion" || task == "equicontinuity") {
    require_present(cfg, "eps", task);
    require_present(cfg, "delta", task);
  }
  if (task == "check") {
    if (at_path(cfg, "eps").is_null()) require_ladder(cfg, "ladders.eps");
    if (at_path(cfg, "delta").is_null()) {
      require_positive(cfg, "delta_search.lo");
      require_positive(cfg, "delta_search.hi");
      if (integer(cfg, "delta_search.iterations") < 0)
        throw std::invalid_argument("config key 'delta_search.iterations' must be >= 0");
    }
  }
  if (task == "shadow" || task == "constants")
    require_present(cfg, "sampling.seed", task);
  if (task == "shadow") {
    require_present(cfg, "eps", task);
    for (const char* k : {"shadow.h", "shadow.t_min"}) require_positive(cfg, k);
    for (const char* k : {"shadow.count", "shadow.n_segments", "shadow.refine", "shadow.candidates"})
      if (integer(cfg, k) < 1) throw std::invalid_argument(std::string("config key '") + k + "' must be >= 1");
    const std::string mode = at_path(cfg, "shadow.mode").get<std::string>();
    if (mode != "random" && mode != "radial_drift")
      throw std::invalid_argument("config key 'shadow.mode' must be random or radial_drift");
  }
  if (task == "entropy" || task == "hstar") {
    require_ladder(cfg, "ladders.t", 2);
    require_ladder(cfg, "ladders.eps");
    require_positive(cfg, "entropy.h_sample");
  }
  if (task == "hstar" || task == "xdelta") {
    require_positive(cfg, "xdelta.T_escape");
    require_positive(cfg, "xdelta.h");
    if (task == "hstar" || at_path(cfg, "delta").is_null()) require_ladder(cfg, "ladders.delta");
  }
  if (task == "constants") {
    require_ladder(cfg, "constants.return_deltas");
    require_positive(cfg, "constants.return_t_max");
    require_positive(cfg, "constants.return_h");
  }
}

FlowSpec flow_spec_from(const Json& flow) {
  FlowSpec s;
  s.name = flow.at("name").get<std::string>();
  s.lambda = flow.at("lambda").get<double>();
  const std::string radii = flow.at("radii").get<std::string>();
  if (radii == "exp") s.radii = RadiiFamily::Exp;
  else if (radii == "harmonic") s.radii = RadiiFamily::Harmonic;
  else if (radii == "list") s.radii = RadiiFamily::List;
  else throw std::invalid_argument("flow.radii must be exp, harmonic or list");
  s.depth = flow.at("depth").get<int>();
  if (!flow.at("radii_list").is_null()) {
    for (const auto& r : flow.at("radii_list")) {
      const double v = r.get<double>();
      if (!(v > 0.0)) throw std::invalid_argument("flow.radii_list must hold positive radii");
      s.radii_list.push_back(v);
    }
  }
  if (s.radii == RadiiFamily::List && s.radii_list.empty())
    throw std::invalid_argument("flow.radii = list needs flow.radii_list");
  if (s.name == "circles" && s.radii != RadiiFamily::List && s.depth < 1)
    throw std::invalid_argument("flow.depth must be >= 1");
  s.trivial_space = flow.at("space").get<std::string>();
  if (!flow.at("points").is_null())
    for (const auto& p : flow.at("points")) s.finite_points.push_back(point_from_json(p));
  if (s.name != "interval" && s.name != "circles" && s.name != "trivial" &&
      s.name != "suspension_doubling")
    throw std::invalid_argument("unknown flow '" + s.name + "'");
  return s;
}

GridSpec grid_spec_from(const Json& cfg) {
  GridSpec g;
  g.per_dim = static_cast<int>(integer(cfg, "sampling.grid"));
  g.angles = static_cast<int>(integer(cfg, "sampling.angles"));
  g.geometric_levels = static_cast<int>(integer(cfg, "sampling.geometric_levels"));
  if (!at_path(cfg, "sampling.rows").is_null())
    g.rows = static_cast<int>(integer(cfg, "sampling.rows"));
  return g;
}

CheckOptions check_options_from(const Json& cfg) {
  CheckOptions o;
  o.T = num(cfg, "sampling.T");
  o.h = num(cfg, "sampling.h");
  o.band_width = num(cfg, "sampling.band_width");
  o.y_refine = static_cast<int>(integer(cfg, "sampling.y_refine"));
  o.slope_min = num(cfg, "sampling.slope_min");
  o.slope_max = num(cfg, "sampling.slope_max");
  o.strict_t0 = at_path(cfg, "strict_t0").get<bool>();
  o.t0_stride = static_cast<int>(integer(cfg, "t0_stride"));
  o.max_pairs = static_cast<std::size_t>(integer(cfg, "sampling.max_pairs"));
  o.orbit_tol = num(cfg, "sampling.tol_orbit");
  o.ball_samples = static_cast<int>(integer(cfg, "sampling.ball_samples"));
  return o;
}

ShadowOptions shadow_options_from(const Json& cfg) {
  ShadowOptions o;
  o.h = num(cfg, "shadow.h");
  o.refine = static_cast<int>(integer(cfg, "shadow.refine"));
  o.band_width = num(cfg, "shadow.band_width");
  o.candidate_radius = num(cfg, "shadow.candidate_radius");
  o.candidate_count = static_cast<int>(integer(cfg, "shadow.candidates"));
  return o;
}

}  // namespace expanse

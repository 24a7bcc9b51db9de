#include "expanse/runner.hpp"

#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "expanse/config.hpp"
#include "expanse/entropy.hpp"
#include "expanse/expansivity.hpp"
#include "expanse/shadowing.hpp"

namespace expanse {

namespace {

std::vector<double> ladder(const Json& cfg, const std::string& single, const std::string& key) {
  std::vector<double> v;
  if (!single.empty() && !cfg.at(single).is_null()) {
    v.push_back(cfg.at(single).get<double>());
    return v;
  }
  for (const auto& x : cfg.at("ladders").at(key)) v.push_back(x.get<double>());
  return v;
}

Json flow_block(const FlowModel& flow) {
  return {{"name", flow.name},
          {"space", to_string(flow.space.kind())},
          {"diameter", number(flow.space.diameter())},
          {"invertible", flow.invertible},
          {"has_field", flow.has_field()}};
}

std::string grid_csv(const std::vector<Point>& pts, const std::string& lead_name = "",
                     double lead = 0.0) {
  std::vector<std::string> head;
  if (!lead_name.empty()) head.push_back(lead_name);
  head.insert(head.end(), {"x0", "x1"});
  CsvTable t(head);
  for (const Point& p : pts) {
    std::vector<std::string> row;
    if (!lead_name.empty()) row.push_back(format_number(lead));
    row.push_back(format_number(p.c[0]));
    row.push_back(p.dim == 2 ? format_number(p.c[1]) : "");
    t.add_row(row);
  }
  return t.str();
}

int verdict_exit(Verdict v) { return v == Verdict::Falsified ? kExitFalsified : kExitOk; }

void property_run(TaskOutput& out, const std::string& task, const Json& cfg,
                  const FlowModel& flow) {
  const Property prop = property_from_string(cfg.at("property").get<std::string>());
  const CheckOptions opts = check_options_from(cfg);
  const GridSpec gs = grid_spec_from(cfg);
  const std::vector<double> eps_list = ladder(cfg, "eps", "eps");
  const bool equi = prop == Property::Equicontinuous || prop == Property::SingularEquicontinuous;

  if (task == "check" && cfg.at("delta").is_null()) {
    if (equi) throw std::invalid_argument("delta search is only available for alignment properties");
    const PairGrid grid = make_pair_grid(flow, gs);
    const double lo = cfg.at("delta_search").at("lo").get<double>();
    const double hi = cfg.at("delta_search").at("hi").get<double>();
    const int iters = cfg.at("delta_search").at("iterations").get<int>();
    Json curves = Json::array();
    CsvTable curve({"eps", "delta_star"});
    CsvTable trials({"eps", "delta", "verdict"});
    for (double eps : eps_list) {
      DeltaSearchResult d = delta_search(flow, prop, eps, grid, opts, lo, hi, iters);
      Json tj = Json::array();
      for (const auto& [delta, v] : d.trials) {
        tj.push_back({{"delta", number(delta)}, {"verdict", to_string(v)}});
        trials.add_row({format_number(eps), format_number(delta), to_string(v)});
      }
      curves.push_back({{"eps", number(eps)}, {"delta_star", number(d.delta_star)}, {"trials", tj}});
      curve.add_row({format_number(eps), format_number(d.delta_star)});
    }
    out.report["result"] = {{"mode", "delta_search"}, {"property", to_string(prop)},
                            {"curves", curves}, {"grid_size", grid.points.size()}};
    out.verdict = "completed";
    out.tables[task + "_delta_curve.csv"] = curve.str();
    out.tables[task + "_delta_trials.csv"] = trials.str();
    return;
  }

  const double delta = cfg.at("delta").get<double>();
  Json reports = Json::array();
  CsvTable summary({"eps", "delta", "verdict"});
  Verdict overall = Verdict::CertifiedAtScale;
  std::string pairs_csv;
  for (double eps : eps_list) {
    PropertyReport r;
    if (equi) {
      const auto grid = default_grid(flow.space, flow.singular, gs);
      r = check_equicontinuity(flow, prop == Property::SingularEquicontinuous, eps, delta, grid, opts);
    } else {
      r = check_property(flow, prop, eps, delta, make_pair_grid(flow, gs), opts);
    }
    reports.push_back(to_json(r));
    summary.add_row({format_number(eps), format_number(delta), to_string(r.verdict)});
    if (r.verdict == Verdict::Falsified) overall = Verdict::Falsified;
    else if (r.verdict == Verdict::Inconclusive && overall != Verdict::Falsified)
      overall = Verdict::Inconclusive;
    std::string t = pair_table(r).str();
    pairs_csv += pairs_csv.empty() ? t : t.substr(t.find('\n') + 1);
  }
  out.report["result"] = {{"mode", "fixed_delta"}, {"reports", reports}};
  out.verdict = to_string(overall);
  out.exit_code = verdict_exit(overall);
  out.tables[task + "_pairs.csv"] = pairs_csv;
  out.tables[task + "_summary.csv"] = summary.str();
}

void equicontinuity_run(TaskOutput& out, const Json& cfg, const FlowModel& flow) {
  const Property prop = property_from_string(cfg.at("property").get<std::string>());
  const bool singular = prop == Property::SingularEquicontinuous;
  const auto grid = default_grid(flow.space, flow.singular, grid_spec_from(cfg));
  PropertyReport r = check_equicontinuity(flow, singular, cfg.at("eps").get<double>(),
                                          cfg.at("delta").get<double>(), grid,
                                          check_options_from(cfg));
  out.report["result"] = to_json(r);
  out.verdict = to_string(r.verdict);
  out.exit_code = verdict_exit(r.verdict);
  out.tables["equicontinuity_pairs.csv"] = pair_table(r).str();
}

void ball_run(TaskOutput& out, const Json& cfg, const FlowModel& flow) {
  const auto grid = default_grid(flow.space, flow.singular, grid_spec_from(cfg));
  const CheckOptions opts = check_options_from(cfg);
  PropertyReport r = ball_inclusion_check(flow, cfg.at("eps").get<double>(),
                                          cfg.at("delta").get<double>(), grid,
                                          opts.ball_samples, opts);
  out.report["result"] = to_json(r);
  out.verdict = to_string(r.verdict);
  out.exit_code = verdict_exit(r.verdict);
  out.tables["ball-inclusion_pairs.csv"] = pair_table(r).str();
}

void constants_run(TaskOutput& out, const Json& cfg, const FlowModel& flow) {
  if (!flow.has_field())
    throw std::invalid_argument("flow '" + flow.name + "' has no vector field for constants");
  const auto grid = default_grid(flow.space, flow.singular, grid_spec_from(cfg));
  const Json& c = cfg.at("constants");
  const ComparabilityConstants bc = comparability_constants(flow, grid);
  const LocalNormConstant ln = local_norm_constant(
      flow, grid, c.at("pairs").get<std::size_t>(), cfg.at("sampling").at("seed").get<std::uint64_t>());
  std::vector<double> deltas;
  for (const auto& d : c.at("return_deltas")) deltas.push_back(d.get<double>());
  std::vector<Point> moving;
  for (const Point& p : grid)
    if (flow.field(p).norm() > 0.0) moving.push_back(p);
  const ReturnTimeReport rt = return_time_bound_check(
      flow, moving, deltas, c.at("return_t_max").get<double>(), c.at("return_h").get<double>());
  const WeightBridgeStats wb = weight_bridge_check(flow, bc, grid);
  out.report["result"] = {{"comparability", to_json(bc)},
                          {"local_norm", to_json(ln)},
                          {"return_time", to_json(rt)},
                          {"weight_bridge", {{"points", wb.points},
                                             {"violations", wb.violations},
                                             {"worst_excess", number(wb.worst_excess)}}},
                          {"grid_size", grid.size()}};
  out.verdict = "completed";
  CsvTable t({"x0", "x1", "field_norm", "sing_dist"});
  for (const Point& p : grid)
    t.add_row({format_number(p.c[0]), p.dim == 2 ? format_number(p.c[1]) : "",
               format_number(flow.field(p).norm()), format_number(flow.sing_dist(p))});
  out.tables["constants_grid.csv"] = t.str();
}

void shadow_run(TaskOutput& out, const Json& cfg, const FlowModel& flow) {
  const Json& s = cfg.at("shadow");
  const double eps = cfg.at("eps").get<double>();
  const ShadowOptions so = shadow_options_from(cfg);
  const std::string mode = s.at("mode").get<std::string>();
  std::mt19937_64 rng(cfg.at("sampling").at("seed").get<std::uint64_t>());

  std::vector<PseudoOrbit> orbits;
  if (mode == "radial_drift") {
    orbits.push_back(radial_drift_pseudo_orbit(flow, s.at("r0").get<double>(), s.at("hop").get<double>(),
                                               s.at("n_segments").get<int>(), s.at("t_min").get<double>()));
  } else {
    const auto grid = default_grid(flow.space, flow.singular, grid_spec_from(cfg));
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    const int count = s.at("count").get<int>();
    for (int k = 0; k < count; ++k) {
      Point x0 = s.at("x0").is_null() ? grid[pick(rng)] : point_from_json(s.at("x0"));
      const std::uint64_t seed = rng();
      orbits.push_back(generate_pseudo_orbit(flow, x0, s.at("n_segments").get<int>(),
                                             s.at("delta").get<double>(),
                                             s.at("t_min").get<double>(), seed));
    }
  }

  Json rows = Json::array();
  CsvTable t({"orbit", "shadowed", "max_error", "rep_eps_ok", "max_jump", "candidates_tried"});
  std::size_t shadowed = 0;
  for (std::size_t k = 0; k < orbits.size(); ++k) {
    const PseudoOrbit& po = orbits[k];
    auto r = find_shadow(flow, po, eps, so);
    const double jump = max_seam_jump(flow, po);
    Json row = {{"orbit", k}, {"x0", to_json(po.x(std::max(0L, po.first_index)))},
                {"first_index", po.first_index}, {"segments", po.size()},
                {"max_jump", number(jump)}, {"shadowed", r.has_value()}};
    if (r) {
      ++shadowed;
      row["shadow"] = to_json(*r);
      row["rep_eps_ok"] = rep_epsilon_check(r->reparam, eps);
    }
    rows.push_back(row);
    t.add_row({std::to_string(k), r ? "1" : "0", r ? format_number(r->max_error) : "",
               r ? (rep_epsilon_check(r->reparam, eps) ? "1" : "0") : "",
               format_number(jump), r ? std::to_string(r->candidates_tried) : ""});
    std::ostringstream rec;
    write_pseudo_orbit(rec, po);
    char name[64];
    std::snprintf(name, sizeof name, "pseudo_orbits/po_%03zu.txt", k);
    out.extra_files[name] = rec.str();
  }
  const Verdict v = shadowed == orbits.size() ? Verdict::CertifiedAtScale : Verdict::Falsified;
  out.report["result"] = {{"mode", mode}, {"eps", number(eps)}, {"orbits", rows},
                          {"shadowed", shadowed}, {"total", orbits.size()},
                          {"verdict", to_string(v)}};
  out.verdict = to_string(v);
  out.exit_code = verdict_exit(v);
  out.tables["shadow_orbits.csv"] = t.str();
}

void entropy_run(TaskOutput& out, const Json& cfg, const FlowModel& flow) {
  const auto grid = default_grid(flow.space, flow.singular, grid_spec_from(cfg));
  EntropyEstimate e = entropy_estimate(flow, grid, ladder(cfg, "", "t"), ladder(cfg, "", "eps"),
                                       cfg.at("entropy").at("h_sample").get<double>(),
                                       "default grid");
  out.report["result"] = to_json(e);
  out.verdict = "completed";
  out.tables["entropy_spanning.csv"] = spanning_table(e).str();
}

void hstar_run(TaskOutput& out, const Json& cfg, const FlowModel& flow) {
  const auto grid = default_grid(flow.space, flow.singular, grid_spec_from(cfg));
  EntropyEstimate e = h_star_estimate(flow, ladder(cfg, "", "delta"), ladder(cfg, "", "t"),
                                      ladder(cfg, "", "eps"), grid,
                                      cfg.at("xdelta").at("T_escape").get<double>(),
                                      cfg.at("entropy").at("h_sample").get<double>(),
                                      cfg.at("xdelta").at("h").get<double>());
  out.report["result"] = to_json(e);
  out.verdict = "completed";
  out.tables["hstar_spanning.csv"] = spanning_table(e).str();
}

void xdelta_run(TaskOutput& out, const Json& cfg, const FlowModel& flow) {
  const auto grid = default_grid(flow.space, flow.singular, grid_spec_from(cfg));
  const double T = cfg.at("xdelta").at("T_escape").get<double>();
  const double h = cfg.at("xdelta").at("h").get<double>();
  Json sets = Json::array();
  std::string csv;
  for (double d : ladder(cfg, "delta", "delta")) {
    const auto pts = x_delta_set(flow, d, grid, T, h);
    Json pj = Json::array();
    for (const Point& p : pts) pj.push_back(to_json(p));
    sets.push_back({{"delta", number(d)}, {"size", pts.size()}, {"points", pj}});
    std::string part = grid_csv(pts, "delta", d);
    csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
  }
  if (csv.empty()) csv = "delta,x0,x1\n";
  out.report["result"] = {{"sets", sets}, {"grid_size", grid.size()},
                          {"T_escape", number(T)}};
  out.verdict = "completed";
  out.tables["xdelta_points.csv"] = csv;
}

}  // namespace

TaskOutput execute_task(const std::string& task, const Json& cfg) {
  validate_config(cfg, task);
  const FlowModel flow = make_flow(flow_spec_from(cfg.at("flow")));
  TaskOutput out;
  // where the files go is not part of the experiment
  Json recorded = cfg;
  recorded.erase("output");
  out.report = {{"task", task}, {"config", recorded}, {"flow", flow_block(flow)}};
  if (task == "check" || task == "falsify") property_run(out, task, cfg, flow);
  else if (task == "equicontinuity") equicontinuity_run(out, cfg, flow);
  else if (task == "ball-inclusion") ball_run(out, cfg, flow);
  else if (task == "constants") constants_run(out, cfg, flow);
  else if (task == "shadow") shadow_run(out, cfg, flow);
  else if (task == "entropy") entropy_run(out, cfg, flow);
  else if (task == "hstar") hstar_run(out, cfg, flow);
  else if (task == "xdelta") xdelta_run(out, cfg, flow);
  else throw std::invalid_argument("unknown task '" + task + "'");
  out.report["verdict"] = out.verdict;
  out.report["exit_code"] = out.exit_code;
  return out;
}

int run_task(const std::string& task, const Json& cfg,
             std::vector<std::filesystem::path>* written) {
  TaskOutput out = execute_task(task, cfg);
  const std::filesystem::path dir = cfg.at("output").at("dir").get<std::string>();
  auto put = [&](const std::filesystem::path& p, const std::string& content) {
    write_text_file(p, content);
    if (written) written->push_back(p);
  };
  put(dir / (task + ".json"), dump_report(out.report));
  for (const auto& [name, content] : out.tables) put(dir / name, content);
  for (const auto& [name, content] : out.extra_files) put(dir / name, content);
  return out.exit_code;
}

}  // namespace expanse

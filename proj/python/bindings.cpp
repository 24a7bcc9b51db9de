#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "expanse/config.hpp"
#include "expanse/entropy.hpp"
#include "expanse/errors.hpp"
#include "expanse/expansivity.hpp"
#include "expanse/report.hpp"
#include "expanse/runner.hpp"
#include "expanse/shadowing.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace expanse;

namespace {

// Reports cross the boundary as JSON text; the Python side decodes them.
std::string dumps(const Json& j) { return dump_report(j); }

CheckOptions options(double T, double h, double band_width, int y_refine, bool strict_t0,
                     int ball_samples) {
  CheckOptions o;
  o.T = T;
  o.h = h;
  o.band_width = band_width;
  o.y_refine = y_refine;
  o.strict_t0 = strict_t0;
  o.ball_samples = ball_samples;
  return o;
}

}  // namespace

PYBIND11_MODULE(_expanse, m) {
  m.doc() = "Expansivity, shadowing and entropy checks for flows";
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded");

  py::class_<Point>(m, "Point")
      .def(py::init<double>(), "x"_a)
      .def(py::init<double, double>(), "x"_a, "y"_a)
      .def_property_readonly("dim", [](const Point& p) { return p.dim; })
      .def_property_readonly("coords", [](const Point& p) -> py::tuple {
        if (p.dim == 1) return py::make_tuple(p.c[0]);
        return py::make_tuple(p.c[0], p.c[1]);
      })
      .def("__eq__", [](const Point& a, const Point& b) { return a == b; })
      .def("__repr__", [](const Point& p) {
        std::ostringstream os;
        os.precision(17);
        os << "Point(" << p.c[0];
        if (p.dim == 2) os << ", " << p.c[1];
        os << ")";
        return os.str();
      });

  py::class_<FlowModel>(m, "Flow")
      .def_readonly("name", &FlowModel::name)
      .def_readonly("invertible", &FlowModel::invertible)
      .def_property_readonly("diameter", [](const FlowModel& f) { return f.space.diameter(); })
      .def_property_readonly("space", [](const FlowModel& f) { return to_string(f.space.kind()); })
      .def("evaluate", &FlowModel::evaluate, "t"_a, "x"_a)
      .def("sing_dist", &FlowModel::sing_dist, "x"_a)
      .def("distance", [](const FlowModel& f, const Point& a, const Point& b) {
        return f.space.distance(a, b);
      })
      .def("field_norm", [](const FlowModel& f, const Point& x) { return field_norm(f, x); })
      .def("grid", [](const FlowModel& f, int per_dim, int angles, int geometric_levels, int rows) {
        GridSpec g;
        g.per_dim = per_dim;
        g.angles = angles;
        g.geometric_levels = geometric_levels;
        g.rows = rows;
        return default_grid(f.space, f.singular, g);
      }, "per_dim"_a = 64, "angles"_a = 8, "geometric_levels"_a = 20, "rows"_a = -1);

  m.def("make_flow", [](const std::string& flow_json) {
    Json cfg = resolve_config(Json{{"flow", Json::parse(flow_json)}});
    return make_flow(flow_spec_from(cfg.at("flow")));
  }, "flow_json"_a);
  m.def("interval_flow_transit_time", &interval_flow_transit_time, "x"_a, "y"_a);
  m.def("orbit_membership", &orbit_membership, "flow"_a, "x"_a, "y"_a, "eps"_a, "tol"_a = 1e-7);
  m.def("rep_epsilon_check", [](std::vector<double> kt, std::vector<double> ks, double eps) {
    return rep_epsilon_check(Reparam(std::move(kt), std::move(ks)), eps);
  }, "knots_t"_a, "knots_s"_a, "eps"_a);

  m.def("_align_points", [](const FlowModel& f, const Point& x, const Point& y, const std::string& weight,
                            bool fix_zero, double T, double h, int y_refine, double band_width) {
    AlignOptions o;
    o.weight = weight_kind_from_string(weight);
    o.fix_zero = fix_zero;
    o.band_width = band_width;
    return dumps(to_json(align_points(f, x, y, T, h, y_refine, o)));
  }, "flow"_a, "x"_a, "y"_a, "weight"_a = "unit", "fix_zero"_a = false, "T"_a = 20.0,
     "h"_a = 0.01, "y_refine"_a = 2, "band_width"_a = 2.0);

  m.def("_check_property", [](const FlowModel& f, const std::string& property, double eps, double delta,
                              std::vector<Point> grid, double T, double h, double band_width,
                              int y_refine, bool strict_t0) {
    PairGrid g;
    g.points = std::move(grid);
    return dumps(to_json(check_property(f, property_from_string(property), eps, delta, g,
                                        options(T, h, band_width, y_refine, strict_t0, 8))));
  }, "flow"_a, "property"_a, "eps"_a, "delta"_a, "grid"_a, "T"_a = 20.0, "h"_a = 0.01,
     "band_width"_a = 2.0, "y_refine"_a = 2, "strict_t0"_a = false);

  m.def("_check_equicontinuity", [](const FlowModel& f, bool singular, double eps, double delta,
                                    const std::vector<Point>& grid, double T, double h, int ball_samples) {
    return dumps(to_json(check_equicontinuity(f, singular, eps, delta, grid,
                                              options(T, h, 2.0, 2, false, ball_samples))));
  }, "flow"_a, "singular"_a, "eps"_a, "delta"_a, "grid"_a, "T"_a = 20.0, "h"_a = 0.01,
     "ball_samples"_a = 8);

  m.def("_ball_inclusion_check", [](const FlowModel& f, double eps, double delta,
                                    const std::vector<Point>& grid, int ball_samples) {
    return dumps(to_json(ball_inclusion_check(f, eps, delta, grid, ball_samples)));
  }, "flow"_a, "eps"_a, "delta"_a, "grid"_a, "ball_samples"_a = 8);

  m.def("_comparability_constants", [](const FlowModel& f, const std::vector<Point>& grid) {
    return dumps(to_json(comparability_constants(f, grid)));
  }, "flow"_a, "grid"_a);

  m.def("_local_norm_constant", [](const FlowModel& f, const std::vector<Point>& grid,
                                   std::size_t pairs, std::uint64_t seed) {
    return dumps(to_json(local_norm_constant(f, grid, pairs, seed)));
  }, "flow"_a, "grid"_a, "pairs"_a = 10000, "seed"_a = 1);

  py::class_<PseudoOrbit>(m, "PseudoOrbit")
      .def(py::init([](std::vector<Point> pts, std::vector<double> durations, long first_index) {
        if (pts.size() != durations.size())
          throw std::invalid_argument("points and durations differ in length");
        PseudoOrbit po;
        po.points = std::move(pts);
        po.durations = std::move(durations);
        po.first_index = first_index;
        return po;
      }), "points"_a, "durations"_a, "first_index"_a = 0)
      .def_readonly("first_index", &PseudoOrbit::first_index)
      .def_readonly("points", &PseudoOrbit::points)
      .def_readonly("durations", &PseudoOrbit::durations)
      .def_readonly("delta", &PseudoOrbit::delta)
      .def("__len__", &PseudoOrbit::size)
      .def("clock", [](const PseudoOrbit& po, long i) { return cumulative_clock(po, i); }, "i"_a)
      .def("to_record", [](const PseudoOrbit& po) {
        std::ostringstream os;
        write_pseudo_orbit(os, po);
        return os.str();
      })
      .def_static("from_record", [](const std::string& s) {
        std::istringstream is(s);
        return read_pseudo_orbit(is);
      });

  m.def("generate_pseudo_orbit", &generate_pseudo_orbit, "flow"_a, "x0"_a, "n_segments"_a,
        "delta"_a, "t_min"_a = 1.0, "seed"_a = 0);
  m.def("max_seam_jump", &max_seam_jump, "flow"_a, "pseudo_orbit"_a);
  m.def("_find_shadow", [](const FlowModel& f, const PseudoOrbit& po, double eps) -> py::object {
    auto r = find_shadow(f, po, eps);
    if (!r) return py::none();
    Json j = to_json(*r);
    j["rep_eps_ok"] = rep_epsilon_check(r->reparam, eps);
    return py::str(dumps(j));
  }, "flow"_a, "pseudo_orbit"_a, "eps"_a);

  m.def("bowen_ball_test", &bowen_ball_test, "flow"_a, "x"_a, "y"_a, "t"_a, "eps"_a,
        "h_sample"_a = 0.1);
  m.def("_spanning_cardinality", [](const FlowModel& f, const std::vector<Point>& grid, double t,
                                    double eps, double h_sample, bool exact) {
    return dumps(to_json(spanning_cardinality(
        f, grid, t, eps, h_sample, exact ? SpanningMethod::ExactSmall : SpanningMethod::GreedyCover)));
  }, "flow"_a, "grid"_a, "t"_a, "eps"_a, "h_sample"_a = 0.1, "exact"_a = false);
  m.def("_entropy_estimate", [](const FlowModel& f, const std::vector<Point>& grid,
                                const std::vector<double>& ts, const std::vector<double>& epss,
                                double h_sample) {
    return dumps(to_json(entropy_estimate(f, grid, ts, epss, h_sample)));
  }, "flow"_a, "grid"_a, "t_ladder"_a, "eps_ladder"_a, "h_sample"_a = 0.1);
  m.def("x_delta_set", &x_delta_set, "flow"_a, "delta"_a, "grid"_a, "T_escape"_a = 50.0,
        "h"_a = 0.01);

  m.def("_execute_task", [](const std::string& task, const std::string& config_json) {
    Json cfg = resolve_config(Json::parse(config_json));
    TaskOutput out = execute_task(task, cfg);
    return py::make_tuple(out.exit_code, dumps(out.report));
  }, "task"_a, "config_json"_a);
}

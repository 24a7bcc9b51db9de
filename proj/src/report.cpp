#include "expanse/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace expanse {

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  double r = std::strtod(buf, nullptr);
  if (r == 0.0) r = 0.0;  // no negative zero in reports
  return r;
}

void normalize_numbers(Json& j) {
  if (j.is_number_float()) {
    j = number(j.get<double>());
  } else if (j.is_array() || j.is_object()) {
    for (auto& v : j) normalize_numbers(v);
  }
}

std::string dump_report(Json j) {
  normalize_numbers(j);
  return j.dump(2) + "\n";
}

double parse_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw std::invalid_argument("expected a number, got " + j.dump());
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

Json to_json(const Point& p) {
  Json a = Json::array();
  a.push_back(number(p.c[0]));
  if (p.dim == 2) a.push_back(number(p.c[1]));
  return a;
}

Point point_from_json(const Json& j) {
  if (j.is_number()) return Point(j.get<double>());
  if (!j.is_array() || j.empty() || j.size() > 2)
    throw std::invalid_argument("a point is a number or an array of one or two numbers");
  if (j.size() == 1) return Point(parse_number(j[0]));
  return Point(parse_number(j[0]), parse_number(j[1]));
}

Json to_json(const Reparam& s) {
  Json t = Json::array(), v = Json::array();
  for (double x : s.knots_t()) t.push_back(number(x));
  for (double x : s.knots_s()) v.push_back(number(x));
  return {{"knots_t", t}, {"knots_s", v}};
}

Json to_json(const AlignmentResult& a) {
  Json j = {{"cost", number(a.cost)},
            {"argmax_t", number(a.argmax_t)},
            {"weight_kind", to_string(a.weight_kind)},
            {"pruned", a.pruned}};
  if (!a.pruned) {
    j["reparam"] = to_json(a.reparam);
    j["s_at_zero"] = number(a.reparam(0.0));
  }
  return j;
}

Json to_json(const ScaleInfo& s) {
  return {{"T", number(s.T)},
          {"h", number(s.h)},
          {"band_width", number(s.band_width)},
          {"y_refine", s.y_refine},
          {"slope_min", number(s.slope_min)},
          {"slope_max", number(s.slope_max)},
          {"grid_size", s.grid_size},
          {"pairs_total", s.pairs_total},
          {"pairs_checked", s.pairs_checked}};
}

Json to_json(const PropertyReport& r) {
  Json j = {{"property", to_string(r.property)},
            {"verdict", to_string(r.verdict)},
            {"eps", number(r.eps)},
            {"delta", number(r.delta)},
            {"strict_t0", r.strict_t0},
            {"scale", to_json(r.scale)},
            {"hypothesis_hits", r.hypothesis_hits},
            {"max_statistic", number(r.max_statistic)},
            {"note", r.note}};
  if (r.witness) {
    const Witness& w = *r.witness;
    Json wj = {{"x", to_json(w.x)},
               {"y", to_json(w.y)},
               {"separation", number(w.separation)},
               {"time", number(w.time)},
               {"t0_window", Json::array({number(w.t0_lo), number(w.t0_hi)})},
               {"t0_tested", w.t0_tested}};
    if (w.alignment) wj["alignment"] = to_json(*w.alignment);
    j["witness"] = wj;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json to_json(const ComparabilityConstants& c) {
  return {{"B", number(c.B)},
          {"C", number(c.C)},
          {"argmax_B", to_json(c.argmax_B)},
          {"argmax_C", to_json(c.argmax_C)},
          {"C_unbounded", c.C_unbounded},
          {"points_used", c.points_used}};
}

Json to_json(const LocalNormConstant& c) {
  return {{"c", number(c.c)},
          {"L_hat", number(c.L_hat)},
          {"c_dom", number(c.c_dom)},
          {"pairs_checked", c.pairs_checked},
          {"halvings", c.halvings}};
}

Json to_json(const ReturnTimeReport& r) {
  Json j = {{"r0", number(r.r0)},
            {"capped", r.capped},
            {"triples_checked", r.triples_checked},
            {"max_dwell", number(r.max_dwell)}};
  if (r.violation)
    j["violation"] = {{"x", to_json(r.violation->x)},
                      {"delta", number(r.violation->delta)},
                      {"t", number(r.violation->t)}};
  else
    j["violation"] = nullptr;
  return j;
}

Json to_json(const SpanningEstimate& s) {
  Json pts = Json::array();
  for (const Point& p : s.spanning_points) pts.push_back(to_json(p));
  return {{"t", number(s.t)},
          {"eps", number(s.eps)},
          {"cardinality", s.cardinality},
          {"method", to_string(s.method)},
          {"verified", s.verified},
          {"spanning_points", pts}};
}

Json to_json(const EntropyEstimate& e) {
  Json slopes = Json::array(), table = Json::array(), per_delta = Json::array(),
       sizes = Json::array();
  for (const auto& [eps, s] : e.per_eps_slopes)
    slopes.push_back({{"eps", number(eps)}, {"slope", number(s)}});
  for (const auto& row : e.table)
    table.push_back({{"t", number(row.t)}, {"eps", number(row.eps)}, {"r", row.r}});
  for (const auto& [d, h] : e.per_delta_h)
    per_delta.push_back({{"delta", number(d)}, {"h", number(h)}});
  for (const auto& [d, n] : e.per_delta_size)
    sizes.push_back({{"delta", number(d)}, {"size", n}});
  return {{"h_estimate", number(e.h_estimate)},
          {"K_descriptor", e.K_descriptor},
          {"K_size", e.K_size},
          {"per_eps_slopes", slopes},
          {"table", table},
          {"monotone_in_t", e.monotone_in_t},
          {"monotone_in_eps", e.monotone_in_eps},
          {"slopes_monotone_in_eps", e.slopes_monotone_in_eps},
          {"all_empty", e.all_empty},
          {"per_delta_h", per_delta},
          {"per_delta_size", sizes}};
}

Json to_json(const ShadowResult& s) {
  Json seg = Json::array();
  for (double e : s.per_segment_errors) seg.push_back(number(e));
  return {{"shadow_point", to_json(s.shadow_point)},
          {"max_error", number(s.max_error)},
          {"per_segment_errors", seg},
          {"candidate_index", s.candidate_index},
          {"candidates_tried", s.candidates_tried},
          {"reparam", to_json(s.reparam)}};
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("CSV row width mismatch");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

CsvTable pair_table(const PropertyReport& r) {
  CsvTable t({"xi", "yi", "x0", "x1", "y0", "y1", "cost", "pruned", "hypothesis",
              "conclusion"});
  for (const PairRecord& p : r.pairs) {
    const Point& x = r.grid.at(p.xi);
    const Point& y = p.y_sample ? *p.y_sample : r.grid.at(p.yi);
    t.add_row({std::to_string(p.xi), p.y_sample ? "" : std::to_string(p.yi),
               format_number(x.c[0]), x.dim == 2 ? format_number(x.c[1]) : "",
               format_number(y.c[0]), y.dim == 2 ? format_number(y.c[1]) : "",
               format_number(p.cost), p.pruned ? "1" : "0", p.hypothesis ? "1" : "0",
               p.conclusion ? "1" : "0"});
  }
  return t;
}

CsvTable spanning_table(const EntropyEstimate& e) {
  CsvTable t({"t", "eps", "r"});
  for (const auto& row : e.table)
    t.add_row({format_number(row.t), format_number(row.eps), std::to_string(row.r)});
  return t;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << content;
  f.flush();
  if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace expanse

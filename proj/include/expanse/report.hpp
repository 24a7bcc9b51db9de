#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "expanse/entropy.hpp"
#include "expanse/expansivity.hpp"
#include "expanse/shadowing.hpp"

namespace expanse {

/// std::map-backed, so object keys serialise in sorted order.
using Json = nlohmann::json;

/// x rounded to 12 significant digits; non-finite values become the strings
/// "inf", "-inf" and "nan".
Json number(double x);

/// Recursively applies number() to every floating value of a tree.
void normalize_numbers(Json& j);

/// Sorted keys, 12 significant digits, two-space indent, trailing newline.
std::string dump_report(Json j);

/// Parses a value written by number(), including the non-finite strings.
double parse_number(const Json& j);

/// %.12g, with inf / -inf / nan spelled out.
std::string format_number(double x);

Json to_json(const Point& p);
Point point_from_json(const Json& j);
Json to_json(const Reparam& s);
Json to_json(const AlignmentResult& a);
Json to_json(const ScaleInfo& s);
Json to_json(const PropertyReport& r);
Json to_json(const ComparabilityConstants& c);
Json to_json(const LocalNormConstant& c);
Json to_json(const ReturnTimeReport& r);
Json to_json(const SpanningEstimate& s);
Json to_json(const EntropyEstimate& e);
Json to_json(const ShadowResult& s);

/// Minimal CSV builder; cells are written as given.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable pair_table(const PropertyReport& r);
CsvTable spanning_table(const EntropyEstimate& e);

/// Writes content to path (creating parent directories); throws on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace expanse

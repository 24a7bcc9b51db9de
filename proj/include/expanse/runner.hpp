#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "expanse/report.hpp"

namespace expanse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFalsified = 2;

struct TaskOutput {
  int exit_code = kExitOk;
  std::string verdict;
  Json report;
  /// File name (relative to the output directory) to CSV content.
  std::map<std::string, std::string> tables;
  std::map<std::string, std::string> extra_files;
};

/// Runs a task on a resolved, validated config without touching the disk.
TaskOutput execute_task(const std::string& task, const Json& cfg);

/// Validates, executes and writes <dir>/<task>.json plus its tables.
/// Returns the exit code; errors propagate as exceptions.
int run_task(const std::string& task, const Json& cfg,
             std::vector<std::filesystem::path>* written = nullptr);

}  // namespace expanse

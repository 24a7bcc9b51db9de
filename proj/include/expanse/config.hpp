#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "expanse/expansivity.hpp"
#include "expanse/report.hpp"
#include "expanse/shadowing.hpp"

namespace expanse {

/// The tasks the runner knows.
const std::vector<std::string>& task_names();

/// Every key the runner reads, with its default. Keys whose default is null
/// are optional and have no default value.
Json default_config();

/// Reads a JSON config file.
Json load_config(const std::filesystem::path& path);

/// Deep-merges user settings over the defaults. Unknown keys are an error.
Json resolve_config(const Json& user);

/// Applies "a.b.c=value". The value is read as JSON when it parses and as a
/// plain string otherwise.
void apply_override(Json& cfg, const std::string& assignment);

/// Checks positivity and presence of what the task needs; throws
/// std::invalid_argument with the offending key.
void validate_config(const Json& cfg, const std::string& task);

FlowSpec flow_spec_from(const Json& flow);
GridSpec grid_spec_from(const Json& cfg);
CheckOptions check_options_from(const Json& cfg);
ShadowOptions shadow_options_from(const Json& cfg);

}  // namespace expanse

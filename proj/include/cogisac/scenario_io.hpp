// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogisac/scenario.hpp"

namespace cogisac {

inline constexpr int kScenarioSchemaVersion = 1;

/// Complete document for a scenario; every field is written.
nlohmann::json scenario_to_json(const ScenarioSpec& spec);

/// Parses a scenario document. Missing fields keep their defaults; unknown keys and
/// type mismatches are reported as E100 diagnostics with the offending field path.
/// Returns the partially filled spec even when diagnostics were produced.
ScenarioSpec scenario_from_json(const nlohmann::json& doc, std::vector<Diagnostic>& diagnostics);

/// Throws ConfigError on the first schema error.
ScenarioSpec scenario_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace cogisac

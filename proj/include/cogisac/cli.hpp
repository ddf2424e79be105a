// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogisac/simkit.hpp"

namespace cogisac {

/// Environment variable holding the default output directory (fallback: ./out).
inline constexpr const char* kOutputDirEnv = "COGISAC_OUTPUT_DIR";

/// Everything needed to reproduce a set of output files.
struct RunManifest {
    std::string command = "run";  ///< run, compare or sweep
    std::string source;            ///< scenario name or file path as given
    ScenarioSpec spec;             ///< fully resolved, overrides applied
    std::vector<Variant> variants;
    std::vector<double> snr_db;
    std::string format = "csv";
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& doc);

/// Parses "a,b,c" or "start:step:stop" (inclusive stop).
std::vector<double> parse_number_list(const std::string& text);

/// Runs the manifest and writes pd_over_pulses, sumrate_over_pulses, sumrate_vs_snr,
/// summary.json and manifest.json into `dir`.
void execute_manifest(const RunManifest& m, const std::filesystem::path& dir, int threads);

/// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cogisac

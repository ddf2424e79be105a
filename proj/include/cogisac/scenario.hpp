// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogisac/agent.hpp"
#include "cogisac/array.hpp"
#include "cogisac/clutter.hpp"
#include "cogisac/detector.hpp"
#include "cogisac/optimizer.hpp"

namespace cogisac {

enum class Policy { Rl, Nrl, Orthogonal };

std::string to_string(Policy p);
/// Accepts "rl", "nrl", "orthogonal".
std::optional<Policy> parse_policy(const std::string& s);

/// Target present during pulses [first, last] (1-based, inclusive) at one bin.
/// A missing SNR means the target is absent for that interval.
struct ScheduleEntry {
    int first = 1;
    int last = 1;
    double nu_x = 0.0;
    double nu_y = 0.0;
    std::optional<double> snr_db;
};

struct TargetSpec {
    int id = 1;
    std::vector<ScheduleEntry> schedule;

    /// Entry covering `pulse` with a defined SNR, if any.
    const ScheduleEntry* active_at(int pulse) const;
};

struct ScenarioSpec {
    std::string name;
    UpaConfig upa;
    int grid_lx = 11;
    int grid_ly = 11;
    int pulses = 50;
    int mc_runs = 200;
    std::uint64_t seed = 1;
    Policy policy = Policy::Rl;
    double power = 1.0;
    int code_length = 30;
    int users = 8;
    double comm_snr_db = 12.0;
    double rho = 0.2;
    DetectorConfig detector;
    ClutterField clutter;
    AgentConfig agent;
    TradeoffConfig solver;  ///< rho here is ignored; the scenario-level rho is used
    double snr_offset_db = 0.0;  ///< added to every target SNR
    std::vector<TargetSpec> targets;

    SpatialGrid grid() const { return make_grid(grid_lx, grid_ly); }
};

/// One finding from scenario checking. Codes are stable:
/// E100 schema/type, E200 off-grid position, E201 schedule interval, E300 unstable AR,
/// E400 K > N_t, E401 L < N_t, E500 value out of range, W100 lag at or above N^{1/3}.
struct Diagnostic {
    std::string code;
    std::string path;
    std::string message;
    bool error = true;
};

std::vector<Diagnostic> check_scenario(const ScenarioSpec& spec);

/// Throws ConfigError carrying the first error diagnostic.
void validate_scenario(const ScenarioSpec& spec);

/// Shipped scenario names.
std::vector<std::string> scenario_names();

/// Throws ConfigError for unknown names.
ScenarioSpec library_scenario(const std::string& name);

/// SNR offset (dB, rounded up to 0.1 dB) that lifts the weakest target active at pulse 1
/// to an asymptotic detection probability of `target_pd`, evaluated with the true clutter
/// covariance and a single beam formed on that target.
double calibrate_snr_offset(const ScenarioSpec& spec, double target_pd = 0.9);

}  // namespace cogisac

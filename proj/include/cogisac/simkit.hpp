// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cogisac/scenario.hpp"

namespace cogisac {

/// A policy/trade-off pair. Variants run in lockstep inside one Monte Carlo run and
/// share its clutter, target-phase and communication streams, so their results are
/// identical to running each variant on its own with the same seed.
struct Variant {
    Policy policy = Policy::Rl;
    double rho = 0.2;
};

/// Single-run record; all per-pulse vectors have length P.
struct EpisodeLog {
    /// detection[p][t]: 1 detected, 0 missed, -1 target inactive at pulse p + 1.
    std::vector<std::vector<std::int8_t>> detection;
    std::vector<int> count;    ///< T_p
    std::vector<double> reward;
    std::vector<int> action;   ///< j chosen after observing pulse p + 1 (baselines: beams formed)
    std::vector<double> mui;
    std::vector<double> power;  ///< ||X||_F^2 of the transmitted waveform
    /// interference[p][k]: (1/L) sum_j |h_k^T x_j - s_kj|^2 of the transmitted waveform.
    std::vector<std::vector<double>> interference;
};

/// Per-bin echoes at one pulse: y_m = alpha_m h_m + c_m.
struct EchoTarget {
    int bin = 0;
    cd alpha;
};
std::vector<CVec> synthesize_echo(const std::vector<CVec>& channels, const std::vector<CVec>& clutter,
                                  const std::vector<EchoTarget>& targets);

/// Amplitude magnitude sqrt(snr_lin sigma_w2).
double target_amplitude(double snr_db, double sigma_w2);

struct RunOptions {
    int threads = 0;  ///< 0: hardware concurrency
};

/// All variants of one Monte Carlo run (run index selects the derived streams).
std::vector<EpisodeLog> run_episode_group(const ScenarioSpec& spec, const std::vector<Variant>& variants,
                                          int run);

/// Single run of spec.policy at spec.rho.
EpisodeLog run_episode(const ScenarioSpec& spec, int run = 0);

struct MonteCarloResult {
    ScenarioSpec spec;
    std::vector<Variant> variants;
    std::vector<std::vector<EpisodeLog>> logs;  ///< [variant][run]
};

MonteCarloResult run_monte_carlo(const ScenarioSpec& spec, const std::vector<Variant>& variants,
                                 const RunOptions& options = {});
MonteCarloResult run_monte_carlo(const ScenarioSpec& spec, const RunOptions& options = {});

/// Communication figures of one run at a given SNR, recomputed from stored interference.
struct RateSample {
    double sum_rate = 0.0;
    double normalized = 0.0;
    double per_user = 0.0;
};
RateSample rate_at(const EpisodeLog& log, int pulse_index, double snr_db);

struct Aggregate {
    Variant variant;
    int runs = 0;
    /// p_detect(p, t); NaN where target t is inactive at pulse p + 1.
    RMat p_detect;
    std::vector<double> sum_rate;
    std::vector<double> normalized_sum_rate;
    std::vector<double> mui;
    std::vector<double> per_user_sum_rate;
    std::vector<double> mean_count;
};

/// Means over runs at the given communication SNR.
Aggregate aggregate(const MonteCarloResult& result, std::size_t variant, double snr_db);

/// Mean over runs of the per-run average over pulses [first, last] (1-based), with the
/// standard error of that mean.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe window_rate(const MonteCarloResult& result, std::size_t variant, double snr_db, int first, int last,
                   double RateSample::*field);

}  // namespace cogisac

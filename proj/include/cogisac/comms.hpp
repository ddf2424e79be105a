// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cogisac/types.hpp"

namespace cogisac {

struct CommScene {
    CMat H;  ///< K x N_t, i.i.d. CN(0, 1)
    CMat S;  ///< K x L, unit-power QPSK
    double n0 = 1.0;

    int users() const { return static_cast<int>(H.rows()); }
};

/// Transmit SNR convention: snr = 1 / N0 with unit-power symbols.
double noise_power_from_snr_db(double snr_db);

CMat sample_channel(int users, int n_tx, Rng& rng);
CMat sample_qpsk(int users, int L, Rng& rng);

/// Channel first, then symbols, from the same engine.
CommScene sample_scene(int users, int n_tx, int L, double snr_db, Rng& rng);

/// ||H X - S||_F^2.
double mui_energy(const CMat& H, const CMat& X, const CMat& S);

/// Per-user interference (1/L) sum_j |h_k^T x_j - s_kj|^2.
std::vector<double> per_user_interference(const CMat& H, const CMat& X, const CMat& S);

/// gamma_k = 1 / (interference_k + N0).
std::vector<double> sinr_from_interference(const std::vector<double>& interference, double n0);
std::vector<double> per_user_sinr(const CMat& H, const CMat& X, const CMat& S, double n0);

/// sum_k log2(1 + gamma_k), bits per channel use.
double sum_rate(const std::vector<double>& sinrs);

/// Sum rate divided by the zero-MUI benchmark K log2(1 + 1 / N0).
double normalized_sum_rate(const std::vector<double>& sinrs, double n0);

struct CommMetrics {
    double mui_energy = 0.0;
    std::vector<double> sinr;
    double sum_rate = 0.0;
    double normalized_sum_rate = 0.0;
};

CommMetrics evaluate(const CommScene& scene, const CMat& X);

}  // namespace cogisac

// SPDX-License-Identifier: Apache-2.0
#include "cogisac/comms.hpp"

#include <cmath>
#include <string>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace cogisac {

double noise_power_from_snr_db(double snr_db) {
    if (!std::isfinite(snr_db)) throw ConfigError("comms", "SNR must be finite");
    return std::pow(10.0, -snr_db / 10.0);
}

CMat sample_channel(int users, int n_tx, Rng& rng) {
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMat H(users, n_tx);
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index j = 0; j < H.cols(); ++j) {
        for (Eigen::Index i = 0; i < H.rows(); ++i) {
            const double re = normal(rng);
            H(i, j) = cd{re, normal(rng)};
        }
    }
    return H;
}

CMat sample_qpsk(int users, int L, Rng& rng) {
    const double a = 1.0 / std::sqrt(2.0);
    boost::random::uniform_int_distribution<int> pick(0, 3);
    CMat S(users, L);
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
        for (Eigen::Index i = 0; i < S.rows(); ++i) {
            const int s = pick(rng);
            S(i, j) = cd{(s & 1) ? -a : a, (s & 2) ? -a : a};
        }
    }
    return S;
}

CommScene sample_scene(int users, int n_tx, int L, double snr_db, Rng& rng) {
    if (users < 1 || n_tx < 1 || L < 1) throw ConfigError("comms", "K, N_t and L must be >= 1");
    if (users > n_tx) {
        throw ConfigError("comms", "K = " + std::to_string(users) + " users exceed N_t = " + std::to_string(n_tx) +
                                       " transmit antennas");
    }
    CommScene scene;
    scene.H = sample_channel(users, n_tx, rng);
    scene.S = sample_qpsk(users, L, rng);
    scene.n0 = noise_power_from_snr_db(snr_db);
    return scene;
}

namespace {
void check_dims(const CMat& H, const CMat& X, const CMat& S) {
    if (H.cols() != X.rows() || H.rows() != S.rows() || X.cols() != S.cols()) {
        throw DimensionError("comms", "H, X, S dimensions are inconsistent");
    }
}
}  // namespace

double mui_energy(const CMat& H, const CMat& X, const CMat& S) {
    check_dims(H, X, S);
    return (H * X - S).squaredNorm();
}

std::vector<double> per_user_interference(const CMat& H, const CMat& X, const CMat& S) {
    check_dims(H, X, S);
    const CMat E = H * X - S;
    std::vector<double> out(static_cast<std::size_t>(E.rows()));
    for (Eigen::Index k = 0; k < E.rows(); ++k) {
        out[static_cast<std::size_t>(k)] = E.row(k).squaredNorm() / static_cast<double>(E.cols());
    }
    return out;
}

std::vector<double> sinr_from_interference(const std::vector<double>& interference, double n0) {
    if (!(n0 > 0.0)) throw ConfigError("comms", "noise power must be positive");
    std::vector<double> g;
    g.reserve(interference.size());
    for (double i : interference) g.push_back(1.0 / (i + n0));
    return g;
}

std::vector<double> per_user_sinr(const CMat& H, const CMat& X, const CMat& S, double n0) {
    return sinr_from_interference(per_user_interference(H, X, S), n0);
}

double sum_rate(const std::vector<double>& sinrs) {
    double r = 0.0;
    for (double g : sinrs) {
        if (!(g >= 0.0)) throw ConfigError("comms", "SINR must be non-negative");
        r += std::log2(1.0 + g);
    }
    return r;
}

double normalized_sum_rate(const std::vector<double>& sinrs, double n0) {
    if (sinrs.empty()) return 0.0;
    return sum_rate(sinrs) / (static_cast<double>(sinrs.size()) * std::log2(1.0 + 1.0 / n0));
}

CommMetrics evaluate(const CommScene& scene, const CMat& X) {
    CommMetrics m;
    m.mui_energy = mui_energy(scene.H, X, scene.S);
    m.sinr = per_user_sinr(scene.H, X, scene.S, scene.n0);
    m.sum_rate = sum_rate(m.sinr);
    m.normalized_sum_rate = normalized_sum_rate(m.sinr, scene.n0);
    return m;
}

}  // namespace cogisac

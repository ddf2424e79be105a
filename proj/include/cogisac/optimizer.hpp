// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "cogisac/types.hpp"

namespace cogisac {

/// (P_T / N_t) I.
CMat isotropic_covariance(int n_tx, double p_t);

struct CovarianceDesign {
    CMat R;                 ///< P_T u u^H
    CVec u;                 ///< unit dominant eigenvector, first significant entry real positive
    double objective = 0.0; ///< tr(R B) = P_T lambda_max(B)
};

/// Beampattern-power maximizing covariance for a set of transmit steering vectors
/// (B = sum v v^H). Throws on an empty set; callers choose their own fallback.
CovarianceDesign design_covariance(std::span<const CVec> steerings, double p_t);

/// Relative regularization used when the target covariance is rank deficient.
inline constexpr double kReferenceRegularization = 1e-6;

struct RadarReference {
    CMat X0;
    bool regularized = false;
};

/// Waveform closest to the symbols S (through H) whose sample covariance is R_d.
/// Requires L >= N_t. A singular R_d is loaded by eps_r (tr R_d / N_t) I before the
/// Cholesky factorization and the result is rescaled to power L tr(R_d).
RadarReference radar_reference(const CMat& H, const CMat& S, const CMat& R_d,
                               double eps_r = kReferenceRegularization);

/// P(lambda) = sum_ij |[V^H G]_ij|^2 / (lambda + lambda_i)^2.
double secular_value(double lambda, const RVec& eigvals, const CMat& VhG);

struct TradeoffConfig {
    double rho = 0.2;
    double tolerance = 1e-10;
    int max_iterations = 200;
    int max_expansions = 200;

    void validate() const;
};

struct TradeoffResult {
    CMat X;
    double lambda = 0.0;
    double lambda_min = 0.0;  ///< smallest eigenvalue of Q
    bool hard_case = false;
    int iterations = 0;
};

/// Minimizes rho ||H X - S||^2 + (1 - rho) ||X - X0||^2 subject to ||X||_F^2 = L P_T,
/// where L = S.cols(). The dual variable is found by golden-section search on the
/// secular equation; the returned waveform is scaled to the exact power.
TradeoffResult tradeoff_waveform(const CMat& H, const CMat& S, const CMat& X0, double p_t,
                                 const TradeoffConfig& config);

/// sqrt(L P_T / N_t) times the first N_t rows of the unitary L-point DFT matrix.
CMat orthogonal_reference(int n_tx, int L, double p_t);

}  // namespace cogisac

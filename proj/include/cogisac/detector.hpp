// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cogisac/types.hpp"

namespace cogisac {

struct DetectorConfig {
    double p_fa = 1e-4;
    int lag = -1;  ///< negative selects floor(N^{1/4})
    double loading = 1e-3;

    void validate() const;
    int resolved_lag(int n) const;
    double eta() const;
};

/// eta = -2 ln(p_fa), p_fa in (0, 1].
double threshold(double p_fa);

/// floor(N^{1/4}), computed in integers.
int default_lag(int n);

/// True when lag >= N^{1/3} (growth condition for consistency violated).
bool lag_exceeds_growth_bound(int lag, int n);

/// Least-squares amplitude h^H y / ||h||^2.
cd amplitude_estimate(const CVec& h, const CVec& y);

/// Lag-truncated single-snapshot covariance built from a residual vector.
/// Entry (i, j) = c_i conj(c_j) for |i - j| <= lag, else 0; the diagonal also
/// carries loading * ||c||^2 / N.
class BandedCovariance {
public:
    BandedCovariance(CVec residual, int lag, double loading);

    const CVec& residual() const { return residual_; }
    int lag() const { return lag_; }
    double loading() const { return loading_; }
    Eigen::Index size() const { return residual_.size(); }

    cd entry(Eigen::Index i, Eigen::Index j) const;
    CMat dense() const;

    /// h^H G h in O(N * lag) without forming G.
    double quadratic_form(const CVec& h) const;

    /// Lower bound applied to the quadratic form: 1e-12 ||h||^2 ||c||^2 / N.
    double floor_for(const CVec& h) const;

private:
    CVec residual_;
    int lag_;
    double loading_;
    double residual_power_;  // ||c||^2 / N
};

/// Residual y - alpha_hat h, then banded estimate.
BandedCovariance banded_covariance(const CVec& y, const CVec& h, int lag, double loading);

struct WaldResult {
    double statistic = 0.0;
    double denominator = 0.0;
    bool floored = false;
};

/// 2 |h^H y|^2 / (h^H G h), with the denominator floored and flagged when needed.
WaldResult wald_test(const CVec& h, const CVec& y, const BandedCovariance& gamma_hat);
double wald_statistic(const CVec& h, const CVec& y, const BandedCovariance& gamma_hat);

/// Same statistic with a known (dense) disturbance covariance.
double wald_statistic(const CVec& h, const CVec& y, const CMat& gamma);

/// First-order Marcum Q function Q_1(a, b).
double marcum_q1(double a, double b);

/// Non-centrality 2 |alpha|^2 ||h||^4 / q where q = h^H G h.
double noncentrality(cd alpha, double h_norm2, double quadratic_form);

/// Q_1(sqrt(kappa), sqrt(eta)).
double asymptotic_pd(double kappa, double eta);

/// Reward path: estimated amplitude and banded covariance.
double asymptotic_pd(const CVec& h, const CVec& y, const BandedCovariance& gamma_hat, double eta);

/// Theory path: true amplitude and covariance.
double asymptotic_pd(const CVec& h, cd alpha, const CMat& gamma, double eta);

struct DetectionFrame {
    std::vector<double> statistic;  ///< Lambda per bin
    std::vector<cd> alpha_hat;
    std::vector<double> pd_hat;      ///< Q_1(sqrt(kappa), sqrt(eta)) with estimated parameters
    std::vector<std::uint8_t> decision;
    std::vector<std::uint8_t> flagged;  ///< floored denominator or degenerate channel
    int count = 0;
    double eta = 0.0;

    int bins() const { return static_cast<int>(statistic.size()); }
};

/// Channels whose energy is below this fraction of the strongest bin are treated as
/// beam nulls: the bin is flagged and its statistic set to zero.
inline constexpr double kDegenerateChannelRatio = 1e-20;

DetectionFrame detect_frame(std::span<const CVec> h, std::span<const CVec> y, const DetectorConfig& config);

}  // namespace cogisac

// SPDX-License-Identifier: Apache-2.0
#include "cogisac/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace cogisac {

void DetectorConfig::validate() const {
    if (!(p_fa > 0.0 && p_fa < 1.0)) {
        throw ConfigError("detector", "p_fa must lie in (0, 1) (got " + std::to_string(p_fa) + ")");
    }
    if (!(loading >= 0.0) || !std::isfinite(loading)) {
        throw ConfigError("detector", "loading must be finite and >= 0");
    }
}

int DetectorConfig::resolved_lag(int n) const { return lag < 0 ? default_lag(n) : lag; }

double DetectorConfig::eta() const { return threshold(p_fa); }

double threshold(double p_fa) {
    if (!(p_fa > 0.0 && p_fa <= 1.0)) {
        throw ConfigError("detector", "p_fa must lie in (0, 1] (got " + std::to_string(p_fa) + ")");
    }
    return -2.0 * std::log(p_fa);
}

int default_lag(int n) {
    if (n < 1) return 0;
    long long l = 0;
    while ((l + 1) * (l + 1) * (l + 1) * (l + 1) <= n) ++l;
    return static_cast<int>(l);
}

bool lag_exceeds_growth_bound(int lag, int n) {
    const long long l = lag;
    return l * l * l >= n;
}

cd amplitude_estimate(const CVec& h, const CVec& y) {
    if (h.size() != y.size()) throw DimensionError("detector", "channel and observation lengths differ");
    const double e = h.squaredNorm();
    if (!(e > 0.0)) throw NumericalError("detector", "degenerate channel (||h|| = 0)");
    return h.dot(y) / e;  // Eigen's dot conjugates the first argument
}

BandedCovariance::BandedCovariance(CVec residual, int lag, double loading)
    : residual_(std::move(residual)), lag_(lag), loading_(loading) {
    const Eigen::Index n = residual_.size();
    if (n == 0) throw DimensionError("detector", "empty residual");
    if (lag < 0 || lag >= n) {
        throw ConfigError("detector", "lag must satisfy 0 <= l < N (got l = " + std::to_string(lag) +
                                          ", N = " + std::to_string(n) + ")");
    }
    if (!(loading >= 0.0)) throw ConfigError("detector", "loading must be >= 0");
    residual_power_ = residual_.squaredNorm() / static_cast<double>(n);
}

cd BandedCovariance::entry(Eigen::Index i, Eigen::Index j) const {
    if (std::abs(i - j) > lag_) return 0.0;
    cd v = residual_(i) * std::conj(residual_(j));
    if (i == j) v += loading_ * residual_power_;
    return v;
}

CMat BandedCovariance::dense() const {
    const Eigen::Index n = size();
    CMat g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = entry(i, j);
    }
    return g;
}

double BandedCovariance::quadratic_form(const CVec& h) const {
    const Eigen::Index n = size();
    if (h.size() != n) throw DimensionError("detector", "channel length does not match covariance");
    // With z_i = conj(h_i) c_i the band sum is sum_{|i-j|<=l} z_i conj(z_j).
    CVec z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = std::conj(h(i)) * residual_(i);
    double q = z.squaredNorm();
    for (int d = 1; d <= lag_; ++d) {
        cd acc = 0.0;
        for (Eigen::Index i = 0; i + d < n; ++i) acc += z(i) * std::conj(z(i + d));
        q += 2.0 * acc.real();
    }
    return q + loading_ * residual_power_ * h.squaredNorm();
}

double BandedCovariance::floor_for(const CVec& h) const {
    return 1e-12 * h.squaredNorm() * residual_power_;
}

BandedCovariance banded_covariance(const CVec& y, const CVec& h, int lag, double loading) {
    const cd a = amplitude_estimate(h, y);
    return BandedCovariance(y - a * h, lag, loading);
}

WaldResult wald_test(const CVec& h, const CVec& y, const BandedCovariance& gamma_hat) {
    if (h.size() != y.size()) throw DimensionError("detector", "channel and observation lengths differ");
    WaldResult r;
    const double num = 2.0 * std::norm(h.dot(y));
    double q = gamma_hat.quadratic_form(h);
    const double fl = gamma_hat.floor_for(h);
    if (!(q > fl)) {
        q = fl;
        r.floored = true;
    }
    r.denominator = q;
    if (num == 0.0) {
        r.statistic = 0.0;
    } else if (q > 0.0) {
        r.statistic = num / q;
    } else {
        // Zero residual: the observation is an exact multiple of the channel.
        r.statistic = std::numeric_limits<double>::infinity();
    }
    return r;
}

double wald_statistic(const CVec& h, const CVec& y, const BandedCovariance& gamma_hat) {
    return wald_test(h, y, gamma_hat).statistic;
}

double wald_statistic(const CVec& h, const CVec& y, const CMat& gamma) {
    if (h.size() != y.size() || gamma.rows() != h.size() || gamma.cols() != h.size()) {
        throw DimensionError("detector", "inconsistent dimensions for known-covariance statistic");
    }
    const double q = h.dot(gamma * h).real();
    if (!(q > 0.0)) throw NumericalError("detector", "non-positive quadratic form h^H G h");
    return 2.0 * std::norm(h.dot(y)) / q;
}

double noncentrality(cd alpha, double h_norm2, double quadratic_form) {
    if (!(quadratic_form > 0.0)) throw NumericalError("detector", "non-positive quadratic form");
    return 2.0 * std::norm(alpha) * h_norm2 * h_norm2 / quadratic_form;
}

double asymptotic_pd(double kappa, double eta) {
    return marcum_q1(std::sqrt(std::max(kappa, 0.0)), std::sqrt(eta));
}

double asymptotic_pd(const CVec& h, const CVec& y, const BandedCovariance& gamma_hat, double eta) {
    const cd a = amplitude_estimate(h, y);
    const WaldResult w = wald_test(h, y, gamma_hat);
    const double e = h.squaredNorm();
    const double kappa = w.denominator > 0.0 ? 2.0 * std::norm(a) * e * e / w.denominator
                                             : std::numeric_limits<double>::infinity();
    return asymptotic_pd(kappa, eta);
}

double asymptotic_pd(const CVec& h, cd alpha, const CMat& gamma, double eta) {
    if (gamma.rows() != h.size() || gamma.cols() != h.size()) {
        throw DimensionError("detector", "covariance does not match channel length");
    }
    const double q = h.dot(gamma * h).real();
    return asymptotic_pd(noncentrality(alpha, h.squaredNorm(), q), eta);
}

DetectionFrame detect_frame(std::span<const CVec> h, std::span<const CVec> y, const DetectorConfig& config) {
    config.validate();
    if (h.size() != y.size()) throw DimensionError("detector", "channel and observation bin counts differ");
    const std::size_t bins = h.size();
    DetectionFrame f;
    f.eta = config.eta();
    f.statistic.assign(bins, 0.0);
    f.alpha_hat.assign(bins, cd{0.0});
    f.pd_hat.assign(bins, 0.0);
    f.decision.assign(bins, 0);
    f.flagged.assign(bins, 0);
    if (bins == 0) return f;

    const Eigen::Index n = h[0].size();
    double max_energy = 0.0;
    for (std::size_t m = 0; m < bins; ++m) {
        if (h[m].size() != n || y[m].size() != n) {
            throw DimensionError("detector", "bin " + std::to_string(m) + " has inconsistent length");
        }
        max_energy = std::max(max_energy, h[m].squaredNorm());
    }
    const int lag = config.resolved_lag(static_cast<int>(n));
    const double sqrt_eta = std::sqrt(f.eta);
    const double null_pd = marcum_q1(0.0, sqrt_eta);

    for (std::size_t m = 0; m < bins; ++m) {
        const double e = h[m].squaredNorm();
        if (!(e > kDegenerateChannelRatio * max_energy) || e == 0.0) {
            f.flagged[m] = 1;
            f.pd_hat[m] = null_pd;
            continue;
        }
        const cd a = h[m].dot(y[m]) / e;
        const BandedCovariance g(y[m] - a * h[m], lag, config.loading);
        const WaldResult w = wald_test(h[m], y[m], g);
        f.alpha_hat[m] = a;
        f.statistic[m] = w.statistic;
        f.flagged[m] = w.floored ? 1 : 0;
        // kappa = 2 |alpha_hat|^2 ||h||^4 / (h^H G h) coincides with the statistic itself.
        f.pd_hat[m] = marcum_q1(std::sqrt(w.statistic), sqrt_eta);
        if (w.statistic > f.eta) {
            f.decision[m] = 1;
            ++f.count;
        }
    }
    return f;
}

}  // namespace cogisac

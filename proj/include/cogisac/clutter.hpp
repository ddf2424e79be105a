// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>

#include "cogisac/array.hpp"
#include "cogisac/types.hpp"

namespace cogisac {

/// Quarter-plane AR coefficients rho(i, j) weighting c[nx - i][ny - j].
/// Entry (0, 0) is ignored.
struct ArCoefficients {
    RMat rho = RMat::Zero(1, 1);

    /// Coefficient matrix used in the reference experiments.
    static ArCoefficients reference();

    /// A(z1, z2) = 1 - sum rho(i, j) z1^i z2^j.
    cd characteristic(cd z1, cd z2) const;

    /// Stable as a causal quarter-plane recursion (no zeros of A in the closed bidisk).
    bool is_stable() const;

    /// Throws ConfigError when the recursion would diverge.
    void require_stable() const;
};

/// Compound-Gaussian Student-t innovations normalized to variance sigma_w2.
/// mu = +inf selects the Gaussian limit.
struct StudentTNoise {
    double mu = 2.0;
    double sigma_w2 = 1.0;

    void validate() const;
    bool gaussian() const { return mu == std::numeric_limits<double>::infinity(); }
};

cd sample_student_t(const StudentTNoise& noise, Rng& rng);

struct ClutterField {
    ArCoefficients coefficients = ArCoefficients::reference();
    StudentTNoise noise;
    int burn_in = 50;

    void validate() const;
};

/// Validates the field once, then draws any number of realizations.
class ClutterGenerator {
public:
    explicit ClutterGenerator(ClutterField field);

    /// Runs the AR recursion from zero boundary over (n_x + burn_in) x (n_y + burn_in)
    /// samples and returns the trailing n_x x n_y block.
    CMat generate(int n_x, int n_y, Rng& rng) const;

    const ClutterField& field() const { return field_; }

private:
    ClutterField field_;
};

CMat generate_field(const ClutterField& field, int n_x, int n_y, Rng& rng);

/// Theoretical PSD at a single spatial frequency.
double psd_at(const ArCoefficients& coefficients, double sigma_w2, double nu_x, double nu_y);

/// PSD over every grid bin, arranged L_x x L_y.
RMat psd(const ArCoefficients& coefficients, double sigma_w2, const SpatialGrid& grid);

/// Field rows index receive elements, columns transmit elements; the vector is the
/// row-major flattening of the top-left N_r x N_t block (index i * N_t + k).
CVec vectorize_to_channels(const CMat& field, const UpaConfig& upa);
CMat devectorize_channels(const CVec& c, const UpaConfig& upa);

/// Stationary autocovariance r(d1, d2) = E[c[n + d] conj(c[n])] of the AR field,
/// computed from a truncated impulse response.
class ArAutocovariance {
public:
    ArAutocovariance(const ArCoefficients& coefficients, double sigma_w2, int max_lag_x,
                     int max_lag_y);

    double operator()(int d1, int d2) const;
    double variance() const { return (*this)(0, 0); }

private:
    int max_x_;
    int max_y_;
    RMat table_;  // (2 max_x + 1) x (2 max_y + 1), centred
};

/// True N x N disturbance covariance of the vectorized channel clutter.
CMat clutter_covariance(const ClutterField& field, const UpaConfig& upa);

}  // namespace cogisac

// SPDX-License-Identifier: Apache-2.0
#include "cogisac/clutter.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <boost/random/normal_distribution.hpp>

namespace cogisac {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Roots of sum_k c[k] z^k via the companion matrix. Trailing zero coefficients are
// dropped first; a constant polynomial has no roots.
std::vector<cd> poly_roots(std::vector<cd> c) {
    while (c.size() > 1 && std::abs(c.back()) < 1e-14) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg < 1) return {};
    CMat companion = CMat::Zero(deg, deg);
    for (int k = 0; k < deg; ++k) companion(0, k) = -c[static_cast<std::size_t>(deg - 1 - k)] / c.back();
    for (int k = 1; k < deg; ++k) companion(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<CMat> es(companion, false);
    std::vector<cd> roots(static_cast<std::size_t>(deg));
    for (int k = 0; k < deg; ++k) roots[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    return roots;
}

bool any_root_in_unit_disk(const std::vector<cd>& coeffs) {
    for (const cd& r : poly_roots(coeffs)) {
        if (std::abs(r) <= 1.0 + 1e-9) return true;
    }
    return false;
}

// Impulse response of 1 / A on a T x T quarter plane.
RMat impulse_response(const RMat& rho, int T) {
    RMat g = RMat::Zero(T, T);
    for (int n1 = 0; n1 < T; ++n1) {
        for (int n2 = 0; n2 < T; ++n2) {
            double v = (n1 == 0 && n2 == 0) ? 1.0 : 0.0;
            for (int i = 0; i < rho.rows() && i <= n1; ++i) {
                for (int j = 0; j < rho.cols() && j <= n2; ++j) {
                    if (i == 0 && j == 0) continue;
                    v += rho(i, j) * g(n1 - i, n2 - j);
                }
            }
            g(n1, n2) = v;
        }
    }
    return g;
}

}  // namespace

ArCoefficients ArCoefficients::reference() {
    ArCoefficients c;
    c.rho = RMat::Zero(3, 3);
    c.rho << 0.0, 0.1, 0.1,
             0.1, 0.0, 0.0,
             0.05, 0.0, 0.0;
    return c;
}

cd ArCoefficients::characteristic(cd z1, cd z2) const {
    cd acc = 1.0;
    for (int i = 0; i < rho.rows(); ++i) {
        for (int j = 0; j < rho.cols(); ++j) {
            if (i == 0 && j == 0) continue;
            acc -= rho(i, j) * std::pow(z1, i) * std::pow(z2, j);
        }
    }
    return acc;
}

bool ArCoefficients::is_stable() const {
    if (rho.size() == 0 || !rho.allFinite()) return false;
    // Huang's criterion for quarter-plane filters: A(z1, 0) has no zeros in |z1| <= 1,
    // and A(e^{jw}, z2) has no zeros in |z2| <= 1 for every w.
    std::vector<cd> c1(static_cast<std::size_t>(rho.rows()));
    c1[0] = 1.0;
    for (int i = 1; i < rho.rows(); ++i) c1[static_cast<std::size_t>(i)] = -rho(i, 0);
    if (any_root_in_unit_disk(c1)) return false;

    constexpr int kOmega = 256;
    for (int k = 0; k < kOmega; ++k) {
        const cd z1 = std::polar(1.0, kTwoPi * k / kOmega);
        std::vector<cd> c2(static_cast<std::size_t>(rho.cols()), cd{0.0});
        c2[0] = 1.0;
        for (int i = 0; i < rho.rows(); ++i) {
            for (int j = 0; j < rho.cols(); ++j) {
                if (i == 0 && j == 0) continue;
                c2[static_cast<std::size_t>(j)] -= rho(i, j) * std::pow(z1, i);
            }
        }
        if (std::abs(c2[0]) < 1e-12 || any_root_in_unit_disk(c2)) return false;
    }
    return true;
}

void ArCoefficients::require_stable() const {
    if (!is_stable()) {
        throw ConfigError("clutter", "AR coefficients are unstable (characteristic polynomial has a "
                                     "zero inside the closed unit bidisk)");
    }
}

void StudentTNoise::validate() const {
    if (!(mu > 1.0)) {
        throw ConfigError("clutter", "Student-t shape mu must exceed 1 (got " + std::to_string(mu) + ")");
    }
    if (!(sigma_w2 > 0.0) || !std::isfinite(sigma_w2)) {
        throw ConfigError("clutter", "innovation variance sigma_w2 must be positive and finite");
    }
}

cd sample_student_t(const StudentTNoise& noise, Rng& rng) {
    noise.validate();
    // CN(0, 1): independent real and imaginary parts with variance 1/2 each.
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double re = normal(rng);
    const double im = normal(rng);
    double texture = noise.sigma_w2;
    if (!noise.gaussian()) {
        // Inverse-gamma texture with mean sigma_w2.
        std::gamma_distribution<double> gamma(noise.mu, 1.0);
        texture = (noise.mu - 1.0) * noise.sigma_w2 / gamma(rng);
    }
    const double s = std::sqrt(texture);
    return {s * re, s * im};
}

void ClutterField::validate() const {
    noise.validate();
    if (burn_in < 0) throw ConfigError("clutter", "burn_in must be >= 0");
    coefficients.require_stable();
}

ClutterGenerator::ClutterGenerator(ClutterField field) : field_(std::move(field)) {
    field_.validate();
}

CMat generate_field(const ClutterField& field, int n_x, int n_y, Rng& rng) {
    return ClutterGenerator(field).generate(n_x, n_y, rng);
}

CMat ClutterGenerator::generate(int n_x, int n_y, Rng& rng) const {
    if (n_x < 1 || n_y < 1) throw ConfigError("clutter", "field dimensions must be >= 1");
    const ClutterField& field = field_;
    const RMat& rho = field.coefficients.rho;
    struct Tap {
        int i, j;
        double w;
    };
    std::vector<Tap> taps;
    for (int i = 0; i < rho.rows(); ++i) {
        for (int j = 0; j < rho.cols(); ++j) {
            if ((i != 0 || j != 0) && rho(i, j) != 0.0) taps.push_back({i, j, rho(i, j)});
        }
    }
    const int rows = n_x + field.burn_in;
    const int cols = n_y + field.burn_in;
    CMat c(rows, cols);

    boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::gamma_distribution<double> gamma(field.noise.gaussian() ? 1.0 : field.noise.mu, 1.0);
    const bool gaussian = field.noise.gaussian();
    const double mu = field.noise.mu;
    const double sigma_w2 = field.noise.sigma_w2;

    for (int r = 0; r < rows; ++r) {
        for (int q = 0; q < cols; ++q) {
            const double re = normal(rng);
            const double im = normal(rng);
            const double texture = gaussian ? sigma_w2 : (mu - 1.0) * sigma_w2 / gamma(rng);
            const double s = std::sqrt(texture);
            cd v{s * re, s * im};
            for (const Tap& t : taps) {
                if (t.i <= r && t.j <= q) v += t.w * c(r - t.i, q - t.j);
            }
            c(r, q) = v;
        }
    }
    return c.bottomRightCorner(n_x, n_y);
}

double psd_at(const ArCoefficients& coefficients, double sigma_w2, double nu_x, double nu_y) {
    const cd z1 = std::polar(1.0, -kTwoPi * nu_x);
    const cd z2 = std::polar(1.0, -kTwoPi * nu_y);
    const double den = std::norm(coefficients.characteristic(z1, z2));
    if (!(den > 1e-12)) {
        throw NumericalError("clutter", "PSD denominator vanishes at (" + std::to_string(nu_x) + ", " +
                                            std::to_string(nu_y) + ")");
    }
    return sigma_w2 / den;
}

RMat psd(const ArCoefficients& coefficients, double sigma_w2, const SpatialGrid& grid) {
    RMat s(grid.lx(), grid.ly());
    for (const auto& b : grid.bins()) {
        const auto [i, j] = grid.coords(b.index);
        s(i, j) = psd_at(coefficients, sigma_w2, b.nu_x, b.nu_y);
    }
    return s;
}

CVec vectorize_to_channels(const CMat& field, const UpaConfig& upa) {
    const int nr = upa.n_rx();
    const int nt = upa.n_tx();
    if (field.rows() < nr || field.cols() < nt) {
        throw DimensionError("clutter", "field is " + std::to_string(field.rows()) + "x" +
                                            std::to_string(field.cols()) + ", need at least " +
                                            std::to_string(nr) + "x" + std::to_string(nt));
    }
    CVec c(static_cast<Eigen::Index>(nr) * nt);
    for (int i = 0; i < nr; ++i) {
        for (int k = 0; k < nt; ++k) c(i * nt + k) = field(i, k);
    }
    return c;
}

CMat devectorize_channels(const CVec& c, const UpaConfig& upa) {
    const int nr = upa.n_rx();
    const int nt = upa.n_tx();
    if (c.size() != static_cast<Eigen::Index>(nr) * nt) {
        throw DimensionError("clutter", "vector length " + std::to_string(c.size()) +
                                            " does not match N = " + std::to_string(nr * nt));
    }
    CMat field(nr, nt);
    for (int i = 0; i < nr; ++i) {
        for (int k = 0; k < nt; ++k) field(i, k) = c(i * nt + k);
    }
    return field;
}

ArAutocovariance::ArAutocovariance(const ArCoefficients& coefficients, double sigma_w2,
                                   int max_lag_x, int max_lag_y)
    : max_x_(max_lag_x), max_y_(max_lag_y) {
    if (max_lag_x < 0 || max_lag_y < 0) throw ConfigError("clutter", "negative lag bound");
    coefficients.require_stable();

    // Grow the truncation until the energy beyond half the window is negligible.
    RMat g;
    int T = 32;
    for (;; T *= 2) {
        g = impulse_response(coefficients.rho, T);
        const double total = g.squaredNorm();
        const int h = T / 2;
        const double inner = g.topLeftCorner(h, h).squaredNorm();
        if (total - inner <= 1e-15 * total) break;
        if (T >= 2048) {
            throw NumericalError("clutter", "impulse response does not decay; AR field too close to instability");
        }
    }

    table_ = RMat::Zero(2 * max_x_ + 1, 2 * max_y_ + 1);
    for (int d1 = 0; d1 <= max_x_; ++d1) {
        for (int d2 = -max_y_; d2 <= max_y_; ++d2) {
            double acc = 0.0;
            for (int k1 = 0; k1 + d1 < T; ++k1) {
                for (int k2 = std::max(0, -d2); k2 < T && k2 + d2 < T; ++k2) {
                    acc += g(k1 + d1, k2 + d2) * g(k1, k2);
                }
            }
            table_(max_x_ + d1, max_y_ + d2) = sigma_w2 * acc;
            table_(max_x_ - d1, max_y_ - d2) = sigma_w2 * acc;
        }
    }
}

double ArAutocovariance::operator()(int d1, int d2) const {
    if (std::abs(d1) > max_x_ || std::abs(d2) > max_y_) {
        throw DimensionError("clutter", "autocovariance lag outside precomputed range");
    }
    return table_(max_x_ + d1, max_y_ + d2);
}

CMat clutter_covariance(const ClutterField& field, const UpaConfig& upa) {
    field.validate();
    const int nr = upa.n_rx();
    const int nt = upa.n_tx();
    const ArAutocovariance r(field.coefficients, field.noise.sigma_w2, nr - 1, nt - 1);
    const int n = nr * nt;
    CMat gamma(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            gamma(a, b) = r(a / nt - b / nt, a % nt - b % nt);
        }
    }
    return gamma;
}

}  // namespace cogisac

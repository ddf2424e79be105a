// SPDX-License-Identifier: Apache-2.0
#include "cogisac/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cogisac {
namespace {

std::string dims(const CMat& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void check_power(double p_t) {
    if (!(p_t > 0.0) || !std::isfinite(p_t)) throw ConfigError("optimizer", "transmit power must be positive");
}

}  // namespace

CMat isotropic_covariance(int n_tx, double p_t) {
    if (n_tx < 1) throw ConfigError("optimizer", "N_t must be >= 1");
    check_power(p_t);
    return CMat::Identity(n_tx, n_tx) * (p_t / n_tx);
}

CovarianceDesign design_covariance(std::span<const CVec> steerings, double p_t) {
    if (steerings.empty()) throw ConfigError("optimizer", "covariance design needs at least one steering vector");
    check_power(p_t);
    const Eigen::Index nt = steerings.front().size();
    // B = V V^H, so its dominant eigenpair is the leading singular pair of V. Jacobi SVD
    // always converges, whereas the symmetric QR iteration can stall on these highly
    // degenerate low-rank sums.
    CMat V(nt, static_cast<Eigen::Index>(steerings.size()));
    for (std::size_t k = 0; k < steerings.size(); ++k) {
        if (steerings[k].size() != nt) throw DimensionError("optimizer", "steering vectors differ in length");
        V.col(static_cast<Eigen::Index>(k)) = steerings[k];
    }
    const Eigen::JacobiSVD<CMat> svd(V, Eigen::ComputeThinU);
    if (svd.info() != Eigen::Success) throw NumericalError("optimizer", "SVD of the steering matrix failed");

    CovarianceDesign d;
    d.u = svd.matrixU().col(0);
    for (Eigen::Index i = 0; i < nt; ++i) {
        if (std::abs(d.u(i)) > 1e-12) {
            d.u *= std::conj(d.u(i)) / std::abs(d.u(i));
            d.u(i) = std::abs(d.u(i));
            break;
        }
    }
    d.u.normalize();
    d.R = p_t * d.u * d.u.adjoint();
    d.objective = p_t * svd.singularValues()(0) * svd.singularValues()(0);
    return d;
}

RadarReference radar_reference(const CMat& H, const CMat& S, const CMat& R_d, double eps_r) {
    const Eigen::Index nt = R_d.rows();
    const Eigen::Index L = S.cols();
    if (R_d.cols() != nt) throw DimensionError("optimizer", "R_d must be square, got " + dims(R_d));
    if (H.cols() != nt || H.rows() != S.rows()) {
        throw DimensionError("optimizer", "H is " + dims(H) + ", S is " + dims(S) + ", R_d is " + dims(R_d));
    }
    if (L < nt) {
        throw ConfigError("optimizer", "code length L = " + std::to_string(L) + " is below N_t = " +
                                           std::to_string(nt));
    }
    const double power = R_d.trace().real();
    check_power(power);

    RadarReference out;
    Eigen::SelfAdjointEigenSolver<CMat> es(R_d, Eigen::EigenvaluesOnly);
    CMat R = R_d;
    // A non-converged solve only happens on degenerate (low-rank) R_d, so load it.
    if (es.info() != Eigen::Success || es.eigenvalues()(0) < eps_r * power / static_cast<double>(nt)) {
        R += CMat::Identity(nt, nt) * (eps_r * power / static_cast<double>(nt));
        out.regularized = true;
    }
    Eigen::LLT<CMat> llt(R);
    if (llt.info() != Eigen::Success) throw NumericalError("optimizer", "Cholesky factorization of R_d failed");
    const CMat F = llt.matrixL();

    const CMat M = F.adjoint() * H.adjoint() * S;
    Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw NumericalError("optimizer", "SVD in radar reference failed");

    const double sqrt_l = std::sqrt(static_cast<double>(L));
    out.X0 = sqrt_l * F * svd.matrixU() * svd.matrixV().leftCols(nt).adjoint();
    if (out.regularized) {
        out.X0 *= std::sqrt(static_cast<double>(L) * power / out.X0.squaredNorm());
    }
    return out;
}

double secular_value(double lambda, const RVec& eigvals, const CMat& VhG) {
    if (VhG.rows() != eigvals.size()) throw DimensionError("optimizer", "secular equation operands differ in size");
    double p = 0.0;
    for (Eigen::Index i = 0; i < eigvals.size(); ++i) {
        const double d = lambda + eigvals(i);
        if (d < 1e-12) {
            throw NumericalError("optimizer", "secular equation evaluated at or below a pole (lambda + lambda_i = " +
                                                  std::to_string(d) + ")");
        }
        p += VhG.row(i).squaredNorm() / (d * d);
    }
    return p;
}

void TradeoffConfig::validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw ConfigError("optimizer", "trade-off weight rho must lie in [0, 1] (got " + std::to_string(rho) + ")");
    }
    if (!(tolerance > 0.0)) throw ConfigError("optimizer", "line-search tolerance must be positive");
    if (max_iterations < 1 || max_expansions < 1) throw ConfigError("optimizer", "iteration limits must be >= 1");
}

TradeoffResult tradeoff_waveform(const CMat& H, const CMat& S, const CMat& X0, double p_t,
                                 const TradeoffConfig& config) {
    config.validate();
    check_power(p_t);
    const Eigen::Index nt = H.cols();
    const Eigen::Index L = S.cols();
    if (H.rows() != S.rows() || X0.rows() != nt || X0.cols() != L) {
        throw DimensionError("optimizer", "H is " + dims(H) + ", S is " + dims(S) + ", X0 is " + dims(X0));
    }
    const double rho = config.rho;
    const double target = static_cast<double>(L) * p_t;

    const CMat Q = rho * (H.adjoint() * H) + (1.0 - rho) * CMat::Identity(nt, nt);
    const CMat G = rho * (H.adjoint() * S) + (1.0 - rho) * X0;
    Eigen::SelfAdjointEigenSolver<CMat> es(Q);
    if (es.info() != Eigen::Success) throw NumericalError("optimizer", "eigendecomposition of Q failed");
    const RVec& ev = es.eigenvalues();
    const CMat& V = es.eigenvectors();
    const CMat VhG = V.adjoint() * G;

    TradeoffResult out;
    out.lambda_min = ev(0);
    const double lo0 = -ev(0) + 1e-9 * (1.0 + std::abs(ev(0)));

    auto solve_at = [&](double lambda) {
        CMat Y = VhG;
        for (Eigen::Index i = 0; i < nt; ++i) Y.row(i) /= (lambda + ev(i));
        return CMat(V * Y);
    };

    const double p_lo = secular_value(lo0, ev, VhG);
    if (p_lo < target) {
        // G has (numerically) no component along the smallest eigenvector(s) of Q: take
        // lambda = -lambda_min, solve on the remaining subspace and fill the missing
        // power along the minimal eigenvector.
        out.hard_case = true;
        out.lambda = -ev(0);
        const double gap = 1e-9 * (1.0 + std::abs(ev(0)));
        CMat Y = CMat::Zero(nt, L);
        for (Eigen::Index i = 0; i < nt; ++i) {
            const double d = ev(i) - ev(0);
            if (d > gap) Y.row(i) = VhG.row(i) / d;
        }
        const double remaining = target - Y.squaredNorm();
        Y(0, 0) += std::sqrt(std::max(remaining, 0.0));
        out.X = V * Y;
        out.X *= std::sqrt(target / out.X.squaredNorm());
        return out;
    }

    double lo = lo0;
    double step = 1.0;
    double hi = lo + step;
    int expansions = 0;
    while (secular_value(hi, ev, VhG) > target) {
        if (++expansions > config.max_expansions) {
            throw NumericalError("optimizer", "failed to bracket the dual variable after " +
                                                  std::to_string(config.max_expansions) + " expansions");
        }
        step *= 2.0;
        hi = lo + step;
    }

    auto f = [&](double lambda) {
        const double r = secular_value(lambda, ev, VhG) - target;
        return r * r;
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    int it = 0;
    while (it < config.max_iterations && (b - a) > config.tolerance * (1.0 + std::abs(0.5 * (a + b)))) {
        ++it;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    out.iterations = it;
    out.lambda = 0.5 * (a + b);
    out.X = solve_at(out.lambda);
    // Remove the residual line-search error from the power constraint.
    out.X *= std::sqrt(target / out.X.squaredNorm());
    return out;
}

CMat orthogonal_reference(int n_tx, int L, double p_t) {
    if (n_tx < 1) throw ConfigError("optimizer", "N_t must be >= 1");
    if (L < n_tx) {
        throw ConfigError("optimizer", "orthogonal reference needs L >= N_t (L = " + std::to_string(L) +
                                           ", N_t = " + std::to_string(n_tx) + ")");
    }
    check_power(p_t);
    const double scale = std::sqrt(p_t / n_tx);  // sqrt(L P_T / N_t) / sqrt(L)
    CMat X(n_tx, L);
    for (int r = 0; r < n_tx; ++r) {
        for (int c = 0; c < L; ++c) {
            // Reduce r c mod L in integers so the phase stays exact for large L.
            const double ph = -2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(r) * c) % L) / L;
            X(r, c) = std::polar(scale, ph);
        }
    }
    return X;
}

}  // namespace cogisac

// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cogisac/array.hpp"
#include "cogisac/optimizer.hpp"

using namespace cogisac;

namespace {

CMat random_cmat(Eigen::Index r, Eigen::Index c, Rng& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CMat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = cd(g(rng), g(rng));
    }
    return m;
}

CMat random_qpsk(Eigen::Index k, Eigen::Index l, Rng& rng) {
    std::uniform_int_distribution<int> q(0, 3);
    CMat s(k, l);
    for (Eigen::Index j = 0; j < l; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) s(i, j) = std::polar(1.0, M_PI / 4 + M_PI / 2 * q(rng));
    }
    return s;
}

double tradeoff_objective(const CMat& H, const CMat& S, const CMat& X0, const CMat& X, double rho) {
    return rho * (H * X - S).squaredNorm() + (1.0 - rho) * (X - X0).squaredNorm();
}

// Projected gradient on the power sphere, independent of the secular-equation solver.
CMat sphere_descent(const CMat& H, const CMat& S, const CMat& X0, double rho, double power, CMat X) {
    const double radius = std::sqrt(power);
    X *= radius / X.norm();
    const double lip = 2.0 * (rho * H.operatorNorm() * H.operatorNorm() + (1.0 - rho));
    for (int it = 0; it < 20000; ++it) {
        const CMat grad = 2.0 * (rho * H.adjoint() * (H * X - S) + (1.0 - rho) * (X - X0));
        CMat next = X - grad / lip;
        next *= radius / next.norm();
        if ((next - X).norm() < 1e-13) return next;
        X = next;
    }
    return X;
}

}  // namespace

TEST_CASE("isotropic covariance") {
    const CMat r = isotropic_covariance(4, 2.0);
    CHECK((r - 0.5 * CMat::Identity(4, 4)).norm() < 1e-15);
    CHECK_THROWS_AS(isotropic_covariance(0, 1.0), ConfigError);
    CHECK_THROWS_AS(isotropic_covariance(4, 0.0), ConfigError);
}

TEST_CASE("covariance design") {
    const UpaConfig upa{2, 2, 2, 2};
    const SpatialGrid g = make_grid(11, 11);

    SUBCASE("single steering vector gives the matched beam") {
        const CVec a = steering(upa, ArraySide::Transmit, g[17]);
        const std::vector<CVec> set{a};
        const CovarianceDesign d = design_covariance(set, 2.0);
        CHECK(std::abs(a.dot(d.u)) == doctest::Approx(a.norm()).epsilon(1e-12));
        CHECK(d.objective == doctest::Approx(2.0 * a.squaredNorm()).epsilon(1e-12));
        CHECK(d.R.trace().real() == doctest::Approx(2.0).epsilon(1e-13));
    }

    SUBCASE("two orthogonal directions share the eigenvalue") {
        // nu_x = 0 and nu_x = 0.5 are orthogonal on a 2-element axis.
        const CVec a = steering(2, 2, 0.0, 0.0);
        const CVec b = steering(2, 2, 0.5, 0.0);
        REQUIRE(std::abs(a.dot(b)) < 1e-12);
        const std::vector<CVec> set{a, b};
        const CovarianceDesign d = design_covariance(set, 1.0);
        CHECK(d.objective == doctest::Approx(4.0).epsilon(1e-12));
    }

    SUBCASE("random sets versus a dense eigensolver") {
        Rng rng(21);
        for (int t = 0; t < 20; ++t) {
            std::vector<CVec> set;
            for (int k = 0; k < 1 + t % 5; ++k) set.push_back(random_cmat(4, 1, rng).col(0));
            CMat B = CMat::Zero(4, 4);
            for (const CVec& v : set) B += v * v.adjoint();
            Eigen::SelfAdjointEigenSolver<CMat> es(B);
            const CovarianceDesign d = design_covariance(set, 3.0);
            CHECK(d.objective == doctest::Approx(3.0 * es.eigenvalues().maxCoeff()).epsilon(1e-10));
            CHECK((d.R * B).trace().real() == doctest::Approx(d.objective).epsilon(1e-10));
            CHECK(d.u.norm() == doctest::Approx(1.0).epsilon(1e-12));
            // Any other unit-trace beam does no better.
            const CVec w = random_cmat(4, 1, rng).col(0).normalized();
            CHECK(3.0 * w.dot(B * w).real() <= d.objective + 1e-10);
        }
    }

    SUBCASE("degenerate sums on a 10 x 10 array") {
        // Bin sets on which a symmetric QR eigensolver fails to converge for B.
        const UpaConfig big = UpaConfig::square(10);
        for (const std::vector<int>& bins : {std::vector<int>{117, 108, 6}, std::vector<int>{28, 2, 68, 19},
                                             std::vector<int>{5, 53, 62, 43, 13, 53, 80, 98, 103, 5}}) {
            std::vector<CVec> set;
            CMat B = CMat::Zero(100, 100);
            for (int b : bins) {
                set.push_back(steering(big, ArraySide::Transmit, g[b]).conjugate());
                B += set.back() * set.back().adjoint();
            }
            const CovarianceDesign d = design_covariance(set, 1.0);
            Eigen::ComplexEigenSolver<CMat> ces(B, false);
            double lmax = 0.0;
            for (Eigen::Index i = 0; i < 100; ++i) lmax = std::max(lmax, ces.eigenvalues()(i).real());
            CHECK(d.objective == doctest::Approx(lmax).epsilon(1e-9));
            CHECK(d.u.dot(B * d.u).real() == doctest::Approx(lmax).epsilon(1e-9));
        }
    }

    const std::vector<CVec> none;
    CHECK_THROWS_AS(design_covariance(none, 1.0), ConfigError);
}

TEST_CASE("radar reference meets the covariance constraint and beats random feasible waveforms") {
    Rng rng(31);
    const int nt = 4, k = 2, L = 10;
    const CMat H = random_cmat(k, nt, rng);
    const CMat S = random_qpsk(k, L, rng);
    const CMat A = random_cmat(nt, nt, rng);
    const CMat Rd = A * A.adjoint() / double(nt) + 0.1 * CMat::Identity(nt, nt);
    const RadarReference ref = radar_reference(H, S, Rd);
    CHECK_FALSE(ref.regularized);
    CHECK((ref.X0 * ref.X0.adjoint() / double(L) - Rd).norm() < 1e-10);

    const double best = (H * ref.X0 - S).squaredNorm();
    const CMat F = Rd.llt().matrixL();
    for (int t = 0; t < 200; ++t) {
        const CMat Q = random_cmat(L, nt, rng).householderQr().householderQ() * CMat::Identity(L, nt);
        const CMat X = std::sqrt(double(L)) * F * Q.adjoint();
        REQUIRE((X * X.adjoint() / double(L) - Rd).norm() < 1e-9);
        CHECK((H * X - S).squaredNorm() >= best - 1e-9);
    }

    SUBCASE("rank-deficient target is regularized and rescaled") {
        const CVec u = random_cmat(nt, 1, rng).col(0).normalized();
        const CMat R1 = 2.0 * u * u.adjoint();
        const RadarReference r = radar_reference(H, S, R1);
        CHECK(r.regularized);
        CHECK(r.X0.squaredNorm() == doctest::Approx(L * 2.0).epsilon(1e-10));
    }

    CHECK_THROWS_AS(radar_reference(H, S.leftCols(3), Rd), ConfigError);
}

TEST_CASE("secular function") {
    Rng rng(41);
    const CMat G = random_cmat(3, 5, rng);
    const RVec ones = RVec::Ones(3);
    for (double lambda : {0.0, 0.5, 3.0}) {
        CHECK(secular_value(lambda, ones, G) == doctest::Approx(G.squaredNorm() / std::pow(lambda + 1.0, 2)).epsilon(1e-13));
    }

    const CMat A = random_cmat(3, 3, rng);
    const CMat Q = A * A.adjoint() + 0.2 * CMat::Identity(3, 3);
    Eigen::SelfAdjointEigenSolver<CMat> es(Q);
    const CMat VhG = es.eigenvectors().adjoint() * G;
    const double lambda = 0.7;
    const CMat inv = (Q + lambda * CMat::Identity(3, 3)).inverse();
    CHECK(secular_value(lambda, es.eigenvalues(), VhG) == doctest::Approx((inv * G).squaredNorm()).epsilon(1e-11));
    CHECK_THROWS_AS(secular_value(-es.eigenvalues()(0), es.eigenvalues(), VhG), NumericalError);
}

TEST_CASE("trade-off waveform") {
    Rng rng(51);
    const int nt = 6, k = 3, L = 12;
    const double pt = 1.5;
    const CMat H = random_cmat(k, nt, rng);
    const CMat S = random_qpsk(k, L, rng);
    const CMat X0 = orthogonal_reference(nt, L, pt);

    SUBCASE("rho = 0 returns the reference") {
        TradeoffConfig c;
        c.rho = 0.0;
        const TradeoffResult r = tradeoff_waveform(H, S, X0, pt, c);
        CHECK((r.X - X0).norm() < 1e-8);
    }

    for (double rho : {0.2, 0.6, 1.0}) {
        CAPTURE(rho);
        TradeoffConfig c;
        c.rho = rho;
        const TradeoffResult r = tradeoff_waveform(H, S, X0, pt, c);
        CHECK(r.X.squaredNorm() == doctest::Approx(L * pt).epsilon(1e-12));
        const double obj = tradeoff_objective(H, S, X0, r.X, rho);
        const CMat oracle = sphere_descent(H, S, X0, rho, L * pt, X0 + random_cmat(nt, L, rng) * 0.1);
        CHECK(obj <= tradeoff_objective(H, S, X0, oracle, rho) + 1e-7);
        for (int t = 0; t < 200; ++t) {
            CMat X = random_cmat(nt, L, rng);
            X *= std::sqrt(L * pt) / X.norm();
            CHECK(obj <= tradeoff_objective(H, S, X0, X, rho) + 1e-9);
        }
    }

    TradeoffConfig bad;
    bad.rho = 1.2;
    CHECK_THROWS_AS(tradeoff_waveform(H, S, X0, pt, bad), ConfigError);
}

TEST_CASE("orthogonal reference") {
    const int nt = 4, L = 9;
    const double pt = 2.0;
    const CMat X = orthogonal_reference(nt, L, pt);
    CHECK((X * X.adjoint() - (L * pt / nt) * CMat::Identity(nt, nt)).norm() < 1e-12);
    CHECK(X.squaredNorm() == doctest::Approx(L * pt).epsilon(1e-13));
    // Row 0 of the DFT matrix is constant.
    for (int j = 0; j < L; ++j) CHECK(std::abs(X(0, j) - std::sqrt(pt / nt)) < 1e-13);
    CHECK_THROWS_AS(orthogonal_reference(4, 3, 1.0), ConfigError);
}

// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cogisac/array.hpp"

using namespace cogisac;

namespace {
const cd I{0.0, 1.0};
}

TEST_CASE("grid has inclusive endpoints and row-major indexing") {
    const SpatialGrid g = make_grid(11, 11);
    CHECK(g.size() == 121);
    CHECK(g[0].nu_x == -0.5);
    CHECK(g[0].nu_y == -0.5);
    CHECK(g[120].nu_x == 0.5);
    CHECK(g[g.index_of(5, 5)].nu_x == 0.0);
    for (int m = 1; m < 11; ++m) CHECK(g[m].nu_y - g[m - 1].nu_y == doctest::Approx(0.1).epsilon(1e-12));
    for (int m = 0; m < g.size(); ++m) {
        const auto [i, j] = g.coords(m);
        CHECK(g.index_of(i, j) == m);
        CHECK(g[m].index == m);
    }
    CHECK(g.find(0.3, 0.1).has_value());
    CHECK_FALSE(g.find(0.37, 0.0).has_value());
}

TEST_CASE("degenerate and thin grids") {
    const SpatialGrid one = make_grid(1, 1);
    CHECK(one.size() == 1);
    CHECK(one[0].nu_x == 0.0);
    CHECK(one[0].nu_y == 0.0);

    const SpatialGrid thin = make_grid(3, 1);
    REQUIRE(thin.size() == 3);
    CHECK(thin[0].nu_x == -0.5);
    CHECK(thin[1].nu_x == 0.0);
    CHECK(thin[2].nu_x == 0.5);
    CHECK_THROWS_AS(make_grid(0, 3), ConfigError);
}

TEST_CASE("steering vectors: hand-evaluated cases") {
    const CVec ones = steering(2, 2, 0.0, 0.0);
    REQUIRE(ones.size() == 4);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(ones(i) - 1.0) < 1e-15);

    const CVec two = steering(2, 1, 0.25, 0.0);
    CHECK(std::abs(two(0) - 1.0) < 1e-12);
    CHECK(std::abs(two(1) - I) < 1e-12);

    // a_x = [1, -1] and a_y = [1, 1], so a_x (x) a_y = [1, 1, -1, -1].
    const CVec ax = steering(2, 2, 0.5, 0.0);
    const double expect_x[] = {1, 1, -1, -1};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(ax(i) - expect_x[i]) < 1e-12);
    const CVec ay = steering(2, 2, 0.0, 0.5);
    const double expect_y[] = {1, -1, 1, -1};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(ay(i) - expect_y[i]) < 1e-12);
}

TEST_CASE("steering: unit modulus and Kronecker factorization") {
    const SpatialGrid g = make_grid(11, 11);
    for (int m = 0; m < g.size(); m += 3) {
        const CVec a = steering(3, 5, g[m].nu_x, g[m].nu_y);
        const CVec ax = steering(3, 1, g[m].nu_x, 0.0);
        const CVec ay = steering(1, 5, 0.0, g[m].nu_y);
        CHECK(a.squaredNorm() == doctest::Approx(15.0).epsilon(1e-14));
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 5; ++q) {
                CHECK(std::abs(std::abs(a(p * 5 + q)) - 1.0) < 1e-12);
                CHECK(std::abs(a(p * 5 + q) - ax(p) * ay(q)) < 1e-12);
            }
        }
    }
}

TEST_CASE("effective channel") {
    const UpaConfig upa{2, 1, 1, 2};
    const SpatialGrid g = make_grid(11, 11);
    const SpatialBin& bin = g[g.index_of(7, 2)];
    const CVec at = steering(upa, ArraySide::Transmit, bin);
    const CVec ar = steering(upa, ArraySide::Receive, bin);
    const int nt = upa.n_tx(), nr = upa.n_rx();

    SUBCASE("isotropic covariance") {
        const double pt = 3.0;
        const CVec ones = CVec::Ones(nt);
        const CVec h = effective_channel(ones, ar, CMat::Identity(nt, nt) * (pt / nt));
        for (int i = 0; i < nr; ++i) {
            for (int k = 0; k < nt; ++k) CHECK(std::abs(h(i * nt + k) - pt / nt * ar(i)) < 1e-14);
        }
    }

    SUBCASE("brute-force Kronecker oracle and linearity") {
        Rng rng(3);
        std::normal_distribution<double> n;
        CMat A(nt, nt), B(nt, nt);
        for (int i = 0; i < nt; ++i) {
            for (int j = 0; j < nt; ++j) {
                A(i, j) = cd(n(rng), n(rng));
                B(i, j) = cd(n(rng), n(rng));
            }
        }
        const CMat R1 = A * A.adjoint();
        const CMat R2 = B * B.adjoint();
        // Oracle: explicit Kronecker product a_r (x) (R^T a_t) as an (N_r N_t) x 1 column.
        const CVec col = R1.transpose() * at;
        CMat kron(nr * nt, 1);
        for (int i = 0; i < nr; ++i) {
            for (int k = 0; k < nt; ++k) kron(i * nt + k, 0) = ar(i) * col(k);
        }
        const CVec h1 = effective_channel(at, ar, R1);
        CHECK((h1 - kron.col(0)).norm() < 1e-12);
        const CVec h12 = effective_channel(at, ar, R1 + R2);
        CHECK((h12 - h1 - effective_channel(at, ar, R2)).norm() < 1e-12);
    }

    SUBCASE("rank-one covariance on the bin itself") {
        // R = P u u^H with u = conj(a_t)/||a_t|| gives a_t^T R = P ||a_t|| u^H... with norm P ||a_t||,
        // so ||h|| = P ||a_t|| ||a_r||.
        const double pt = 2.0;
        const CVec u = at.conjugate() / at.norm();
        const CVec h = effective_channel(at, ar, pt * u * u.adjoint());
        CHECK(h.norm() == doctest::Approx(pt * at.norm() * ar.norm()).epsilon(1e-12));
    }

    CHECK_THROWS_AS(effective_channel(at, ar, CMat::Identity(nt + 1, nt + 1)), DimensionError);
}

TEST_CASE("UPA validation") {
    CHECK_NOTHROW(UpaConfig::square(10).validate());
    CHECK(UpaConfig::square(10).n_virtual() == 10000);
    CHECK_THROWS_AS((UpaConfig{0, 2, 2, 2}.validate()), ConfigError);
}

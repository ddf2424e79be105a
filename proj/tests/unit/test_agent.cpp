// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "cogisac/agent.hpp"

using namespace cogisac;

namespace {

DetectionFrame frame_from(const std::vector<double>& stats, double eta = 9.0) {
    DetectionFrame f;
    f.eta = eta;
    for (double s : stats) {
        f.statistic.push_back(s);
        f.alpha_hat.push_back(0.0);
        f.pd_hat.push_back(marcum_q1(std::sqrt(s), std::sqrt(eta)));
        f.decision.push_back(s > eta ? 1 : 0);
        f.flagged.push_back(0);
        f.count += s > eta ? 1 : 0;
    }
    return f;
}

// Q_1(a, b) = 1 - int_0^b x exp(-(x^2 + a^2) / 2) I_0(a x) dx.
double marcum_by_quadrature(double a, double b) {
    auto f = [a](double x) {
        return x * std::exp(-(x - a) * (x - a) / 2.0) * boost::math::cyl_bessel_i(0, a * x) * std::exp(-a * x);
    };
    return 1.0 - boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, b, 10, 1e-13);
}

}  // namespace

TEST_CASE("Q table shape, greedy ties and state extraction") {
    QTable q(10);
    CHECK(q.states() == 11);
    CHECK(q.actions() == 11);
    CHECK(q.argmax(1) == 0);
    q(3, 4) = 1.0;
    q(3, 7) = 1.0;
    CHECK(q.argmax(3) == 4);
    CHECK_THROWS_AS(q.argmax(12), ConfigError);

    const DetectionFrame f = frame_from({20, 1, 30, 2, 15});
    const AgentState st = extract_state(f, 10);
    CHECK(st.count == 3);
    CHECK(st.s == 4);
    CHECK(extract_state(f, 2).s == 3);
    CHECK(top_bins(f, 2) == std::vector<int>{2, 0});
    CHECK(top_bins(frame_from({5, 5, 7}), 3) == std::vector<int>{2, 0, 1});
    CHECK(top_bins(f, 99).size() == 5);
}

TEST_CASE("action selection branches") {
    QTable q(10);
    q(4, 6) = 2.0;
    q(2, 1) = 1.0;
    const DetectionFrame f = frame_from({20, 1, 30, 2, 15, 12, 0.5});
    AgentConfig cfg;

    SUBCASE("greedy") {
        cfg.epsilon = 0.0;
        Rng rng(1);
        const ActionSelection a = select_action(q, cfg, 2, 4, f, rng);
        CHECK(a.j == 6);
        CHECK_FALSE(a.explored);
        CHECK(a.bins == std::vector<int>{2, 0, 4, 5, 3, 1});
    }

    SUBCASE("recovery uses the previous state") {
        cfg.epsilon = 1.0;
        Rng rng(1);
        const ActionSelection a = select_action(q, cfg, 2, 1, f, rng);
        CHECK(a.recovery);
        CHECK(a.j == 1);
    }

    SUBCASE("exploration is uniform on [m, T~]") {
        cfg.epsilon = 1.0;
        Rng rng(2);
        const int draws = 45000;
        std::vector<int> counts(11, 0);
        for (int t = 0; t < draws; ++t) {
            const ActionSelection a = select_action(q, cfg, 3, 3, f, rng);
            REQUIRE(a.explored);
            ++counts[static_cast<std::size_t>(a.j)];
        }
        CHECK(counts[0] == 0);
        CHECK(counts[1] == 0);
        // Pearson chi-square over 9 cells, 8 dof; 26.1 is the 0.999 quantile.
        const double expected = draws / 9.0;
        double chi2 = 0.0;
        for (int j = 2; j <= 10; ++j) chi2 += std::pow(counts[static_cast<std::size_t>(j)] - expected, 2) / expected;
        CHECK(chi2 < 26.1);
    }

    SUBCASE("epsilon mixing rate") {
        cfg.epsilon = 0.3;
        Rng rng(3);
        int explored = 0;
        for (int t = 0; t < 20000; ++t) explored += select_action(q, cfg, 1, 1, f, rng).explored ? 1 : 0;
        CHECK(explored / 20000.0 == doctest::Approx(0.3).epsilon(0.05));
    }
}

TEST_CASE("reward") {
    const DetectionFrame f = frame_from({20, 1, 30, 2});
    for (int m = 0; m < 4; ++m) {
        CHECK(f.pd_hat[m] == doctest::Approx(marcum_by_quadrature(std::sqrt(f.statistic[m]), 3.0)).epsilon(1e-9));
    }
    const double expect = f.pd_hat[0] + f.pd_hat[2] - f.pd_hat[1] - f.pd_hat[3];
    CHECK(compute_reward(f) == doctest::Approx(expect).epsilon(1e-14));
    const double oracle = f.pd_hat[1] - f.pd_hat[0] - f.pd_hat[2] - f.pd_hat[3];
    CHECK(compute_reward(f, TargetSetPolicy::oracle({1})) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK_THROWS_AS(compute_reward(f, TargetSetPolicy::oracle({4})), ConfigError);
    CHECK(compute_reward(frame_from({})) == 0.0);
}

TEST_CASE("SARSA update") {
    QTable q(3);
    q(1, 0) = 0.5;
    q(2, 1) = 0.5;
    AgentConfig cfg;
    sarsa_update(q, cfg, 1, 0, 1.0, 2, 1);
    // 0.5 + 0.8 (1 + 0.8 * 0.5 - 0.5)
    CHECK(q(1, 0) == doctest::Approx(1.22).epsilon(1e-14));
    sarsa_update(q, cfg, 4, 3, -1.0, 4, 3);
    CHECK(q(4, 3) == doctest::Approx(-0.8).epsilon(1e-14));
}

TEST_CASE("actions map to covariances") {
    const UpaConfig upa{2, 2, 2, 2};
    const SpatialGrid grid = make_grid(11, 11);
    const double pt = 2.0;

    ActionSelection none;
    CHECK((act_to_covariance(none, grid, upa, pt) - 0.5 * CMat::Identity(4, 4)).norm() < 1e-15);
    CHECK((orthogonal_policy(upa, pt) - 0.5 * CMat::Identity(4, 4)).norm() < 1e-15);

    ActionSelection one;
    one.j = 1;
    one.bins = {grid.index_of(8, 3)};
    const CMat R = act_to_covariance(one, grid, upa, pt);
    const CVec a = steering(upa, ArraySide::Transmit, grid[one.bins[0]]);
    CHECK(R.trace().real() == doctest::Approx(pt).epsilon(1e-13));
    // The transmitted pattern a^T R conj(a) reaches P_T N_t at the chosen bin.
    CHECK((a.transpose() * R * a.conjugate())(0).real() == doctest::Approx(pt * 4.0).epsilon(1e-12));
    // Bins elsewhere receive less.
    const CVec b = steering(upa, ArraySide::Transmit, grid[grid.index_of(2, 9)]);
    CHECK((b.transpose() * R * b.conjugate())(0).real() < pt * 4.0);
}

TEST_CASE("non-learning baseline") {
    const DetectionFrame f = frame_from({20, 1, 30, 2, 15});
    const ActionSelection a = nrl_policy(f, 10);
    CHECK(a.j == 3);
    CHECK(a.bins == std::vector<int>{2, 0, 4});
    CHECK(nrl_policy(f, 1).j == 1);
    CHECK(nrl_policy(frame_from({1, 2}), 10).j == 0);
}

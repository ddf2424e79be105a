// SPDX-License-Identifier: Apache-2.0
#include "cogisac/agent.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "cogisac/optimizer.hpp"

namespace cogisac {

void AgentConfig::validate() const {
    if (max_targets < 0) throw ConfigError("agent", "max_targets must be >= 0");
    auto unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("agent", std::string(name) + " must lie in [0, 1]");
    };
    unit(learning_rate, "learning_rate");
    unit(discount, "discount");
    unit(epsilon, "epsilon");
}

QTable::QTable(int max_targets) {
    if (max_targets < 0) throw ConfigError("agent", "max_targets must be >= 0");
    values_ = RMat::Zero(max_targets + 1, max_targets + 1);
}

int QTable::argmax(int s) const {
    if (s < 1 || s > states()) throw ConfigError("agent", "state " + std::to_string(s) + " out of range");
    int best = 0;
    for (int j = 1; j < actions(); ++j) {
        if (values_(s - 1, j) > values_(s - 1, best)) best = j;
    }
    return best;
}

AgentState extract_state(const DetectionFrame& frame, int max_targets) {
    AgentState st;
    st.count = std::min(frame.count, max_targets);
    st.s = st.count + 1;
    return st;
}

std::vector<int> top_bins(const DetectionFrame& frame, int j) {
    std::vector<int> idx(static_cast<std::size_t>(frame.bins()));
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t take = static_cast<std::size_t>(std::clamp(j, 0, frame.bins()));
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), [&](int a, int b) {
        const double la = frame.statistic[static_cast<std::size_t>(a)];
        const double lb = frame.statistic[static_cast<std::size_t>(b)];
        return la > lb || (la == lb && a < b);
    });
    idx.resize(take);
    return idx;
}

ActionSelection select_action(const QTable& q, const AgentConfig& config, int s_prev, int s_next,
                              const DetectionFrame& frame, Rng& rng) {
    ActionSelection sel;
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    const int m_prev = s_prev - 1;
    const int m_next = s_next - 1;
    if (m_next < m_prev) {
        sel.recovery = true;
        sel.j = q.argmax(s_prev);
    } else if (u < config.epsilon) {
        sel.explored = true;
        boost::random::uniform_int_distribution<int> pick(m_next, q.actions() - 1);
        sel.j = pick(rng);
    } else {
        sel.j = q.argmax(s_next);
    }
    sel.bins = top_bins(frame, sel.j);
    return sel;
}

double compute_reward(const DetectionFrame& frame, const TargetSetPolicy& policy) {
    const std::size_t n = static_cast<std::size_t>(frame.bins());
    std::vector<std::uint8_t> in_target(n, 0);
    if (policy.kind == TargetSetPolicy::Kind::Detected) {
        in_target = frame.decision;
    } else {
        for (int b : policy.bins) {
            if (b < 0 || static_cast<std::size_t>(b) >= n) throw ConfigError("agent", "oracle bin out of range");
            in_target[static_cast<std::size_t>(b)] = 1;
        }
    }
    double r = 0.0;
    for (std::size_t m = 0; m < n; ++m) r += in_target[m] ? frame.pd_hat[m] : -frame.pd_hat[m];
    return r;
}

void sarsa_update(QTable& q, const AgentConfig& config, int s, int a, double r, int s_next, int a_next) {
    const double target = r + config.discount * q(s_next, a_next);
    q(s, a) += config.learning_rate * (target - q(s, a));
}

CMat act_to_covariance(const ActionSelection& selection, const SpatialGrid& grid, const UpaConfig& upa, double p_t) {
    if (selection.bins.empty()) return isotropic_covariance(upa.n_tx(), p_t);
    std::vector<CVec> v;
    v.reserve(selection.bins.size());
    for (int b : selection.bins) v.push_back(steering(upa, ArraySide::Transmit, grid[b]).conjugate());
    return design_covariance(v, p_t).R;
}

ActionSelection nrl_policy(const DetectionFrame& frame, int max_targets) {
    ActionSelection sel;
    sel.j = std::min(frame.count, max_targets);
    sel.bins = top_bins(frame, sel.j);
    return sel;
}

CMat orthogonal_policy(const UpaConfig& upa, double p_t) { return isotropic_covariance(upa.n_tx(), p_t); }

}  // namespace cogisac

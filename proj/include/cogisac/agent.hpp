// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "cogisac/array.hpp"
#include "cogisac/detector.hpp"
#include "cogisac/types.hpp"

namespace cogisac {

struct AgentConfig {
    int max_targets = 10;  ///< T~: states 1..T~+1, actions 0..T~
    double learning_rate = 0.8;
    double discount = 0.8;
    double epsilon = 0.5;

    void validate() const;
};

/// State-action values, rows indexed by state s - 1, columns by action j.
class QTable {
public:
    explicit QTable(int max_targets);

    int states() const { return static_cast<int>(values_.rows()); }
    int actions() const { return static_cast<int>(values_.cols()); }

    double operator()(int s, int j) const { return values_(s - 1, j); }
    double& operator()(int s, int j) { return values_(s - 1, j); }

    /// Greedy action for state s; ties resolve to the lowest j.
    int argmax(int s) const;

    const RMat& values() const { return values_; }

private:
    RMat values_;
};

struct AgentState {
    int s = 1;
    int count = 0;  ///< detections T_p clipped to T~
};

AgentState extract_state(const DetectionFrame& frame, int max_targets);

struct ActionSelection {
    int j = 0;
    std::vector<int> bins;  ///< top-j bins by statistic, descending
    bool recovery = false;
    bool explored = false;
};

/// Indices of the j largest statistics, descending; equal values keep the lower index first.
std::vector<int> top_bins(const DetectionFrame& frame, int j);

/// Quasi epsilon-greedy with target recovery. One uniform variate is consumed on every
/// call (and one more when exploring), so the stream stays aligned across branches.
ActionSelection select_action(const QTable& q, const AgentConfig& config, int s_prev, int s_next,
                              const DetectionFrame& frame, Rng& rng);

/// Which bins count as targets in the reward.
struct TargetSetPolicy {
    enum class Kind { Detected, Oracle };
    Kind kind = Kind::Detected;
    std::vector<int> bins;  ///< used by Oracle

    static TargetSetPolicy detected() { return {}; }
    static TargetSetPolicy oracle(std::vector<int> bins) { return {Kind::Oracle, std::move(bins)}; }
};

/// Sum of estimated P_D over the target set minus the sum over its complement.
double compute_reward(const DetectionFrame& frame, const TargetSetPolicy& policy = TargetSetPolicy::detected());

/// Q(s, a) += lr (r + gamma Q(s', a') - Q(s, a)).
void sarsa_update(QTable& q, const AgentConfig& config, int s, int a, double r, int s_next, int a_next);

/// j >= 1: beampattern design over the selected bins; j = 0: isotropic.
/// The transmit steering enters conjugated so the designed beam a_t^T R peaks at the bin.
CMat act_to_covariance(const ActionSelection& selection, const SpatialGrid& grid, const UpaConfig& upa, double p_t);

/// Non-learning baseline: focus on the current detections, j = min(T_p, T~).
ActionSelection nrl_policy(const DetectionFrame& frame, int max_targets);

/// Static baseline covariance (P_T / N_t) I.
CMat orthogonal_policy(const UpaConfig& upa, double p_t);

}  // namespace cogisac

// SPDX-License-Identifier: Apache-2.0
#include "cogisac/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <boost/random/uniform_real_distribution.hpp>

#include "cogisac/comms.hpp"

namespace cogisac {

namespace {

// Stream tags for derive_rng; fixed so outputs stay comparable across versions.
enum Stream : std::uint32_t { kClutter = 1, kPhase = 2, kComm = 3, kAgent = 4 };

struct VariantState {
    QTable q;
    Rng rng;
    int s_prev = 1;
    int a_prev = 1;
    CMat X;
    CMat R_next;
};

}  // namespace

double target_amplitude(double snr_db, double sigma_w2) { return std::sqrt(std::pow(10.0, snr_db / 10.0) * sigma_w2); }

std::vector<CVec> synthesize_echo(const std::vector<CVec>& channels, const std::vector<CVec>& clutter,
                                  const std::vector<EchoTarget>& targets) {
    if (channels.size() != clutter.size()) throw DimensionError("simkit", "channel and clutter bin counts differ");
    std::vector<CVec> y = clutter;
    for (const auto& t : targets) {
        if (t.bin < 0 || static_cast<std::size_t>(t.bin) >= y.size()) throw ConfigError("simkit", "target bin out of range");
        y[static_cast<std::size_t>(t.bin)] += t.alpha * channels[static_cast<std::size_t>(t.bin)];
    }
    return y;
}

std::vector<EpisodeLog> run_episode_group(const ScenarioSpec& spec, const std::vector<Variant>& variants, int run) {
    validate_scenario(spec);
    const SpatialGrid grid = spec.grid();
    const int bins = grid.size();
    const UpaConfig& upa = spec.upa;
    const int nt = upa.n_tx();
    const int L = spec.code_length;
    const int P = spec.pulses;
    const auto ntargets = spec.targets.size();

    std::vector<CVec> a_t(static_cast<std::size_t>(bins));
    std::vector<CVec> a_r(static_cast<std::size_t>(bins));
    for (int m = 0; m < bins; ++m) {
        a_t[static_cast<std::size_t>(m)] = steering(upa, ArraySide::Transmit, grid[m]);
        a_r[static_cast<std::size_t>(m)] = steering(upa, ArraySide::Receive, grid[m]);
    }
    // Resolved bin per target per pulse (-1 when inactive).
    std::vector<std::vector<int>> target_bin(static_cast<std::size_t>(P), std::vector<int>(ntargets, -1));
    std::vector<std::vector<double>> target_amp(static_cast<std::size_t>(P), std::vector<double>(ntargets, 0.0));
    for (int p = 1; p <= P; ++p) {
        for (std::size_t t = 0; t < ntargets; ++t) {
            if (const ScheduleEntry* e = spec.targets[t].active_at(p)) {
                target_bin[static_cast<std::size_t>(p - 1)][t] = *grid.find(e->nu_x, e->nu_y);
                target_amp[static_cast<std::size_t>(p - 1)][t] =
                    target_amplitude(*e->snr_db + spec.snr_offset_db, spec.clutter.noise.sigma_w2);
            }
        }
    }

    const auto urun = static_cast<std::uint32_t>(run);
    Rng rng_clutter = derive_rng(spec.seed, {urun, kClutter});
    Rng rng_phase = derive_rng(spec.seed, {urun, kPhase});
    Rng rng_comm = derive_rng(spec.seed, {urun, kComm});
    const ClutterGenerator clutter_gen(spec.clutter);
    boost::random::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    const CMat H = sample_channel(spec.users, nt, rng_comm);
    CMat S = sample_qpsk(spec.users, L, rng_comm);

    // Before any observation every policy transmits the isotropic design (action j = 0).
    const CMat X0_init = radar_reference(H, S, isotropic_covariance(nt, spec.power)).X0;
    std::vector<VariantState> state;
    std::vector<EpisodeLog> logs(variants.size());
    for (std::size_t v = 0; v < variants.size(); ++v) {
        TradeoffConfig cfg = spec.solver;
        cfg.rho = variants[v].rho;
        CMat X_init = tradeoff_waveform(H, S, X0_init, spec.power, cfg).X;
        state.push_back({QTable(spec.agent.max_targets), derive_rng(spec.seed, {urun, kAgent}), 1, 1,
                         std::move(X_init), CMat()});
        EpisodeLog& lg = logs[v];
        lg.detection.reserve(static_cast<std::size_t>(P));
        lg.interference.reserve(static_cast<std::size_t>(P));
    }

    std::vector<CVec> clutter(static_cast<std::size_t>(bins));
    std::vector<CVec> h(static_cast<std::size_t>(bins));
    for (int p = 1; p <= P; ++p) {
        const auto pi = static_cast<std::size_t>(p - 1);
        for (auto& c : clutter) c = vectorize_to_channels(clutter_gen.generate(upa.n_rx(), nt, rng_clutter), upa);
        std::vector<EchoTarget> echo_targets;
        for (std::size_t t = 0; t < ntargets; ++t) {
            const double ph = phase(rng_phase);  // drawn for every target so the stream stays aligned
            if (target_bin[pi][t] >= 0) echo_targets.push_back({target_bin[pi][t], std::polar(target_amp[pi][t], ph)});
        }

        for (std::size_t v = 0; v < variants.size(); ++v) {
            VariantState& st = state[v];
            EpisodeLog& lg = logs[v];
            const CMat R = st.X * st.X.adjoint() / static_cast<double>(L);
            for (int m = 0; m < bins; ++m) {
                h[static_cast<std::size_t>(m)] = effective_channel(a_t[static_cast<std::size_t>(m)], a_r[static_cast<std::size_t>(m)], R);
            }
            const std::vector<CVec> y = synthesize_echo(h, clutter, echo_targets);
            const DetectionFrame frame = detect_frame(h, y, spec.detector);

            std::vector<std::int8_t> det(ntargets, -1);
            for (std::size_t t = 0; t < ntargets; ++t) {
                const int b = target_bin[pi][t];
                if (b >= 0) det[t] = static_cast<std::int8_t>(frame.decision[static_cast<std::size_t>(b)]);
            }
            lg.detection.push_back(std::move(det));
            lg.count.push_back(frame.count);
            lg.power.push_back(st.X.squaredNorm());
            lg.mui.push_back(mui_energy(H, st.X, S));
            lg.interference.push_back(per_user_interference(H, st.X, S));
            const double r = compute_reward(frame);
            lg.reward.push_back(r);

            ActionSelection sel;
            switch (variants[v].policy) {
                case Policy::Rl: {
                    const AgentState next = extract_state(frame, spec.agent.max_targets);
                    sel = select_action(st.q, spec.agent, st.s_prev, next.s, frame, st.rng);
                    sarsa_update(st.q, spec.agent, st.s_prev, st.a_prev, r, next.s, sel.j);
                    st.s_prev = next.s;
                    st.a_prev = sel.j;
                    break;
                }
                case Policy::Nrl:
                    sel = nrl_policy(frame, spec.agent.max_targets);
                    break;
                case Policy::Orthogonal:
                    break;
            }
            lg.action.push_back(sel.j);
            st.R_next = act_to_covariance(sel, grid, upa, spec.power);
        }

        if (p == P) break;
        S = sample_qpsk(spec.users, L, rng_comm);
        for (std::size_t v = 0; v < variants.size(); ++v) {
            VariantState& st = state[v];
            TradeoffConfig cfg = spec.solver;
            cfg.rho = variants[v].rho;
            const CMat X0 = radar_reference(H, S, st.R_next).X0;
            st.X = tradeoff_waveform(H, S, X0, spec.power, cfg).X;
        }
    }
    return logs;
}

EpisodeLog run_episode(const ScenarioSpec& spec, int run) {
    return run_episode_group(spec, {Variant{spec.policy, spec.rho}}, run).front();
}

MonteCarloResult run_monte_carlo(const ScenarioSpec& spec, const std::vector<Variant>& variants,
                                 const RunOptions& options) {
    validate_scenario(spec);
    if (variants.empty()) throw ConfigError("simkit", "no variants to run");
    MonteCarloResult res;
    res.spec = spec;
    res.variants = variants;
    res.logs.assign(variants.size(), std::vector<EpisodeLog>(static_cast<std::size_t>(spec.mc_runs)));

    int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, spec.mc_runs);

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const int run = next.fetch_add(1);
            if (run >= spec.mc_runs) return;
            try {
                auto group = run_episode_group(spec, variants, run);
                for (std::size_t v = 0; v < variants.size(); ++v) {
                    res.logs[v][static_cast<std::size_t>(run)] = std::move(group[v]);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(spec.mc_runs);
                return;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return res;
}

MonteCarloResult run_monte_carlo(const ScenarioSpec& spec, const RunOptions& options) {
    return run_monte_carlo(spec, {Variant{spec.policy, spec.rho}}, options);
}

RateSample rate_at(const EpisodeLog& log, int pulse_index, double snr_db) {
    const double n0 = noise_power_from_snr_db(snr_db);
    const auto& interference = log.interference.at(static_cast<std::size_t>(pulse_index));
    const std::vector<double> g = sinr_from_interference(interference, n0);
    RateSample r;
    r.sum_rate = sum_rate(g);
    r.normalized = normalized_sum_rate(g, n0);
    r.per_user = g.empty() ? 0.0 : r.sum_rate / static_cast<double>(g.size());
    return r;
}

Aggregate aggregate(const MonteCarloResult& result, std::size_t variant, double snr_db) {
    const auto& logs = result.logs.at(variant);
    const int P = result.spec.pulses;
    const auto T = static_cast<Eigen::Index>(result.spec.targets.size());
    Aggregate a;
    a.variant = result.variants.at(variant);
    a.runs = static_cast<int>(logs.size());
    a.p_detect = RMat::Zero(P, T);
    a.sum_rate.assign(static_cast<std::size_t>(P), 0.0);
    a.normalized_sum_rate.assign(static_cast<std::size_t>(P), 0.0);
    a.mui.assign(static_cast<std::size_t>(P), 0.0);
    a.per_user_sum_rate.assign(static_cast<std::size_t>(P), 0.0);
    a.mean_count.assign(static_cast<std::size_t>(P), 0.0);
    std::vector<std::vector<int>> active(static_cast<std::size_t>(P), std::vector<int>(static_cast<std::size_t>(T), 0));

    // Runs are reduced in index order so the floating-point sums are reproducible.
    for (const EpisodeLog& lg : logs) {
        for (int p = 0; p < P; ++p) {
            const auto pi = static_cast<std::size_t>(p);
            for (Eigen::Index t = 0; t < T; ++t) {
                const std::int8_t d = lg.detection[pi][static_cast<std::size_t>(t)];
                if (d >= 0) {
                    ++active[pi][static_cast<std::size_t>(t)];
                    a.p_detect(p, t) += d;
                }
            }
            const RateSample r = rate_at(lg, p, snr_db);
            a.sum_rate[pi] += r.sum_rate;
            a.normalized_sum_rate[pi] += r.normalized;
            a.per_user_sum_rate[pi] += r.per_user;
            a.mui[pi] += lg.mui[pi];
            a.mean_count[pi] += lg.count[pi];
        }
    }
    const double n = std::max(1, a.runs);
    for (int p = 0; p < P; ++p) {
        const auto pi = static_cast<std::size_t>(p);
        for (Eigen::Index t = 0; t < T; ++t) {
            const int k = active[pi][static_cast<std::size_t>(t)];
            a.p_detect(p, t) = k > 0 ? a.p_detect(p, t) / k : std::numeric_limits<double>::quiet_NaN();
        }
        a.sum_rate[pi] /= n;
        a.normalized_sum_rate[pi] /= n;
        a.per_user_sum_rate[pi] /= n;
        a.mui[pi] /= n;
        a.mean_count[pi] /= n;
    }
    return a;
}

MeanSe window_rate(const MonteCarloResult& result, std::size_t variant, double snr_db, int first, int last,
                   double RateSample::*field) {
    if (first < 1 || last < first || last > result.spec.pulses) throw ConfigError("simkit", "invalid pulse window");
    const auto& logs = result.logs.at(variant);
    std::vector<double> per_run;
    per_run.reserve(logs.size());
    for (const EpisodeLog& lg : logs) {
        double acc = 0.0;
        for (int p = first; p <= last; ++p) acc += rate_at(lg, p - 1, snr_db).*field;
        per_run.push_back(acc / (last - first + 1));
    }
    MeanSe out;
    if (per_run.empty()) return out;
    double sum = 0.0;
    for (double v : per_run) sum += v;
    out.mean = sum / static_cast<double>(per_run.size());
    if (per_run.size() > 1) {
        double ss = 0.0;
        for (double v : per_run) ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / static_cast<double>(per_run.size() - 1) / static_cast<double>(per_run.size()));
    }
    return out;
}

}  // namespace cogisac

// SPDX-License-Identifier: Apache-2.0
#include "cogisac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace cogisac {

std::string to_string(Policy p) {
    switch (p) {
        case Policy::Rl: return "rl";
        case Policy::Nrl: return "nrl";
        case Policy::Orthogonal: return "orthogonal";
    }
    return "rl";
}

std::optional<Policy> parse_policy(const std::string& s) {
    if (s == "rl") return Policy::Rl;
    if (s == "nrl") return Policy::Nrl;
    if (s == "orthogonal") return Policy::Orthogonal;
    return std::nullopt;
}

const ScheduleEntry* TargetSpec::active_at(int pulse) const {
    for (const auto& e : schedule) {
        if (pulse >= e.first && pulse <= e.last && e.snr_db) return &e;
    }
    return nullptr;
}

std::vector<Diagnostic> check_scenario(const ScenarioSpec& spec) {
    std::vector<Diagnostic> out;
    auto err = [&](std::string code, std::string path, std::string msg) {
        out.push_back({std::move(code), std::move(path), std::move(msg), true});
    };
    auto range = [&](bool ok, const std::string& path, const std::string& msg) {
        if (!ok) err("E500", path, msg);
    };

    range(spec.upa.tx_x >= 1 && spec.upa.tx_y >= 1, "array.tx", "transmit UPA dimensions must be >= 1");
    range(spec.upa.rx_x >= 1 && spec.upa.rx_y >= 1, "array.rx", "receive UPA dimensions must be >= 1");
    range(spec.grid_lx >= 1 && spec.grid_ly >= 1, "grid", "grid dimensions must be >= 1");
    range(spec.pulses >= 1, "pulses", "pulses must be >= 1");
    range(spec.mc_runs >= 1, "mc_runs", "mc_runs must be >= 1");
    range(spec.power > 0.0 && std::isfinite(spec.power), "power", "transmit power must be positive");
    range(spec.code_length >= 1, "code_length", "code length must be >= 1");
    range(spec.users >= 1, "comms.users", "user count must be >= 1");
    range(std::isfinite(spec.comm_snr_db), "comms.snr_db", "communication SNR must be finite");
    range(spec.rho >= 0.0 && spec.rho <= 1.0, "rho", "rho must lie in [0, 1]");
    range(spec.detector.p_fa > 0.0 && spec.detector.p_fa < 1.0, "detector.p_fa", "p_fa must lie in (0, 1)");
    range(spec.detector.loading >= 0.0 && std::isfinite(spec.detector.loading), "detector.loading",
          "loading must be finite and >= 0");
    range(spec.clutter.noise.mu > 1.0, "clutter.mu", "mu must exceed 1");
    range(spec.clutter.noise.sigma_w2 > 0.0 && std::isfinite(spec.clutter.noise.sigma_w2), "clutter.sigma_w2",
          "sigma_w2 must be positive");
    range(spec.clutter.burn_in >= 0, "clutter.burn_in", "burn_in must be >= 0");
    range(spec.agent.max_targets >= 0, "agent.max_targets", "max_targets must be >= 0");
    range(spec.agent.learning_rate >= 0.0 && spec.agent.learning_rate <= 1.0, "agent.learning_rate",
          "learning_rate must lie in [0, 1]");
    range(spec.agent.discount >= 0.0 && spec.agent.discount <= 1.0, "agent.discount", "discount must lie in [0, 1]");
    range(spec.agent.epsilon >= 0.0 && spec.agent.epsilon <= 1.0, "agent.epsilon", "epsilon must lie in [0, 1]");
    range(spec.solver.tolerance > 0.0, "solver.tolerance", "tolerance must be positive");
    range(spec.solver.max_iterations >= 1, "solver.max_iterations", "max_iterations must be >= 1");
    range(spec.solver.max_expansions >= 1, "solver.max_expansions", "max_expansions must be >= 1");
    range(std::isfinite(spec.snr_offset_db), "snr_offset_db", "snr_offset_db must be finite");

    const int nt = spec.upa.n_tx();
    const int n = spec.upa.n_virtual();
    if (spec.users > nt && nt >= 1) {
        err("E400", "comms.users", "K = " + std::to_string(spec.users) + " exceeds N_t = " + std::to_string(nt));
    }
    if (spec.code_length < nt) {
        err("E401", "code_length", "L = " + std::to_string(spec.code_length) + " is below N_t = " + std::to_string(nt));
    }
    if (spec.detector.lag >= 0) {
        if (spec.detector.lag >= n) {
            err("E500", "detector.lag", "lag must be below N = " + std::to_string(n));
        } else if (lag_exceeds_growth_bound(spec.detector.lag, n)) {
            out.push_back({"W100", "detector.lag",
                           "lag " + std::to_string(spec.detector.lag) + " is not below N^(1/3) for N = " +
                               std::to_string(n),
                           false});
        }
    }
    if (spec.clutter.coefficients.rho.size() == 0 || !spec.clutter.coefficients.is_stable()) {
        err("E300", "clutter.rho", "AR coefficients are unstable");
    }

    std::set<int> ids;
    std::map<int, std::vector<std::pair<int, int>>> occupancy;  // bin -> active intervals
    const bool grid_ok = spec.grid_lx >= 1 && spec.grid_ly >= 1;
    const SpatialGrid grid = grid_ok ? spec.grid() : make_grid(1, 1);
    for (std::size_t t = 0; t < spec.targets.size(); ++t) {
        const TargetSpec& tg = spec.targets[t];
        const std::string base = "targets[" + std::to_string(t) + "]";
        if (!ids.insert(tg.id).second) err("E100", base + ".id", "duplicate target id " + std::to_string(tg.id));
        if (tg.schedule.empty()) err("E100", base + ".schedule", "schedule must not be empty");
        for (std::size_t k = 0; k < tg.schedule.size(); ++k) {
            const ScheduleEntry& e = tg.schedule[k];
            const std::string path = base + ".schedule[" + std::to_string(k) + "]";
            if (e.first < 1 || e.last < e.first || e.last > spec.pulses) {
                err("E201", path + ".pulses",
                    "interval [" + std::to_string(e.first) + ", " + std::to_string(e.last) + "] must satisfy 1 <= a <= b <= " +
                        std::to_string(spec.pulses));
            }
            for (std::size_t k2 = 0; k2 < k; ++k2) {
                const ScheduleEntry& o = tg.schedule[k2];
                if (e.first <= o.last && o.first <= e.last) {
                    err("E201", path + ".pulses", "interval overlaps schedule entry " + std::to_string(k2));
                }
            }
            if (e.snr_db && !std::isfinite(*e.snr_db)) err("E500", path + ".snr_db", "SNR must be finite");
            if (grid_ok) {
                const auto bin = grid.find(e.nu_x, e.nu_y);
                if (!bin) {
                    err("E200", path + ".position",
                        "position (" + std::to_string(e.nu_x) + ", " + std::to_string(e.nu_y) + ") is not a grid bin");
                } else if (e.snr_db) {
                    auto& iv = occupancy[*bin];
                    for (const auto& [a, b] : iv) {
                        if (e.first <= b && a <= e.last) {
                            err("E201", path, "another target occupies the same bin during this interval");
                            break;
                        }
                    }
                    iv.emplace_back(e.first, e.last);
                }
            }
        }
    }
    return out;
}

void validate_scenario(const ScenarioSpec& spec) {
    for (const auto& d : check_scenario(spec)) {
        if (d.error) throw ConfigError("simkit", d.code + " " + d.path + ": " + d.message);
    }
}

namespace {

TargetSpec constant_target(int id, int first, int last, double x, double y, double snr) {
    return {id, {{first, last, x, y, snr}}};
}

ScenarioSpec base_full(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    s.upa = UpaConfig::square(10);
    s.mc_runs = 1000;
    // Full rank-one beam designs need L >= N_t = 100 for the reference waveform.
    s.code_length = 100;
    s.users = 48;
    return s;
}

ScenarioSpec base_desk(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    s.upa = UpaConfig::square(4);
    s.mc_runs = 200;
    s.code_length = 30;
    s.users = 8;
    return s;
}

void add_stationary4(ScenarioSpec& s) {
    s.pulses = 50;
    s.targets = {constant_target(1, 1, 50, -0.4, -0.4, -30.0), constant_target(2, 1, 50, 0.0, 0.0, -25.0),
                 constant_target(3, 1, 50, 0.3, 0.1, -20.0), constant_target(4, 1, 50, -0.1, 0.4, -15.0)};
}

void add_dynamic3(ScenarioSpec& s) {
    s.pulses = 140;
    TargetSpec t1{1,
                  {{1, 100, -0.4, -0.4, -30.0},
                   {101, 110, -0.4, -0.4, -31.0},
                   {111, 120, -0.4, -0.4, -32.0},
                   {121, 130, -0.4, -0.4, -33.0},
                   {131, 140, -0.4, -0.4, -34.0}}};
    s.targets = {t1, constant_target(2, 1, 50, 0.0, 0.0, -25.0), constant_target(3, 51, 140, 0.3, 0.1, -30.0)};
}

void add_sequential7(ScenarioSpec& s) {
    s.pulses = 140;
    const double pos[7][2] = {{-0.4, -0.4}, {0.0, 0.0}, {0.3, 0.1}, {-0.1, 0.4}, {0.4, -0.3}, {-0.3, 0.2}, {0.2, 0.4}};
    s.targets.clear();
    for (int k = 0; k < 7; ++k) {
        s.targets.push_back(constant_target(k + 1, 1 + 20 * k, 140, pos[k][0], pos[k][1], -25.0));
    }
}

double desk_offset() {
    static const double offset = [] {
        ScenarioSpec s = base_desk("stationary4-desk");
        add_stationary4(s);
        return calibrate_snr_offset(s, 0.9);
    }();
    return offset;
}

}  // namespace

std::vector<std::string> scenario_names() {
    return {"stationary4", "stationary4-desk", "dynamic3", "dynamic3-desk", "sequential7", "sequential7-desk"};
}

ScenarioSpec library_scenario(const std::string& name) {
    const bool desk = name.size() > 5 && name.ends_with("-desk");
    const std::string stem = desk ? name.substr(0, name.size() - 5) : name;
    ScenarioSpec s = desk ? base_desk(name) : base_full(name);
    if (stem == "stationary4") {
        add_stationary4(s);
    } else if (stem == "dynamic3") {
        add_dynamic3(s);
    } else if (stem == "sequential7") {
        add_sequential7(s);
    } else {
        throw ConfigError("simkit", "unknown scenario '" + name + "'");
    }
    if (desk) s.snr_offset_db = desk_offset();
    return s;
}

double calibrate_snr_offset(const ScenarioSpec& spec, double target_pd) {
    if (!(target_pd > 0.0 && target_pd < 1.0)) throw ConfigError("simkit", "target P_D must lie in (0, 1)");
    const ScheduleEntry* weakest = nullptr;
    for (const auto& t : spec.targets) {
        const ScheduleEntry* e = t.active_at(1);
        if (e && (!weakest || *e->snr_db < *weakest->snr_db)) weakest = e;
    }
    if (!weakest) throw ConfigError("simkit", "calibration needs a target active at pulse 1");

    const SpatialGrid grid = spec.grid();
    const auto bin = grid.find(weakest->nu_x, weakest->nu_y);
    if (!bin) throw ConfigError("simkit", "calibration target is off-grid");
    const CVec a_t = steering(spec.upa, ArraySide::Transmit, grid[*bin]);
    const CVec a_r = steering(spec.upa, ArraySide::Receive, grid[*bin]);
    const std::vector<CVec> beam{a_t.conjugate()};
    const CMat R = design_covariance(beam, spec.power).R;
    const CVec h = effective_channel(a_t, a_r, R);
    const CMat gamma = clutter_covariance(spec.clutter, spec.upa);
    const double q = h.dot(gamma * h).real();
    const double alpha2 = std::pow(10.0, *weakest->snr_db / 10.0) * spec.clutter.noise.sigma_w2;
    const double zeta0 = noncentrality(std::sqrt(alpha2), h.squaredNorm(), q);

    const double eta = spec.detector.eta();
    double lo = 0.0;
    double hi = 1.0;
    while (asymptotic_pd(hi, eta) < target_pd) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (asymptotic_pd(mid, eta) < target_pd ? lo : hi) = mid;
    }
    const double offset = 10.0 * std::log10(hi / zeta0);
    return std::ceil(offset * 10.0 - 1e-9) / 10.0;
}

}  // namespace cogisac

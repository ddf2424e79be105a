// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "cogisac/scenario_io.hpp"
#include "cogisac/simkit.hpp"

using namespace cogisac;

namespace {

// N_t = N_r = 4 on a 5 x 5 grid keeps each run to a few milliseconds.
ScenarioSpec tiny(int pulses = 6) {
    ScenarioSpec s;
    s.name = "tiny";
    s.upa = {2, 2, 2, 2};
    s.grid_lx = 5;
    s.grid_ly = 5;
    s.pulses = pulses;
    s.mc_runs = 3;
    s.seed = 5;
    s.code_length = 8;
    s.users = 2;
    s.clutter.burn_in = 10;
    s.detector.p_fa = 1e-2;
    s.snr_offset_db = 15.0;
    s.targets = {{1, {{1, pulses, -0.25, 0.25, -5.0}}}, {2, {{std::min(2, pulses), pulses, 0.5, 0.0, -10.0}}}};
    return s;
}

bool has_code(const std::vector<Diagnostic>& d, const std::string& code) {
    return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.code == code; });
}

bool same_log(const EpisodeLog& a, const EpisodeLog& b) {
    return a.detection == b.detection && a.count == b.count && a.reward == b.reward && a.action == b.action &&
           a.mui == b.mui && a.power == b.power && a.interference == b.interference;
}

}  // namespace

TEST_CASE("scenario library") {
    CHECK(scenario_names().size() == 6);
    const ScenarioSpec s4 = library_scenario("stationary4");
    CHECK(s4.upa.n_tx() == 100);
    REQUIRE(s4.targets.size() == 4);
    CHECK(*s4.targets[0].active_at(1)->snr_db == -30.0);
    CHECK(s4.targets[0].schedule[0].nu_x == -0.4);
    CHECK(check_scenario(s4).empty());

    const ScenarioSpec d3 = library_scenario("dynamic3");
    CHECK(*d3.targets[0].active_at(135)->snr_db == -34.0);
    CHECK(*d3.targets[0].active_at(131)->snr_db == -34.0);
    CHECK(d3.targets[1].active_at(51) == nullptr);
    CHECK(d3.targets[2].active_at(50) == nullptr);

    const ScenarioSpec q7 = library_scenario("sequential7-desk");
    int active = 0;
    for (const auto& t : q7.targets) active += t.active_at(125) ? 1 : 0;
    CHECK(active == 7);
    CHECK(q7.targets[6].active_at(120) == nullptr);
    CHECK(q7.snr_offset_db > 0.0);

    CHECK_THROWS_AS(library_scenario("nope"), ConfigError);
    CHECK(parse_policy("nrl") == Policy::Nrl);
    CHECK_FALSE(parse_policy("greedy").has_value());
}

TEST_CASE("scenario validation codes") {
    CHECK(check_scenario(tiny()).empty());

    ScenarioSpec off = tiny();
    off.targets[0].schedule[0].nu_x = 0.37;
    off.targets[0].schedule[0].nu_y = 0.0;
    CHECK(has_code(check_scenario(off), "E200"));
    CHECK_THROWS_AS(validate_scenario(off), ConfigError);

    ScenarioSpec unstable = tiny();
    unstable.clutter.coefficients.rho *= 20.0;
    CHECK(has_code(check_scenario(unstable), "E300"));

    ScenarioSpec users = tiny();
    users.users = 5;
    CHECK(has_code(check_scenario(users), "E400"));

    ScenarioSpec code = tiny();
    code.code_length = 3;
    CHECK(has_code(check_scenario(code), "E401"));

    ScenarioSpec overlap = tiny();
    overlap.targets[1].schedule[0].nu_x = -0.25;
    overlap.targets[1].schedule[0].nu_y = 0.25;
    CHECK(has_code(check_scenario(overlap), "E201"));

    ScenarioSpec lag = tiny();
    lag.detector.lag = 3;  // 3^3 >= 16
    const auto d = check_scenario(lag);
    REQUIRE(has_code(d, "W100"));
    CHECK_NOTHROW(validate_scenario(lag));
}

TEST_CASE("echo synthesis") {
    std::vector<CVec> h{CVec::Ones(3), CVec::Constant(3, 2.0)};
    std::vector<CVec> c{CVec::Zero(3), CVec::Constant(3, cd(0, 1))};
    const auto y = synthesize_echo(h, c, {{1, cd(0.5, 0)}});
    CHECK(y[0] == c[0]);
    CHECK(std::abs(y[1](2) - cd(1.0, 1.0)) < 1e-15);
    CHECK_THROWS_AS(synthesize_echo(h, c, {{2, 1.0}}), ConfigError);
    CHECK(target_amplitude(10.0, 2.0) == doctest::Approx(std::sqrt(20.0)));
}

TEST_CASE("episode logs") {
    const ScenarioSpec s = tiny();
    const EpisodeLog a = run_episode(s, 0);
    CHECK(a.detection.size() == 6);
    CHECK(a.interference.size() == 6);
    CHECK(a.detection[0][1] == -1);  // target 2 appears at pulse 2
    CHECK(a.detection[1][1] >= 0);
    for (double p : a.power) CHECK(p == doctest::Approx(s.code_length * s.power).epsilon(1e-5));
    for (std::size_t p = 0; p < 6; ++p) {
        int hits = 0;
        for (auto d : a.detection[p]) hits += d > 0 ? 1 : 0;
        CHECK(a.count[p] >= hits);
    }

    SUBCASE("deterministic for a seed, different across runs") {
        CHECK(same_log(a, run_episode(s, 0)));
        CHECK_FALSE(same_log(a, run_episode(s, 1)));
    }

    SUBCASE("single pulse") {
        const EpisodeLog one = run_episode(tiny(1), 0);
        CHECK(one.detection.size() == 1);
        CHECK(one.action.size() == 1);
    }

    SUBCASE("variants share streams") {
        const auto group = run_episode_group(s, {{Policy::Rl, 0.2}, {Policy::Orthogonal, 0.2}, {Policy::Nrl, 0.8}}, 0);
        CHECK(same_log(group[0], a));
        CHECK(same_log(group[1], run_episode_group(s, {{Policy::Orthogonal, 0.2}}, 0)[0]));
        CHECK(same_log(group[2], run_episode_group(s, {{Policy::Nrl, 0.8}}, 0)[0]));
        for (int j : group[1].action) CHECK(j == 0);
    }
}

TEST_CASE("Monte Carlo aggregation") {
    ScenarioSpec s = tiny();
    s.mc_runs = 1;
    const MonteCarloResult one = run_monte_carlo(s);
    const EpisodeLog single = run_episode(s, 0);
    const Aggregate ag = aggregate(one, 0, 10.0);
    CHECK(ag.runs == 1);
    CHECK(std::isnan(ag.p_detect(0, 1)));
    for (int p = 0; p < s.pulses; ++p) {
        CHECK(ag.p_detect(p, 0) == single.detection[static_cast<std::size_t>(p)][0]);
        CHECK(ag.sum_rate[static_cast<std::size_t>(p)] == rate_at(single, p, 10.0).sum_rate);
        CHECK(ag.mui[static_cast<std::size_t>(p)] == single.mui[static_cast<std::size_t>(p)]);
    }

    s.mc_runs = 4;
    const MonteCarloResult serial = run_monte_carlo(s, {{Policy::Rl, 0.2}, {Policy::Orthogonal, 0.6}}, {1});
    const MonteCarloResult threaded = run_monte_carlo(s, {{Policy::Rl, 0.2}, {Policy::Orthogonal, 0.6}}, {3});
    for (std::size_t v = 0; v < 2; ++v) {
        for (std::size_t r = 0; r < 4; ++r) CHECK(same_log(serial.logs[v][r], threaded.logs[v][r]));
    }
    // Hand mean of run-level detections.
    const Aggregate a4 = aggregate(serial, 0, 0.0);
    double hand = 0.0;
    for (const auto& lg : serial.logs[0]) hand += lg.detection[3][1];
    CHECK(a4.p_detect(3, 1) == doctest::Approx(hand / 4.0));

    const MeanSe w = window_rate(serial, 1, 0.0, 2, 5, &RateSample::sum_rate);
    std::vector<double> per;
    for (const auto& lg : serial.logs[1]) {
        double acc = 0.0;
        for (int p = 1; p <= 4; ++p) acc += rate_at(lg, p, 0.0).sum_rate;
        per.push_back(acc / 4.0);
    }
    double mean = 0.0;
    for (double v : per) mean += v / 4.0;
    double ss = 0.0;
    for (double v : per) ss += (v - mean) * (v - mean);
    CHECK(w.mean == doctest::Approx(mean).epsilon(1e-13));
    CHECK(w.se == doctest::Approx(std::sqrt(ss / 3.0 / 4.0)).epsilon(1e-10));
    CHECK_THROWS_AS(window_rate(serial, 1, 0.0, 0, 5, &RateSample::sum_rate), ConfigError);
}

TEST_CASE("scenario JSON round trip") {
    for (const ScenarioSpec& s : {tiny(), library_scenario("dynamic3"), library_scenario("sequential7-desk")}) {
        const nlohmann::json doc = scenario_to_json(s);
        CHECK(doc.at("schema_version") == kScenarioSchemaVersion);
        const ScenarioSpec back = scenario_from_json(doc);
        CHECK(scenario_to_json(back) == doc);
        CHECK(back.targets.size() == s.targets.size());
        CHECK(back.snr_offset_db == s.snr_offset_db);
    }

    nlohmann::json doc = scenario_to_json(tiny());
    doc["detector"]["p_fa"] = "high";
    doc["extra"] = 1;
    std::vector<Diagnostic> diags;
    scenario_from_json(doc, diags);
    REQUIRE(diags.size() == 2);
    CHECK(diags[0].code == "E100");
    bool saw_path = false;
    for (const auto& d : diags) saw_path = saw_path || d.path == "detector.p_fa";
    CHECK(saw_path);
    CHECK_THROWS_AS(scenario_from_json(doc), ConfigError);

    nlohmann::json no_version = scenario_to_json(tiny());
    no_version.erase("schema_version");
    CHECK_THROWS_AS(scenario_from_json(no_version), ConfigError);

    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12.0}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("shipped scenario files match the library") {
    for (const std::string& name : scenario_names()) {
        CAPTURE(name);
        const auto doc = read_json_file(std::string(COGISAC_SCENARIO_DIR) + "/" + name + ".json");
        CHECK(scenario_to_json(scenario_from_json(doc)) == scenario_to_json(library_scenario(name)));
    }
}

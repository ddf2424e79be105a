// SPDX-License-Identifier: Apache-2.0
#include "cogisac/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cogisac {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json scenario_to_json(const ScenarioSpec& s) {
    json rho = json::array();
    for (Eigen::Index i = 0; i < s.clutter.coefficients.rho.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < s.clutter.coefficients.rho.cols(); ++j) row.push_back(s.clutter.coefficients.rho(i, j));
        rho.push_back(row);
    }
    json targets = json::array();
    for (const auto& t : s.targets) {
        json sched = json::array();
        for (const auto& e : t.schedule) {
            sched.push_back({{"pulses", {e.first, e.last}},
                             {"position", {e.nu_x, e.nu_y}},
                             {"snr_db", e.snr_db ? json(*e.snr_db) : json(nullptr)}});
        }
        targets.push_back({{"id", t.id}, {"schedule", sched}});
    }
    return {
        {"schema_version", kScenarioSchemaVersion},
        {"name", s.name},
        {"array", {{"tx", {s.upa.tx_x, s.upa.tx_y}}, {"rx", {s.upa.rx_x, s.upa.rx_y}}}},
        {"grid", {s.grid_lx, s.grid_ly}},
        {"pulses", s.pulses},
        {"mc_runs", s.mc_runs},
        {"seed", s.seed},
        {"policy", to_string(s.policy)},
        {"power", s.power},
        {"code_length", s.code_length},
        {"comms", {{"users", s.users}, {"snr_db", s.comm_snr_db}}},
        {"rho", s.rho},
        {"detector",
         {{"p_fa", s.detector.p_fa},
          {"lag", s.detector.lag < 0 ? json("auto") : json(s.detector.lag)},
          {"loading", s.detector.loading}}},
        {"clutter",
         {{"rho", rho},
          {"mu", s.clutter.noise.gaussian() ? json("inf") : json(s.clutter.noise.mu)},
          {"sigma_w2", s.clutter.noise.sigma_w2},
          {"burn_in", s.clutter.burn_in}}},
        {"agent",
         {{"max_targets", s.agent.max_targets},
          {"learning_rate", s.agent.learning_rate},
          {"discount", s.agent.discount},
          {"epsilon", s.agent.epsilon}}},
        {"solver",
         {{"tolerance", s.solver.tolerance},
          {"max_iterations", s.solver.max_iterations},
          {"max_expansions", s.solver.max_expansions}}},
        {"snr_offset_db", s.snr_offset_db},
        {"targets", targets},
    };
}

namespace {

class Reader {
public:
    explicit Reader(std::vector<Diagnostic>& d) : diags_(d) {}

    void error(const std::string& path, const std::string& msg) { diags_.push_back({"E100", path, msg, true}); }

    bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
        if (!j.is_object()) {
            error(path.empty() ? "<root>" : path, "expected an object");
            return false;
        }
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items()) {
            if (!ok.contains(k)) error(join(path, k), "unknown field");
        }
        return true;
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

    void number(const json& j, const std::string& key, const std::string& path, double& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number()) {
            error(join(path, key), "expected a number");
            return;
        }
        out = v.get<double>();
    }

    void integer(const json& j, const std::string& key, const std::string& path, int& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number_integer()) {
            error(join(path, key), "expected an integer");
            return;
        }
        const auto x = v.get<long long>();
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
            error(join(path, key), "integer out of range");
            return;
        }
        out = static_cast<int>(x);
    }

    bool int_pair(const json& v, const std::string& path, int& a, int& b) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
            error(path, "expected [integer, integer]");
            return false;
        }
        a = v[0].get<int>();
        b = v[1].get<int>();
        return true;
    }

    bool num_pair(const json& v, const std::string& path, double& a, double& b) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            error(path, "expected [number, number]");
            return false;
        }
        a = v[0].get<double>();
        b = v[1].get<double>();
        return true;
    }

private:
    std::vector<Diagnostic>& diags_;
};

}  // namespace

ScenarioSpec scenario_from_json(const json& doc, std::vector<Diagnostic>& diagnostics) {
    Reader rd(diagnostics);
    ScenarioSpec s;
    if (!rd.object(doc, "",
                   {"schema_version", "name", "array", "grid", "pulses", "mc_runs", "seed", "policy", "power",
                    "code_length", "comms", "rho", "detector", "clutter", "agent", "solver", "snr_offset_db",
                    "targets"})) {
        return s;
    }
    if (!doc.contains("schema_version")) {
        rd.error("schema_version", "missing schema_version");
    } else if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kScenarioSchemaVersion) {
        rd.error("schema_version", "unsupported schema version (expected " + std::to_string(kScenarioSchemaVersion) + ")");
    }
    if (doc.contains("name")) {
        if (doc["name"].is_string()) s.name = doc["name"].get<std::string>();
        else rd.error("name", "expected a string");
    }
    if (doc.contains("array") && rd.object(doc["array"], "array", {"tx", "rx"})) {
        const json& a = doc["array"];
        if (a.contains("tx")) rd.int_pair(a["tx"], "array.tx", s.upa.tx_x, s.upa.tx_y);
        if (a.contains("rx")) rd.int_pair(a["rx"], "array.rx", s.upa.rx_x, s.upa.rx_y);
    }
    if (doc.contains("grid")) rd.int_pair(doc["grid"], "grid", s.grid_lx, s.grid_ly);
    rd.integer(doc, "pulses", "", s.pulses);
    rd.integer(doc, "mc_runs", "", s.mc_runs);
    if (doc.contains("seed")) {
        if (doc["seed"].is_number_unsigned()) s.seed = doc["seed"].get<std::uint64_t>();
        else if (doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0) s.seed = doc["seed"].get<std::uint64_t>();
        else rd.error("seed", "expected a non-negative integer");
    }
    if (doc.contains("policy")) {
        const auto p = doc["policy"].is_string() ? parse_policy(doc["policy"].get<std::string>()) : std::nullopt;
        if (p) s.policy = *p;
        else rd.error("policy", "expected one of \"rl\", \"nrl\", \"orthogonal\"");
    }
    rd.number(doc, "power", "", s.power);
    rd.integer(doc, "code_length", "", s.code_length);
    if (doc.contains("comms") && rd.object(doc["comms"], "comms", {"users", "snr_db"})) {
        rd.integer(doc["comms"], "users", "comms", s.users);
        rd.number(doc["comms"], "snr_db", "comms", s.comm_snr_db);
    }
    rd.number(doc, "rho", "", s.rho);
    if (doc.contains("detector") && rd.object(doc["detector"], "detector", {"p_fa", "lag", "loading"})) {
        const json& d = doc["detector"];
        rd.number(d, "p_fa", "detector", s.detector.p_fa);
        if (d.contains("lag")) {
            if (d["lag"].is_string() && d["lag"].get<std::string>() == "auto") s.detector.lag = -1;
            else if (d["lag"].is_number_integer() && d["lag"].get<long long>() >= 0) rd.integer(d, "lag", "detector", s.detector.lag);
            else rd.error("detector.lag", "expected \"auto\" or a non-negative integer");
        }
        rd.number(d, "loading", "detector", s.detector.loading);
    }
    if (doc.contains("clutter") && rd.object(doc["clutter"], "clutter", {"rho", "mu", "sigma_w2", "burn_in"})) {
        const json& c = doc["clutter"];
        if (c.contains("rho")) {
            const json& r = c["rho"];
            bool ok = r.is_array() && !r.empty() && r[0].is_array() && !r[0].empty();
            const std::size_t cols = ok ? r[0].size() : 0;
            for (std::size_t i = 0; ok && i < r.size(); ++i) {
                ok = r[i].is_array() && r[i].size() == cols;
                for (std::size_t j = 0; ok && j < cols; ++j) ok = r[i][j].is_number();
            }
            if (!ok) {
                rd.error("clutter.rho", "expected a non-empty rectangular matrix of numbers");
            } else {
                RMat m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(cols));
                for (std::size_t i = 0; i < r.size(); ++i) {
                    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[i][j].get<double>();
                }
                s.clutter.coefficients.rho = m;
            }
        }
        if (c.contains("mu")) {
            if (c["mu"].is_string() && c["mu"].get<std::string>() == "inf") s.clutter.noise.mu = std::numeric_limits<double>::infinity();
            else rd.number(c, "mu", "clutter", s.clutter.noise.mu);
        }
        rd.number(c, "sigma_w2", "clutter", s.clutter.noise.sigma_w2);
        rd.integer(c, "burn_in", "clutter", s.clutter.burn_in);
    }
    if (doc.contains("agent") &&
        rd.object(doc["agent"], "agent", {"max_targets", "learning_rate", "discount", "epsilon"})) {
        const json& a = doc["agent"];
        rd.integer(a, "max_targets", "agent", s.agent.max_targets);
        rd.number(a, "learning_rate", "agent", s.agent.learning_rate);
        rd.number(a, "discount", "agent", s.agent.discount);
        rd.number(a, "epsilon", "agent", s.agent.epsilon);
    }
    if (doc.contains("solver") && rd.object(doc["solver"], "solver", {"tolerance", "max_iterations", "max_expansions"})) {
        const json& o = doc["solver"];
        rd.number(o, "tolerance", "solver", s.solver.tolerance);
        rd.integer(o, "max_iterations", "solver", s.solver.max_iterations);
        rd.integer(o, "max_expansions", "solver", s.solver.max_expansions);
    }
    rd.number(doc, "snr_offset_db", "", s.snr_offset_db);
    if (doc.contains("targets")) {
        const json& ts = doc["targets"];
        if (!ts.is_array()) {
            rd.error("targets", "expected an array");
        } else {
            for (std::size_t t = 0; t < ts.size(); ++t) {
                const std::string base = "targets[" + std::to_string(t) + "]";
                TargetSpec tg;
                tg.id = static_cast<int>(t) + 1;
                if (!rd.object(ts[t], base, {"id", "schedule"})) continue;
                rd.integer(ts[t], "id", base, tg.id);
                if (!ts[t].contains("schedule") || !ts[t]["schedule"].is_array()) {
                    rd.error(base + ".schedule", "expected an array");
                } else {
                    const json& sch = ts[t]["schedule"];
                    for (std::size_t k = 0; k < sch.size(); ++k) {
                        const std::string path = base + ".schedule[" + std::to_string(k) + "]";
                        if (!rd.object(sch[k], path, {"pulses", "position", "snr_db"})) continue;
                        ScheduleEntry e;
                        if (sch[k].contains("pulses")) rd.int_pair(sch[k]["pulses"], path + ".pulses", e.first, e.last);
                        else rd.error(path + ".pulses", "missing pulse interval");
                        if (sch[k].contains("position")) rd.num_pair(sch[k]["position"], path + ".position", e.nu_x, e.nu_y);
                        else rd.error(path + ".position", "missing position");
                        if (sch[k].contains("snr_db") && !sch[k]["snr_db"].is_null()) {
                            if (sch[k]["snr_db"].is_number()) e.snr_db = sch[k]["snr_db"].get<double>();
                            else rd.error(path + ".snr_db", "expected a number or null");
                        }
                        tg.schedule.push_back(e);
                    }
                }
                s.targets.push_back(std::move(tg));
            }
        }
    }
    return s;
}

ScenarioSpec scenario_from_json(const json& doc) {
    std::vector<Diagnostic> d;
    ScenarioSpec s = scenario_from_json(doc, d);
    for (const auto& x : d) {
        if (x.error) throw ConfigError("cli", x.code + " " + x.path + ": " + x.message);
    }
    return s;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cli", "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("cli", "E100 " + path.string() + ": malformed JSON (" + e.what() + ")");
    }
}

}  // namespace cogisac

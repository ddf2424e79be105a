// SPDX-License-Identifier: Apache-2.0
#include "cogisac/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <variant>

#include "cogisac/scenario_io.hpp"

namespace cogisac {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Configuration problems detected by the front end map to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("'" + text + "' is not a number");
    }
    if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument("'" + text + "' is not a finite number");
    return v;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw std::invalid_argument("range must be start:step:stop");
        const double a = parse_double(parts[0]);
        const double step = parse_double(parts[1]);
        const double b = parse_double(parts[2]);
        if (step <= 0.0 || b < a) throw std::invalid_argument("range needs step > 0 and stop >= start");
        const double count = std::floor((b - a) / step + 1e-9);
        if (count > 1e6) throw std::invalid_argument("range has too many points");
        for (int i = 0; i <= static_cast<int>(count); ++i) out.push_back(a + i * step);
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_double(p));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

json manifest_to_json(const RunManifest& m) {
    json variants = json::array();
    for (const Variant& v : m.variants) variants.push_back({{"policy", to_string(v.policy)}, {"rho", v.rho}});
    return {{"schema_version", kScenarioSchemaVersion},
            {"command", m.command},
            {"source", m.source},
            {"scenario", scenario_to_json(m.spec)},
            {"variants", variants},
            {"snr_db", m.snr_db},
            {"format", m.format}};
}

RunManifest manifest_from_json(const json& doc) {
    auto bad = [](const std::string& path, const std::string& msg) {
        return UsageError("E100 manifest." + path + ": " + msg);
    };
    if (!doc.is_object()) throw bad("<root>", "expected an object");
    for (const auto& [k, v] : doc.items()) {
        static const std::set<std::string> known{"schema_version", "command", "source", "scenario",
                                                 "variants", "snr_db", "format"};
        if (!known.contains(k)) throw bad(k, "unknown field");
    }
    if (!doc.contains("schema_version") || doc["schema_version"] != kScenarioSchemaVersion) {
        throw bad("schema_version", "unsupported schema version");
    }
    RunManifest m;
    if (!doc.contains("command") || !doc["command"].is_string()) throw bad("command", "expected a string");
    m.command = doc["command"].get<std::string>();
    if (m.command != "run" && m.command != "compare" && m.command != "sweep") throw bad("command", "unknown command");
    if (doc.contains("source")) {
        if (!doc["source"].is_string()) throw bad("source", "expected a string");
        m.source = doc["source"].get<std::string>();
    }
    if (!doc.contains("scenario")) throw bad("scenario", "missing scenario");
    std::vector<Diagnostic> diags;
    m.spec = scenario_from_json(doc["scenario"], diags);
    for (const auto& d : diags) {
        if (d.error) throw UsageError(d.code + " manifest.scenario." + d.path + ": " + d.message);
    }
    if (!doc.contains("variants") || !doc["variants"].is_array() || doc["variants"].empty()) {
        throw bad("variants", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < doc["variants"].size(); ++i) {
        const json& v = doc["variants"][i];
        const std::string path = "variants[" + std::to_string(i) + "]";
        if (!v.is_object() || !v.contains("policy") || !v["policy"].is_string() || !v.contains("rho") ||
            !v["rho"].is_number()) {
            throw bad(path, "expected {\"policy\": string, \"rho\": number}");
        }
        const auto p = parse_policy(v["policy"].get<std::string>());
        if (!p) throw bad(path + ".policy", "unknown policy");
        m.variants.push_back({*p, v["rho"].get<double>()});
    }
    if (!doc.contains("snr_db") || !doc["snr_db"].is_array() || doc["snr_db"].empty()) {
        throw bad("snr_db", "expected a non-empty array");
    }
    for (const json& s : doc["snr_db"]) {
        if (!s.is_number()) throw bad("snr_db", "expected numbers");
        m.snr_db.push_back(s.get<double>());
    }
    m.format = doc.value("format", std::string("csv"));
    if (m.format != "csv" && m.format != "json") throw bad("format", "expected \"csv\" or \"json\"");
    return m;
}

namespace {

// Long-format table; cells are numbers or strings.
struct Table {
    using Cell = std::variant<double, std::string>;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Table::Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::get<std::string>(c);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cli", "cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw Error("cli", "write failed for '" + path.string() + "'");
}

void write_table(const Table& t, const fs::path& dir, const std::string& stem, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        json arr = json::array();
        for (const auto& row : t.rows) {
            json rec = json::object();
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (const auto* d = std::get_if<double>(&row[c])) rec[t.columns[c]] = *d;
                else rec[t.columns[c]] = std::get<std::string>(row[c]);
            }
            arr.push_back(rec);
        }
        os << arr.dump(1) << '\n';
        write_file(dir / (stem + ".json"), os.str());
        return;
    }
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
        os << '\n';
    }
    write_file(dir / (stem + ".csv"), os.str());
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

void execute_manifest(const RunManifest& m, const fs::path& dir, int threads) {
    validate_scenario(m.spec);
    for (const Variant& v : m.variants) {
        if (!(v.rho >= 0.0 && v.rho <= 1.0)) throw ConfigError("cli", "rho must lie in [0, 1]");
    }
    const MonteCarloResult result = run_monte_carlo(m.spec, m.variants, RunOptions{threads});

    Table pd{{"pulse", "target_id", "policy", "rho", "p_detect"}, {}};
    Table over{{"pulse", "policy", "rho", "snr_db", "sum_rate", "normalized_sum_rate", "mui_energy",
                "per_user_sum_rate"},
               {}};
    Table vs{{"policy", "rho", "snr_db", "sum_rate", "per_user_sum_rate", "normalized_sum_rate"}, {}};
    json summary_variants = json::array();

    const int P = m.spec.pulses;
    const int window_first = std::max(1, P - 9);
    for (std::size_t vi = 0; vi < m.variants.size(); ++vi) {
        const Variant& v = m.variants[vi];
        const std::string pol = to_string(v.policy);
        json steady = json::object();
        for (std::size_t si = 0; si < m.snr_db.size(); ++si) {
            const Aggregate a = aggregate(result, vi, m.snr_db[si]);
            if (si == 0) {
                // Summary values are computed from the same doubles that are written out.
                for (std::size_t t = 0; t < m.spec.targets.size(); ++t) {
                    double acc = 0.0;
                    int n = 0;
                    for (int p = 0; p < P; ++p) {
                        const double val = a.p_detect(p, static_cast<Eigen::Index>(t));
                        if (std::isnan(val)) continue;
                        pd.rows.push_back({double(p + 1), double(m.spec.targets[t].id), pol, v.rho, val});
                        if (p + 1 >= window_first) {
                            acc += val;
                            ++n;
                        }
                    }
                    steady[std::to_string(m.spec.targets[t].id)] = n > 0 ? json(acc / n) : json(nullptr);
                }
            }
            for (int p = 0; p < P; ++p) {
                const auto pi = static_cast<std::size_t>(p);
                over.rows.push_back({double(p + 1), pol, v.rho, m.snr_db[si], a.sum_rate[pi], a.normalized_sum_rate[pi],
                                     a.mui[pi], a.per_user_sum_rate[pi]});
            }
            vs.rows.push_back({pol, v.rho, m.snr_db[si], mean_of(a.sum_rate), mean_of(a.per_user_sum_rate),
                               mean_of(a.normalized_sum_rate)});
        }
        summary_variants.push_back({{"policy", pol},
                                    {"rho", v.rho},
                                    {"runs", m.spec.mc_runs},
                                    {"steady_state_window", {window_first, P}},
                                    {"steady_state_p_detect", steady}});
    }

    fs::create_directories(dir);
    write_table(pd, dir, "pd_over_pulses", m.format);
    write_table(over, dir, "sumrate_over_pulses", m.format);
    write_table(vs, dir, "sumrate_vs_snr", m.format);

    json rates = json::array();
    for (const auto& row : vs.rows) {
        rates.push_back({{"policy", std::get<std::string>(row[0])},
                         {"rho", std::get<double>(row[1])},
                         {"snr_db", std::get<double>(row[2])},
                         {"mean_sum_rate", std::get<double>(row[3])},
                         {"mean_per_user_sum_rate", std::get<double>(row[4])},
                         {"mean_normalized_sum_rate", std::get<double>(row[5])}});
    }
    const json summary{{"scenario", m.spec.name}, {"variants", summary_variants}, {"rates", rates}};
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    write_file(dir / "manifest.json", manifest_to_json(m).dump(2) + "\n");
}

namespace {

struct Options {
    std::string scenario;
    std::string policy;
    std::string policies = "rl,nrl,orthogonal";
    std::string rho;
    std::string snr;
    std::optional<int> users;
    std::optional<int> mc_runs;
    std::optional<std::uint64_t> seed;
    std::optional<int> pulses;
    std::string scale;
    std::string format = "csv";
    std::string out;
    std::string manifest;
    int threads = 0;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--rho", o.rho, "Trade-off weight(s): value, comma list or start:step:stop");
    cmd->add_option("--K", o.users, "Number of communication users");
    cmd->add_option("--snr-db", o.snr, "Communication SNR(s) in dB: value, comma list or start:step:stop");
    cmd->add_option("--mc-runs", o.mc_runs, "Monte Carlo runs");
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("--pulses", o.pulses, "Truncate the episode to this many pulses");
    cmd->add_option("--scale", o.scale, "Library scale: desk or full")->check(CLI::IsMember({"desk", "full"}));
    cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "Output directory");
}

bool is_library_name(const std::string& name) {
    for (const auto& n : scenario_names()) {
        if (n == name) return true;
    }
    return false;
}

ScenarioSpec resolve_scenario(const std::string& source, const std::string& scale) {
    if (is_library_name(source)) {
        std::string name = source;
        const bool desk = name.ends_with("-desk");
        if (scale == "full" && desk) name = name.substr(0, name.size() - 5);
        if (scale == "desk" && !desk) name += "-desk";
        return library_scenario(name);
    }
    if (!scale.empty()) throw UsageError("scale: --scale only applies to library scenarios");
    if (!fs::is_regular_file(source)) throw UsageError("unknown scenario '" + source + "'");
    json doc;
    try {
        doc = read_json_file(source);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    std::vector<Diagnostic> diags;
    ScenarioSpec spec = scenario_from_json(doc, diags);
    for (const auto& d : diags) {
        if (d.error) throw UsageError(d.code + " " + d.path + ": " + d.message);
    }
    if (spec.name.empty()) spec.name = fs::path(source).stem().string();
    return spec;
}

void truncate_pulses(ScenarioSpec& spec, int pulses) {
    if (pulses < 1) throw UsageError("pulses: must be >= 1");
    spec.pulses = pulses;
    for (auto& t : spec.targets) {
        std::vector<ScheduleEntry> kept;
        for (auto e : t.schedule) {
            if (e.first > pulses) continue;
            e.last = std::min(e.last, pulses);
            kept.push_back(e);
        }
        t.schedule = std::move(kept);
    }
    std::erase_if(spec.targets, [](const TargetSpec& t) { return t.schedule.empty(); });
}

std::vector<double> option_list(const std::string& text, const std::string& field) {
    try {
        return parse_number_list(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(field + ": " + e.what());
    }
}

RunManifest build_manifest(const std::string& command, const Options& o) {
    RunManifest m;
    m.command = command;
    m.source = o.scenario;
    m.format = o.format;
    m.spec = resolve_scenario(o.scenario, o.scale);

    if (o.users) m.spec.users = *o.users;
    if (o.mc_runs) m.spec.mc_runs = *o.mc_runs;
    if (o.seed) m.spec.seed = *o.seed;
    if (o.pulses) truncate_pulses(m.spec, *o.pulses);
    if (!o.policy.empty()) {
        const auto p = parse_policy(o.policy);
        if (!p) throw UsageError("policy: unknown policy '" + o.policy + "' (expected rl, nrl or orthogonal)");
        m.spec.policy = *p;
    }

    std::vector<double> rhos;
    if (!o.rho.empty()) rhos = option_list(o.rho, "rho");
    else if (command == "sweep") rhos = {0.2, 0.4, 0.6, 0.8};
    else rhos = {m.spec.rho};
    for (double r : rhos) {
        if (!(r >= 0.0 && r <= 1.0)) throw UsageError("rho: " + format_double(r) + " is outside [0, 1]");
    }
    if (rhos.size() == 1) m.spec.rho = rhos.front();

    if (!o.snr.empty()) m.snr_db = option_list(o.snr, "comms.snr_db");
    else if (command == "sweep") m.snr_db = parse_number_list("0:2:18");
    else m.snr_db = {m.spec.comm_snr_db};
    if (m.snr_db.size() == 1) m.spec.comm_snr_db = m.snr_db.front();

    std::vector<Policy> policies{m.spec.policy};
    if (command == "compare") {
        policies.clear();
        std::stringstream ss(o.policies);
        for (std::string p; std::getline(ss, p, ',');) {
            const auto parsed = parse_policy(trim(p));
            if (!parsed) throw UsageError("policies: unknown policy '" + trim(p) + "'");
            policies.push_back(*parsed);
        }
        if (policies.empty()) throw UsageError("policies: empty list");
    }
    for (Policy p : policies) {
        for (double r : rhos) m.variants.push_back({p, r});
    }

    for (const auto& d : check_scenario(m.spec)) {
        if (d.error) throw UsageError(d.code + " " + d.path + ": " + d.message);
    }
    return m;
}

fs::path output_dir(const Options& o) {
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return "out";
}

int print_validation(const std::string& source, std::ostream& out, std::ostream& err) {
    ScenarioSpec spec;
    std::vector<Diagnostic> diags;
    if (is_library_name(source)) {
        spec = library_scenario(source);
    } else if (fs::is_regular_file(source)) {
        json doc;
        try {
            doc = read_json_file(source);
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return 2;
        }
        spec = scenario_from_json(doc, diags);
    } else {
        err << "error: unknown scenario '" << source << "'\n";
        return 2;
    }
    bool schema_ok = true;
    for (const auto& d : diags) schema_ok = schema_ok && !d.error;
    if (schema_ok) {
        const auto more = check_scenario(spec);
        diags.insert(diags.end(), more.begin(), more.end());
    }
    bool clean = true;
    for (const auto& d : diags) {
        (d.error ? err : out) << (d.error ? "error " : "warning ") << d.code << ' ' << d.path << ": " << d.message
                              << '\n';
        clean = clean && !d.error;
    }
    if (clean) out << source << ": ok\n";
    return clean ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cognitive ISAC simulation engine"};
    app.require_subcommand(1);
    Options o;

    CLI::App* run = app.add_subcommand("run", "Run a scenario (\"run sweep\" is an alias for sweep)");
    run->add_option("scenario", o.scenario, "Scenario name or JSON file");
    run->add_option("--policy", o.policy, "rl, nrl or orthogonal");
    run->add_option("--manifest", o.manifest, "Replay a manifest.json");
    add_common(run, o);

    CLI::App* compare = app.add_subcommand("compare", "Run several policies on the same seeds");
    compare->add_option("scenario", o.scenario, "Scenario name or JSON file")->required();
    compare->add_option("--policies", o.policies, "Comma-separated policies");
    add_common(compare, o);

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep rho and communication SNR");
    sweep->add_option("scenario", o.scenario, "Scenario name or JSON file");
    sweep->add_option("--policy", o.policy, "rl, nrl or orthogonal");
    add_common(sweep, o);

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario and report diagnostics");
    validate->add_option("scenario", o.scenario, "Scenario name or JSON file")->required();

    CLI::App* list = app.add_subcommand("list-scenarios", "Print the shipped scenario names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& n : scenario_names()) out << n << '\n';
            return 0;
        }
        if (validate->parsed()) return print_validation(o.scenario, out, err);

        RunManifest m;
        if (run->parsed() && !o.manifest.empty()) {
            if (!o.scenario.empty()) throw UsageError("manifest: cannot combine --manifest with a scenario");
            json doc;
            try {
                doc = read_json_file(o.manifest);
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            }
            m = manifest_from_json(doc);
        } else {
            std::string command = compare->parsed() ? "compare" : (sweep->parsed() ? "sweep" : "run");
            if (command == "run" && o.scenario == "sweep") {
                command = "sweep";
                o.scenario.clear();
            }
            if (o.scenario.empty()) {
                if (command != "sweep") throw UsageError("scenario: a scenario name or file is required");
                o.scenario = "stationary4-desk";
            }
            m = build_manifest(command, o);
        }
        const fs::path dir = output_dir(o);
        execute_manifest(m, dir, o.threads);
        out << "wrote " << m.command << " outputs for '" << m.spec.name << "' to " << dir.string() << '\n';
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        err << "error: [" << e.module() << "] " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "[" << e.module() << "] " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "[cli] " << e.what() << '\n';
        return 1;
    }
}

}  // namespace cogisac

#include "seqmc/experiments.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "seqmc/random.hpp"
#include "seqmc/sampling.hpp"
#include "seqmc/serialize.hpp"
#include "seqmc/weakmeas.hpp"

namespace seqmc::cli {

using nlohmann::json;

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::two_state_sweep: return "two_state_sweep";
        case Kind::gu_sweep: return "gu_sweep";
        case Kind::sequential_run: return "sequential_run";
        case Kind::bounds: return "bounds";
        case Kind::verify: return "verify";
    }
    return "unknown";
}

std::optional<Kind> kind_from_name(const std::string& name) {
    for (Kind k : {Kind::two_state_sweep, Kind::gu_sweep, Kind::sequential_run, Kind::bounds,
                   Kind::verify})
        if (kind_name(k) == name) return k;
    return std::nullopt;
}

std::vector<double> GridSpec::values() const {
    std::vector<double> out;
    if (count == 1) {
        out.push_back(min);
        return out;
    }
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(min + (max - min) * i / (count - 1));
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path);
}

void emit_report(const Table& table, Format format, const std::string& path) {
    std::string text;
    if (format == Format::csv) {
        for (size_t i = 0; i < table.columns.size(); ++i) {
            if (i) text += ',';
            text += table.columns[i];
        }
        text += '\n';
        for (const auto& row : table.rows) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) text += ',';
                text += format_double(row[i]);
            }
            text += '\n';
        }
    } else {
        json rows = json::array();
        for (const auto& row : table.rows) {
            json obj;
            for (size_t i = 0; i < row.size() && i < table.columns.size(); ++i)
                obj[table.columns[i]] = row[i];
            rows.push_back(std::move(obj));
        }
        text = rows.dump(2);
        text += '\n';
    }
    write_text_file(path, text);
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

struct Validator {
    const json& root;
    std::vector<SchemaViolationEntry>& violations;

    void fail(const std::string& pointer, const std::string& message) {
        violations.push_back({pointer, message});
    }

    bool has(const std::string& key) const { return root.contains(key); }

    template <typename T>
    T number(const std::string& key, T fallback, double lo, double hi, bool lo_open = false,
             bool hi_open = false) {
        if (!root.contains(key)) return fallback;
        const json& j = root.at(key);
        if (!j.is_number()) {
            fail("/" + key, "must be a number");
            return fallback;
        }
        double v = j.get<double>();
        bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
        if (!ok) {
            fail("/" + key, "out of range");
            return fallback;
        }
        return static_cast<T>(v);
    }

    std::string text(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed = {}) {
        if (!root.contains(key)) return fallback;
        const json& j = root.at(key);
        if (!j.is_string()) {
            fail("/" + key, "must be a string");
            return fallback;
        }
        std::string v = j.get<std::string>();
        if (!allowed.empty()) {
            bool ok = false;
            for (const std::string& a : allowed) ok = ok || a == v;
            if (!ok) {
                fail("/" + key, "must be one of the documented values");
                return fallback;
            }
        }
        return v;
    }
};

GridSpec parse_grid(const json& root, const std::string& pointer, GridSpec fallback,
                    double lo, double hi, std::vector<SchemaViolationEntry>& violations) {
    GridSpec spec = fallback;
    if (!root.is_object()) {
        violations.push_back({pointer, "must be an object {min,max,count}"});
        return spec;
    }
    auto num = [&](const char* key, double def) {
        if (!root.contains(key)) return def;
        if (!root.at(key).is_number()) {
            violations.push_back({pointer + "/" + key, "must be a number"});
            return def;
        }
        return root.at(key).get<double>();
    };
    spec.min = num("min", fallback.min);
    spec.max = num("max", fallback.max);
    spec.count = static_cast<int>(num("count", fallback.count));
    if (spec.count < 1) violations.push_back({pointer + "/count", "must be >= 1"});
    if (spec.min > spec.max) violations.push_back({pointer + "/min", "must be <= max"});
    if (spec.min < lo || spec.max > hi)
        violations.push_back({pointer, "grid range escapes the valid parameter interval"});
    return spec;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "kind",       "seed",        "trials",      "delta",       "format",
        "out_prefix", "grid",        "g_fraction",  "brute_grid",  "n",
        "eta0",       "parties",     "c_th",        "input",       "p",
        "theta",      "policy",      "min_confidence", "bounds_count", "bounds_grid",
        "dpi_draws"};
    return keys;
}

}  // namespace

ParseResult parse_config_text(const std::string& text, std::optional<Kind> default_kind) {
    ParseResult result;
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) {
        result.violations.push_back({"", "input is not valid JSON"});
        return result;
    }
    if (!root.is_object()) {
        result.violations.push_back({"", "config must be a JSON object"});
        return result;
    }

    Validator v{root, result.violations};
    ExperimentConfig cfg;

    for (auto it = root.begin(); it != root.end(); ++it) {
        bool known = false;
        for (const std::string& k : known_keys()) known = known || k == it.key();
        if (!known) v.fail("/" + it.key(), "unknown field");
    }

    std::string kind_text = v.text("kind", default_kind ? kind_name(*default_kind) : "",
                                   {"two_state_sweep", "gu_sweep", "sequential_run", "bounds",
                                    "verify"});
    if (kind_text.empty()) {
        v.fail("/kind", "missing; pass it in the config or pick a subcommand");
        return result;
    }
    std::optional<Kind> kind = kind_from_name(kind_text);
    if (!kind) return result;
    if (default_kind && *kind != *default_kind)
        v.fail("/kind", "config kind does not match the requested command");
    cfg.kind = *kind;

    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned())
            v.fail("/seed", "must be a nonnegative integer");
        else {
            cfg.seed = root.at("seed").get<uint64_t>();
            cfg.has_seed = true;
        }
    }
    if (root.contains("trials")) {
        if (!root.at("trials").is_number_unsigned())
            v.fail("/trials", "must be a nonnegative integer");
        else
            cfg.trials = root.at("trials").get<uint64_t>();
    }
    cfg.delta = v.number("delta", cfg.delta, 0.0, 1.0, true, true);
    cfg.format = v.text("format", "csv", {"csv", "json"}) == "json" ? Format::json : Format::csv;
    cfg.out_prefix = v.text("out_prefix", kind_name(cfg.kind));

    switch (cfg.kind) {
        case Kind::two_state_sweep: {
            if (root.contains("grid")) {
                const json& grid = root.at("grid");
                if (!grid.is_object()) {
                    v.fail("/grid", "must be an object with p and theta specs");
                } else {
                    if (grid.contains("p"))
                        cfg.p_grid = parse_grid(grid.at("p"), "/grid/p", cfg.p_grid, 1e-12, 1.0,
                                                result.violations);
                    if (grid.contains("theta"))
                        cfg.theta_grid = parse_grid(grid.at("theta"), "/grid/theta", cfg.theta_grid,
                                                    1e-12, 3.14159265358979, result.violations);
                }
            }
            cfg.g_fraction = v.number("g_fraction", cfg.g_fraction, 0.0, 1.0, false, true);
            cfg.brute_grid = v.number("brute_grid", cfg.brute_grid, 2.0, 2000.0);
            break;
        }
        case Kind::gu_sweep: {
            if (root.contains("n")) {
                if (root.at("n").is_number_unsigned()) {
                    cfg.n_values = {root.at("n").get<int>()};
                } else if (root.at("n").is_array()) {
                    cfg.n_values.clear();
                    for (const json& e : root.at("n")) {
                        if (!e.is_number_unsigned()) {
                            v.fail("/n", "entries must be integers >= 2");
                            break;
                        }
                        cfg.n_values.push_back(e.get<int>());
                    }
                } else {
                    v.fail("/n", "must be an integer or an array of integers");
                }
            }
            for (int n : cfg.n_values)
                if (n < 2) v.fail("/n", "entries must be >= 2");
            cfg.eta0 = v.number("eta0", cfg.eta0, 0.0, 1.0);
            cfg.parties = v.number("parties", cfg.parties, 1.0, 64.0);
            cfg.c_th = v.number("c_th", cfg.c_th, 0.0, 1.0, true, true);
            break;
        }
        case Kind::sequential_run: {
            if (root.contains("input")) {
                const json& input = root.at("input");
                if (!input.is_object()) {
                    v.fail("/input", "must be an object");
                } else {
                    Validator vi{input, result.violations};
                    cfg.input_type = vi.text("type", "two_state", {"two_state", "gu"});
                    cfg.p = vi.number("p", cfg.p, 0.0, 1.0, true, false);
                    cfg.theta = vi.number("theta", cfg.theta, 0.0, 3.14159265358979, true, true);
                    cfg.gu_n = vi.number("n", cfg.gu_n, 2.0, 16.0);
                }
            }
            cfg.parties = v.number("parties", 4, 1.0, 64.0);
            if (root.contains("policy")) {
                const json& policy = root.at("policy");
                if (!policy.is_object()) {
                    v.fail("/policy", "must be an object {type, value}");
                } else {
                    Validator vp{policy, result.violations};
                    cfg.policy_type = vp.text("type", "g_target", {"g_target", "eta0", "fixed_c"});
                    cfg.policy_value = vp.number("value", cfg.policy_value, 0.0, 16.0);
                }
            }
            cfg.min_confidence = v.number("min_confidence", cfg.min_confidence, 0.0, 1.0);
            break;
        }
        case Kind::bounds: {
            cfg.bounds_count = v.number("bounds_count", cfg.bounds_count, 0.0, 100000.0);
            cfg.bounds_grid = v.number("bounds_grid", cfg.bounds_grid, 1.0, 1000.0);
            if (root.contains("n")) {
                if (root.at("n").is_array()) {
                    cfg.n_values.clear();
                    for (const json& e : root.at("n")) cfg.n_values.push_back(e.get<int>());
                } else {
                    v.fail("/n", "must be an array of integers");
                }
            } else {
                cfg.n_values = {3, 4};
            }
            break;
        }
        case Kind::verify: {
            cfg.dpi_draws = v.number("dpi_draws", cfg.dpi_draws, 0.0, 1000000.0);
            if (cfg.trials == 0) cfg.trials = 100000;
            break;
        }
    }

    // seeds are mandatory for any stochastic step
    const bool stochastic = cfg.trials > 0 || cfg.kind == Kind::verify ||
                            (cfg.kind == Kind::bounds && cfg.bounds_count > 0);
    if (stochastic && !cfg.has_seed) v.fail("/seed", "required when any step is stochastic");

    if (!result.violations.empty()) return result;
    result.config = std::move(cfg);
    return result;
}

ExperimentConfig parse_config_file(const std::string& path, std::optional<Kind> default_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    ParseResult result = parse_config_text(buffer.str(), default_kind);
    if (!result.config) {
        std::string message = "config validation failed:";
        for (const SchemaViolationEntry& e : result.violations)
            message += "\n  " + (e.pointer.empty() ? std::string("<root>") : e.pointer) + ": " +
                       e.message;
        throw SchemaViolation(message);
    }
    return *result.config;
}

json ExperimentConfig::to_json() const {
    json j;
    j["kind"] = kind_name(kind);
    if (has_seed) j["seed"] = seed;
    j["trials"] = trials;
    j["delta"] = delta;
    j["format"] = format == Format::csv ? "csv" : "json";
    j["out_prefix"] = out_prefix;
    switch (kind) {
        case Kind::two_state_sweep:
            j["grid"] = {{"p", {{"min", p_grid.min}, {"max", p_grid.max}, {"count", p_grid.count}}},
                         {"theta",
                          {{"min", theta_grid.min},
                           {"max", theta_grid.max},
                           {"count", theta_grid.count}}}};
            j["g_fraction"] = g_fraction;
            j["brute_grid"] = brute_grid;
            break;
        case Kind::gu_sweep:
            j["n"] = n_values;
            j["eta0"] = eta0;
            j["parties"] = parties;
            j["c_th"] = c_th;
            break;
        case Kind::sequential_run:
            j["input"] = {{"type", input_type}, {"p", p}, {"theta", theta}, {"n", gu_n}};
            j["parties"] = parties;
            j["policy"] = {{"type", policy_type}, {"value", policy_value}};
            j["min_confidence"] = min_confidence;
            break;
        case Kind::bounds:
            j["bounds_count"] = bounds_count;
            j["bounds_grid"] = bounds_grid;
            j["n"] = n_values;
            break;
        case Kind::verify:
            j["dpi_draws"] = dpi_draws;
            break;
    }
    return j;
}

bool CommandResult::pass() const {
    for (const CheckEntry& c : checks)
        if (!c.pass) return false;
    return true;
}

json CommandResult::failure_report() const {
    json entries = json::array();
    for (const CheckEntry& c : checks) {
        if (c.pass) continue;
        entries.push_back({{"check", c.check},
                           {"expected", c.expected},
                           {"actual", c.actual},
                           {"tolerance", c.tolerance}});
    }
    return json{{"failures", entries}};
}

// ---------------------------------------------------------------------------
// commands

namespace {

struct CheckSink {
    std::vector<CheckEntry>& checks;

    void close(const std::string& name, double expected, double actual, double tolerance) {
        checks.push_back({name, expected, actual, tolerance,
                          std::abs(expected - actual) <= tolerance});
    }
    void require(const std::string& name, bool ok) {
        checks.push_back({name, 1.0, ok ? 1.0 : 0.0, 0.0, ok});
    }
};

SequentialPolicy policy_from_config(const ExperimentConfig& cfg) {
    SequentialPolicy policy;
    if (cfg.policy_type == "g_target")
        policy.kind = PolicyKind::guessing_target;
    else if (cfg.policy_type == "eta0")
        policy.kind = PolicyKind::inconclusive_rate;
    else
        policy.kind = PolicyKind::fixed_weight;
    policy.value = cfg.policy_value;
    policy.delta = cfg.delta;
    policy.min_confidence = cfg.min_confidence;
    return policy;
}

CommandResult cmd_two_state(const ExperimentConfig& cfg, const RunOptions& opt) {
    CommandResult result;
    CheckSink sink{result.checks};
    Table table;
    table.columns = {"p", "theta", "C", "C_solver", "C_bruteforce", "G",
                     "eta0", "s_in", "s_out", "T"};

    for (double pv : cfg.p_grid.values()) {
        for (double tv : cfg.theta_grid.values()) {
            const Ensemble ens = two_state_ensemble(pv, tv);
            const double closed = two_state_confidence(pv, tv);
            const std::string cell = "p=" + format_double(pv) + ",theta=" + format_double(tv);

            const double solver = max_confidence_element(ens, 1).confidence;
            sink.close("two_state/solver/" + cell, closed, solver, 1e-6);
            const double brute = brute_force_confidence_qubit(ens, 1, cfg.brute_grid);
            sink.close("two_state/bruteforce/" + cell, closed, brute, 1e-4);
            if (pv == 1.0) sink.close("two_state/unambiguous/" + cell, 1.0, closed, 1e-9);

            // least-disturbing configuration at G = g_fraction * C * (1 - s~)
            MCSolution base = two_state_closed_form(pv, tv);
            const double s_in = base.direction_overlap();
            const double g_target = cfg.g_fraction * closed * (1.0 - s_in);
            LeastDisturbingParams ld = least_disturbing_params(closed, g_target, s_in);
            MCSolution sol = two_state_closed_form(pv, tv, ld.c1);
            GuessingReport report = guessing_probability(ens, sol);
            OverlapGrowth growth = overlap_growth(ld.c1, ld.c2, s_in);

            // measured next-party overlap from the compiled channel
            ChannelPlan plan = build_sequential_channel(sol);
            Ensemble next = propagate_ensemble(plan.channel, ens);
            const double s_out = overlap(max_confidence_element(next, 1).direction,
                                         max_confidence_element(next, 2).direction);
            sink.close("two_state/overlap_growth/" + cell, growth.overlap_out, s_out, 1e-9);
            sink.close("two_state/eta0_tradeoff/" + cell, s_in, report.eta0 * s_out, 1e-8);

            table.rows.push_back({pv, tv, closed, solver, brute, report.guessing_probability,
                                  report.eta0, s_in, s_out, growth.t_factor});
        }
    }

    const std::string path = opt.out_dir + "/" + cfg.out_prefix +
                             (cfg.format == Format::csv ? ".csv" : ".json");
    emit_report(table, cfg.format, path);
    result.files_written.push_back(path);
    return result;
}

CommandResult cmd_gu(const ExperimentConfig& cfg, const RunOptions& opt) {
    CommandResult result;
    CheckSink sink{result.checks};
    Table table;
    table.columns = {"n", "j", "eta0", "C_formula", "C_propagated", "C_empirical",
                     "bloch_formula", "bloch_propagated", "R_bound"};

    const std::vector<double> rates(static_cast<size_t>(cfg.parties), cfg.eta0);
    for (int n : cfg.n_values) {
        const bool bounded = n * cfg.c_th > 1.0;
        const double r_bound =
            bounded ? max_parties_gu(n, cfg.c_th, cfg.eta0).bound
                    : std::numeric_limits<double>::quiet_NaN();
        if (bounded && cfg.eta0 < 1.0)
            sink.require("gu/bound_iteration/n=" + std::to_string(n),
                         max_parties_gu(n, cfg.c_th, cfg.eta0).admissible ==
                             iterate_parties_gu(n, cfg.c_th, cfg.eta0));

        Ensemble ens = gu_ensemble(n);
        const KrausChannel channel =
            weak_channel(weaken_povm(solve_mc(gu_ensemble(n)).to_povm(), 1.0 - cfg.eta0));
        SampleStats stats;
        if (cfg.trials > 0)
            stats = sample_run(gu_ensemble(n),
                               std::vector<KrausChannel>(static_cast<size_t>(cfg.parties), channel),
                               cfg.seed + static_cast<uint64_t>(n), cfg.trials);

        for (int j = 1; j <= cfg.parties; ++j) {
            const std::string cell = "n=" + std::to_string(n) + ",j=" + std::to_string(j);
            const double formula = gu_sequential_confidence(n, rates, j);
            const double propagated = max_confidence_element(ens, 1).confidence;
            sink.close("gu/formula_vs_propagation/" + cell, formula, propagated, 1e-9);

            const double bloch_formula =
                gu_bloch_length(std::span<const double>(rates.data(), static_cast<size_t>(j - 1)));
            auto v = bloch_from_density(ens.states[0]);
            const double bloch_measured = std::hypot(v[0], v[1], v[2]);
            sink.close("gu/bloch_length/" + cell, bloch_formula, bloch_measured, 1e-10);

            double empirical = std::numeric_limits<double>::quiet_NaN();
            if (cfg.trials > 0) {
                empirical = stats.empirical_confidence(j, 1);
                sink.close("gu/empirical/" + cell, formula, empirical,
                           3.0 * stats.confidence_sigma(j, 1));
            }

            table.rows.push_back({static_cast<double>(n), static_cast<double>(j), cfg.eta0,
                                  formula, propagated, empirical, bloch_formula, bloch_measured,
                                  r_bound});
            if (j < cfg.parties) ens = propagate_ensemble(channel, ens);
        }
    }

    const std::string path = opt.out_dir + "/" + cfg.out_prefix +
                             (cfg.format == Format::csv ? ".csv" : ".json");
    emit_report(table, cfg.format, path);
    result.files_written.push_back(path);
    return result;
}

CommandResult cmd_sequential(const ExperimentConfig& cfg, const RunOptions& opt) {
    CommandResult result;
    CheckSink sink{result.checks};

    const Ensemble ens = cfg.input_type == "gu" ? gu_ensemble(cfg.gu_n)
                                                : two_state_ensemble(cfg.p, cfg.theta);
    const SequentialPolicy policy = policy_from_config(cfg);
    const SequentialRun run = run_sequential(ens, cfg.parties, policy);
    sink.require("sequential/nonempty", !run.parties.empty());

    std::vector<Cvec> dirs;
    for (const PureState& s : run.parties.empty()
                                  ? std::vector<PureState>{}
                                  : run.parties.front().solution.directions())
        dirs.push_back(s.amplitudes());
    const bool independent =
        !dirs.empty() && static_cast<int>(dirs.size()) == ens.dim() &&
        numerical_rank(dirs) == static_cast<int>(dirs.size());

    for (size_t j = 0; j < run.parties.size(); ++j) {
        const PartyRecord& record = run.parties[j];
        const std::string cell = "j=" + std::to_string(record.index);
        if (independent) {
            sink.close("sequential/equal_confidence/" + cell,
                       run.parties.front().solution.outcomes[0].confidence,
                       record.solution.outcomes[0].confidence, 1e-8);
            if (j + 1 < run.parties.size())
                sink.close("sequential/tradeoff_recursion/" + cell, record.overlap,
                           record.eta0 * run.parties[j + 1].overlap, 1e-8);
        } else if (j > 0) {
            sink.require("sequential/strict_decay/" + cell,
                         record.solution.outcomes[0].confidence <
                             run.parties[j - 1].solution.outcomes[0].confidence);
        }
    }

    if (cfg.trials > 0 && !run.parties.empty()) {
        SampleStats stats = sample_run(ens, run.channels(), cfg.seed, cfg.trials);
        for (size_t j = 0; j < run.parties.size(); ++j) {
            for (int x = 1; x <= ens.size(); ++x) {
                const double expected =
                    run.parties[j].solution.outcomes[static_cast<size_t>(x - 1)].confidence;
                const int party = static_cast<int>(j) + 1;
                sink.close("sequential/empirical/j=" + std::to_string(party) +
                               ",x=" + std::to_string(x),
                           expected, stats.empirical_confidence(party, x),
                           3.0 * stats.confidence_sigma(party, x));
            }
        }
    }

    std::string path;
    if (cfg.format == Format::csv) {
        Table table;
        table.columns = {"j", "C", "eta0", "s_tilde", "G"};
        for (const PartyRecord& record : run.parties)
            table.rows.push_back({static_cast<double>(record.index),
                                  record.solution.outcomes[0].confidence, record.eta0,
                                  record.overlap, record.guessing});
        path = opt.out_dir + "/" + cfg.out_prefix + ".csv";
        emit_report(table, Format::csv, path);
    } else {
        json parties = json::array();
        for (const PartyRecord& record : run.parties) {
            json confidences = json::array();
            json weights = json::array();
            for (const OutcomeSolution& o : record.solution.outcomes) {
                confidences.push_back(o.confidence);
                weights.push_back(o.weight);
            }
            json entry{{"j", record.index},
                       {"confidences", confidences},
                       {"weights", weights},
                       {"eta0", record.eta0},
                       {"s_tilde", record.overlap},
                       {"G", record.guessing}};
            if (record.plan) {
                json targets = json::array();
                for (const PureState& t : record.plan->targets) targets.push_back(to_json(t));
                entry["targets"] = targets;
                entry["inconclusive_weights"] = record.plan->inconclusive_weights;
            }
            parties.push_back(std::move(entry));
        }
        json doc{{"parties", parties}, {"termination", termination_name(run.termination)}};
        if (!run.note.empty()) doc["note"] = run.note;
        path = opt.out_dir + "/" + cfg.out_prefix + ".json";
        write_text_file(path, doc.dump(2) + "\n");
    }
    result.files_written.push_back(path);
    return result;
}

CommandResult cmd_bounds(const ExperimentConfig& cfg, const RunOptions& opt) {
    CommandResult result;
    CheckSink sink{result.checks};
    Table table;
    table.columns = {"family", "n", "s1", "eta0", "delta_or_cth", "bound", "admissible",
                     "iterated"};

    RngStream rng(cfg.seed, 0);
    for (int i = 0; i < cfg.bounds_count; ++i) {
        const double s1 = 0.05 + 0.9 * rng.next_uniform();
        const double eta0 = 0.05 + 0.9 * rng.next_uniform();
        const double delta = (1.0 - s1) * (0.05 + 0.9 * rng.next_uniform());
        PartyBound bound = max_parties_two_state(s1, eta0, delta);
        const int iterated = iterate_parties_two_state(s1, eta0, delta);
        sink.require("bounds/two_state/" + std::to_string(i), bound.admissible == iterated);
        table.rows.push_back({0.0, 2.0, s1, eta0, delta, bound.bound,
                              static_cast<double>(bound.admissible),
                              static_cast<double>(iterated)});
    }

    for (int n : cfg.n_values) {
        for (int i = 0; i < cfg.bounds_grid; ++i) {
            for (int k = 0; k < cfg.bounds_grid; ++k) {
                const double eta0 =
                    0.05 + 0.9 * (cfg.bounds_grid == 1 ? 0.0 : static_cast<double>(i) /
                                                                   (cfg.bounds_grid - 1));
                const double c_th = (1.0 + (k + 0.5) / cfg.bounds_grid) / n;
                PartyBound bound = max_parties_gu(n, c_th, eta0);
                const int iterated = iterate_parties_gu(n, c_th, eta0);
                sink.require("bounds/gu/n=" + std::to_string(n) + "," + std::to_string(i) + "," +
                                 std::to_string(k),
                             bound.admissible == iterated);
                table.rows.push_back({1.0, static_cast<double>(n),
                                      std::numeric_limits<double>::quiet_NaN(), eta0, c_th,
                                      bound.bound, static_cast<double>(bound.admissible),
                                      static_cast<double>(iterated)});
            }
        }
    }

    const std::string path = opt.out_dir + "/" + cfg.out_prefix +
                             (cfg.format == Format::csv ? ".csv" : ".json");
    emit_report(table, cfg.format, path);
    result.files_written.push_back(path);
    return result;
}

CommandResult cmd_verify(const ExperimentConfig& cfg, const RunOptions& opt) {
    CommandResult result;
    CheckSink sink{result.checks};

    // sequential two-state protocol against its Monte Carlo estimate
    {
        const double p = 0.8, theta = 1.0471975511965976;
        const Ensemble ens = two_state_ensemble(p, theta);
        SequentialPolicy policy;
        policy.kind = PolicyKind::inconclusive_rate;
        policy.value = 0.8;
        const SequentialRun run = run_sequential(ens, 2, policy);
        SampleStats stats = sample_run(ens, run.channels(), cfg.seed, cfg.trials);
        const double expected = two_state_confidence(p, theta);
        for (int j = 1; j <= 2; ++j)
            for (int x = 1; x <= 2; ++x)
                sink.close("verify/two_state/j=" + std::to_string(j) + ",x=" + std::to_string(x),
                           expected, stats.empirical_confidence(j, x),
                           3.0 * stats.confidence_sigma(j, x));
    }

    // GU decay against its Monte Carlo estimate
    {
        const int n = 3;
        const double eta0 = 0.5;
        const KrausChannel channel =
            weak_channel(weaken_povm(solve_mc(gu_ensemble(n)).to_povm(), 1.0 - eta0));
        SampleStats stats = sample_run(gu_ensemble(n), {channel, channel}, cfg.seed + 1,
                                       cfg.trials);
        const std::vector<double> rates{eta0};
        for (int j = 1; j <= 2; ++j)
            sink.close("verify/gu/j=" + std::to_string(j),
                       gu_sequential_confidence(n, rates, j), stats.empirical_confidence(j, 1),
                       3.0 * stats.confidence_sigma(j, 1));
    }

    // data-processing inequality on seeded draws
    {
        RngStream rng(cfg.seed, 2);
        int violations = 0;
        for (int i = 0; i < cfg.dpi_draws; ++i) {
            DensityOperator r1 = ginibre_density(2, rng);
            DensityOperator r2 = ginibre_density(2, rng);
            const double p = 0.3 + 0.65 * rng.next_uniform();
            const double theta = 0.2 + 2.5 * rng.next_uniform();
            const double fraction = 0.5 * rng.next_uniform();
            MCSolution base = two_state_closed_form(p, theta);
            LeastDisturbingParams ld = least_disturbing_params(
                base.outcomes[0].confidence, fraction * base.outcomes[0].confidence,
                base.direction_overlap());
            ChannelPlan plan = build_sequential_channel(two_state_closed_form(p, theta, ld.c1));
            if (!check_dpi(r1, r2, plan.channel).pass) ++violations;
        }
        sink.close("verify/dpi_violations", 0.0, violations, 0.0);
    }

    Table table;
    table.columns = {"expected", "actual", "tolerance", "pass"};
    json rows = json::array();
    for (const CheckEntry& c : result.checks)
        rows.push_back({{"check", c.check},
                        {"expected", c.expected},
                        {"actual", c.actual},
                        {"tolerance", c.tolerance},
                        {"pass", c.pass}});
    const std::string path = opt.out_dir + "/" + cfg.out_prefix + ".json";
    write_text_file(path, json{{"checks", rows}}.dump(2) + "\n");
    result.files_written.push_back(path);
    return result;
}

}  // namespace

CommandResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    ExperimentConfig cfg = config;
    if (options.seed_override) {
        cfg.seed = *options.seed_override;
        cfg.has_seed = true;
    }
    if (options.trials_override) cfg.trials = *options.trials_override;
    if (options.format_override) cfg.format = *options.format_override;

    CommandResult result;
    switch (cfg.kind) {
        case Kind::two_state_sweep: result = cmd_two_state(cfg, options); break;
        case Kind::gu_sweep: result = cmd_gu(cfg, options); break;
        case Kind::sequential_run: result = cmd_sequential(cfg, options); break;
        case Kind::bounds: result = cmd_bounds(cfg, options); break;
        case Kind::verify: result = cmd_verify(cfg, options); break;
    }

    if (!result.pass()) {
        const std::string path = options.out_dir + "/" + cfg.out_prefix + "_failures.json";
        write_text_file(path, result.failure_report().dump(2) + "\n");
        result.files_written.push_back(path);
    }
    if (!options.quiet) {
        for (const std::string& f : result.files_written) std::cout << "wrote " << f << "\n";
        int failed = 0;
        for (const CheckEntry& c : result.checks) failed += c.pass ? 0 : 1;
        std::cout << result.checks.size() << " checks, " << failed << " failed\n";
    }
    return result;
}

}  // namespace seqmc::cli

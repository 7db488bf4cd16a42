#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "seqmc/sequential.hpp"

namespace seqmc::cli {

enum class Kind { two_state_sweep, gu_sweep, sequential_run, bounds, verify };
enum class Format { csv, json };

std::string kind_name(Kind k);
std::optional<Kind> kind_from_name(const std::string& name);

struct GridSpec {
    double min = 0.0;
    double max = 1.0;
    int count = 1;
    std::vector<double> values() const;
};

// Validated experiment description.  Defaults are materialized on parse so
// serialize(parse(x)) is a normal form.
struct ExperimentConfig {
    Kind kind = Kind::two_state_sweep;
    uint64_t seed = 0;
    bool has_seed = false;
    uint64_t trials = 0;
    double delta = 1e-3;
    Format format = Format::csv;
    std::string out_prefix;  // defaults to the kind name

    // two_state_sweep
    GridSpec p_grid{0.05, 1.0, 20};
    GridSpec theta_grid{0.1, 3.0415926535897931, 20};
    double g_fraction = 0.3;  // G = g_fraction * C * (1 - s~), feasible on the whole grid
    int brute_grid = 400;

    // gu_sweep
    std::vector<int> n_values{3, 4, 5, 6};
    double eta0 = 0.5;
    int parties = 6;
    double c_th = 0.3;

    // sequential_run
    std::string input_type = "two_state";  // two_state | gu
    double p = 0.8;
    double theta = 1.0471975511965976;
    int gu_n = 3;
    std::string policy_type = "g_target";  // g_target | eta0 | fixed_c
    double policy_value = 0.25;
    double min_confidence = 0.0;

    // bounds
    int bounds_count = 50;  // seeded two-state triples
    int bounds_grid = 10;   // (eta0, C_th) grid per n

    // verify
    int dpi_draws = 1000;

    nlohmann::json to_json() const;
};

struct SchemaViolationEntry {
    std::string pointer;  // JSON pointer, e.g. "/grid/p/count"
    std::string message;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<SchemaViolationEntry> violations;
};

ParseResult parse_config_text(const std::string& text,
                              std::optional<Kind> default_kind = std::nullopt);
// Throws IoError / SchemaViolation (message lists every violation).
ExperimentConfig parse_config_file(const std::string& path,
                                   std::optional<Kind> default_kind = std::nullopt);

struct CheckEntry {
    std::string check;
    double expected;
    double actual;
    double tolerance;
    bool pass;
};

struct CommandResult {
    std::vector<std::string> files_written;
    std::vector<CheckEntry> checks;
    bool pass() const;
    nlohmann::json failure_report() const;  // failing entries only
};

struct RunOptions {
    std::string out_dir = ".";
    std::optional<uint64_t> seed_override;
    std::optional<uint64_t> trials_override;
    std::optional<Format> format_override;
    bool quiet = false;
};

CommandResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

// Plot-ready numeric table.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// shortest round-trip decimal form (17 significant digits)
std::string format_double(double v);
void emit_report(const Table& table, Format format, const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace seqmc::cli

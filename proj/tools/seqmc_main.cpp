#include <CLI11.hpp>
#include <iostream>

#include "seqmc/experiments.hpp"

using namespace seqmc;

int main(int argc, char** argv) {
    CLI::App app{"sequential maximum-confidence discrimination experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string format;
    uint64_t seed = 0;
    uint64_t trials = 0;
    bool quiet = false;
    bool seed_given = false;
    bool trials_given = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--format", format, "csv or json (overrides config)");
        cmd->add_option("--seed", seed, "RNG seed (overrides config)")
            ->each([&](const std::string&) { seed_given = true; });
        cmd->add_option("--trials", trials, "Monte Carlo trials (overrides config)")
            ->each([&](const std::string&) { trials_given = true; });
        cmd->add_flag("--quiet", quiet, "suppress progress output");
    };

    struct Sub {
        const char* name;
        cli::Kind kind;
        const char* help;
    };
    const Sub subs[] = {
        {"two-state", cli::Kind::two_state_sweep, "closed-form sweep over (p, theta)"},
        {"gu", cli::Kind::gu_sweep, "geometric-uniform decay sweep"},
        {"sequential", cli::Kind::sequential_run, "multi-party sequential protocol"},
        {"bounds", cli::Kind::bounds, "party-count bounds against direct iteration"},
        {"verify", cli::Kind::verify, "Monte Carlo and DPI verification battery"},
    };
    for (const Sub& s : subs) add_common(app.add_subcommand(s.name, s.help));

    CLI11_PARSE(app, argc, argv);

    cli::Kind kind = cli::Kind::two_state_sweep;
    for (const Sub& s : subs)
        if (app.get_subcommand(s.name)->parsed()) kind = s.kind;

    try {
        cli::ExperimentConfig config = cli::parse_config_file(config_path, kind);
        cli::RunOptions options;
        options.out_dir = out_dir;
        options.quiet = quiet;
        if (seed_given) options.seed_override = seed;
        if (trials_given) options.trials_override = trials;
        if (format == "csv") options.format_override = cli::Format::csv;
        if (format == "json") options.format_override = cli::Format::json;

        cli::CommandResult result = cli::run_experiment(config, options);
        return result.pass() ? 0 : 1;
    } catch (const SchemaViolation& e) {
        std::cerr << "schema violation: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

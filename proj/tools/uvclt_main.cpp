#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "uvclt/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"uvclt: worst-case CLT workbench (dynamic programming, Monte Carlo, "
                 "monotone G-heat finite differences)"};
    app.set_version_flag("--version", std::string("uvclt ") + uvclt::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    uvclt::CliOverrides overrides;
    std::string out_dir, format, policy;
    std::uint64_t seed = 0;
    std::int64_t paths = 0;
    double epsilon = 0.0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "path to the experiment config file")
            ->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_flag("--strict", overrides.strict, "fail on monotonicity/verdict violations");
        cmd->add_option("--seed", seed, "Monte Carlo master seed (overrides config)");
        cmd->add_option("--paths", paths, "Monte Carlo path count (overrides config)");
        cmd->add_option("--epsilon", epsilon, "Monte Carlo perturbation (overrides config)");
        cmd->add_option("--policy", policy,
                        "simulate policy: constant:<x>, dp_argmax or bang_bang");
        cmd->add_option("--format", format, "output format: csv or json");
    };

    CLI::App* check = app.add_subcommand("check", "evaluate the hypothesis checkers over n");
    CLI::App* pde = app.add_subcommand("pde", "solve the G-heat terminal-value problem");
    CLI::App* dp = app.add_subcommand("dp", "worst-case dynamic-programming values over n");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo under a policy");
    CLI::App* converge = app.add_subcommand("converge", "dp-vs-pde gap sweep over n");
    CLI::App* viscosity = app.add_subcommand("viscosity", "vanishing-viscosity epsilon sweep");
    CLI::App* mollify = app.add_subcommand("mollify-demo", "smooth-and-truncate demo table");
    for (CLI::App* cmd : {check, pde, dp, simulate, converge, viscosity, mollify}) {
        add_common(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    if (!out_dir.empty()) overrides.out_dir = out_dir;
    CLI::App* active = app.get_subcommands().front();
    if (active->count("--seed") > 0) overrides.seed = seed;
    if (active->count("--paths") > 0) overrides.paths = paths;
    if (active->count("--epsilon") > 0) overrides.epsilon = epsilon;
    if (active->count("--policy") > 0) overrides.policy = policy;
    if (active->count("--format") > 0) {
        if (format == "csv") {
            overrides.format = uvclt::OutputFormat::csv;
        } else if (format == "json") {
            overrides.format = uvclt::OutputFormat::json;
        } else {
            std::cerr << "config error: --format must be csv or json\n";
            return 2;
        }
    }
    return uvclt::run_command(active->get_name(), config_path, overrides, std::cout, std::cerr);
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uvclt/control.hpp"
#include "uvclt/grid.hpp"
#include "uvclt/model.hpp"
#include "uvclt/mollify.hpp"
#include "uvclt/montecarlo.hpp"

namespace uvclt {

enum class OutputFormat { csv, json };

/// Parsed experiment configuration. One file drives every subcommand; blocks
/// validate eagerly and unknown keys are hard errors.
struct RunConfig {
    ModelSpec model;
    TerminalFunction terminal = TerminalFunction::cosine();

    // pde block
    double pde_half_width = 0.0;  // 0 = auto: 6 * lambda_hi + 2
    double pde_dx = 0.01;
    double pde_theta = 0.5;
    BoundaryMode pde_boundary = BoundaryMode::dirichlet_terminal;
    std::vector<double> pde_epsilons;  // viscosity sweep
    std::string pde_dump = "none";     // none | slice | full

    // dp block
    CandidateRule dp_rule = CandidateRule::lambda_grid;
    int dp_candidates = 21;
    std::vector<int> dp_n_list;
    double dp_dx = 0.0;          // 0 = pde_dx
    double dp_half_width = 0.0;  // 0 = auto
    bool dp_dump_slices = false;

    // mc block
    SimulationConfig mc;
    int mc_horizon = 0;  // 0 = model horizon
    std::string mc_policy = "constant:1.0";

    // check block
    std::vector<int> check_n_list;
    std::vector<double> lindeberg_epsilons;
    double moment_delta = 1.0;
    std::optional<double> check_threshold_lindeberg;
    std::optional<double> check_threshold_feller;
    std::optional<double> check_threshold_stabilization;

    // converge block
    double converge_slack = 2e-3;

    // mollify block
    MollifierConfig mollify;

    // output block
    std::string out_dir = ".";
    OutputFormat format = OutputFormat::csv;

    // provenance
    std::string config_path;
    std::string config_hash;

    /// Grid for a solve whose band upper limit is lambda_hi, honoring the
    /// configured half-width or the auto rule.
    PdeGrid make_pde_grid(double lambda_hi) const;
    PdeGrid make_dp_grid(double lambda_hi) const;
};

/// Loads and validates a config file; throws ConfigError with field
/// diagnostics on malformed input, unknown keys, or block violations.
RunConfig load_config(const std::string& path);

}  // namespace uvclt

#include "uvclt/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "uvclt/errors.hpp"
#include "uvclt/gheat.hpp"
#include "uvclt/mollify.hpp"
#include "uvclt/montecarlo.hpp"
#include "uvclt/report.hpp"

namespace uvclt {

const char* const kToolVersion = "0.1.0";

namespace {

namespace fs = std::filesystem;

std::string fd(double v) { return format_double(v); }

Table make_table(const RunConfig& cfg, const std::string& command,
                 std::vector<std::string> columns) {
    Table t(std::move(columns));
    t.add_meta("tool", std::string("uvclt ") + kToolVersion);
    t.add_meta("command", command);
    t.add_meta("config", cfg.config_path);
    t.add_meta("config_hash", cfg.config_hash);
    return t;
}

void write_table(const Table& table, const RunConfig& cfg, const std::string& name,
                 std::ostream& log) {
    fs::create_directories(cfg.out_dir);
    const bool json = cfg.format == OutputFormat::json;
    const fs::path path = fs::path(cfg.out_dir) / (name + (json ? ".json" : ".csv"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file " + path.string());
    std::ostringstream text;
    if (json) {
        table.write_json(text);
    } else {
        table.write_csv(text);
    }
    out << text.str();
    log << text.str();
    log << "wrote " << path.string() << "\n";
}

void write_raw(const RunConfig& cfg, const std::string& filename, const std::string& text) {
    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file " + path.string());
    out << text;
}

GheatProblem limit_problem(const RunConfig& cfg) {
    return GheatProblem{cfg.model.band.limit_lower(), cfg.model.band.limit_upper(),
                        cfg.terminal};
}

DpProblem dp_problem_for(const RunConfig& cfg, int n, bool keep_slices) {
    DpProblem p{cfg.model, cfg.terminal, cfg.dp_rule, cfg.dp_candidates,
                cfg.make_dp_grid(cfg.model.band.uniform_bound()), true, keep_slices,
                ExecMode::parallel};
    p.spec.horizon = n;
    return p;
}

AdaptedPolicy make_policy(const RunConfig& cfg, int n) {
    const std::string& name = cfg.mc_policy;
    if (name.rfind("constant:", 0) == 0) {
        const double lambda = std::strtod(name.c_str() + 9, nullptr);
        return AdaptedPolicy::constant(lambda, cfg.model.band);
    }
    if (name == "dp_argmax") {
        auto result = dp_value(dp_problem_for(cfg, n, true));
        return AdaptedPolicy::dp_argmax(result.slices, cfg.model.band);
    }
    if (name == "bang_bang") {
        ModelSpec spec_n = cfg.model;
        spec_n.horizon = n;
        SolveOptions options;
        options.store_times = time_grid(spec_n, n);
        auto solution = std::make_shared<PdeSolution>(
            solve_gheat(limit_problem(cfg),
                        cfg.make_pde_grid(cfg.model.band.limit_upper()), options));
        return AdaptedPolicy::bang_bang(std::move(solution), cfg.model.band);
    }
    throw ConfigError("config: mc.policy must be constant:<x>, dp_argmax or bang_bang");
}

// Sweep verdict: the last up-to-three consecutive steps must strictly
// decrease, or the final value must clear the configured threshold when one
// is given. Sequences that already sit at zero count as converged.
bool sweep_ok(const std::vector<double>& values, std::optional<double> threshold) {
    if (threshold) return !values.empty() && values.back() <= *threshold;
    if (values.size() < 2) return true;
    if (values.back() == 0.0) return true;
    const std::size_t first = values.size() >= 4 ? values.size() - 4 : 0;
    for (std::size_t i = first; i + 1 < values.size(); ++i) {
        if (!(values[i + 1] < values[i])) return false;
    }
    return true;
}

}  // namespace

void apply_overrides(RunConfig& cfg, const CliOverrides& overrides) {
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.seed) cfg.mc.seed = *overrides.seed;
    if (overrides.paths) cfg.mc.paths = *overrides.paths;
    if (overrides.epsilon) cfg.mc.epsilon = *overrides.epsilon;
    if (overrides.policy) cfg.mc_policy = *overrides.policy;
    if (overrides.format) cfg.format = *overrides.format;
    cfg.mc.validate();
}

// ============================================================================
// check
// ============================================================================

void cmd_check(const RunConfig& cfg, bool strict, std::ostream& log) {
    std::vector<std::string> columns = {"n"};
    for (double eps : cfg.lindeberg_epsilons) {
        char name[48];
        std::snprintf(name, sizeof(name), "lindeberg_eps_%s", fd(eps).c_str());
        columns.push_back(name);
    }
    for (const char* c : {"feller", "m_n", "hausdorff_form", "moment_sup", "moment_tail"}) {
        columns.push_back(c);
    }
    Table table = make_table(cfg, "check", std::move(columns));
    table.add_meta("noise", cfg.model.noise.name());
    table.add_meta("band_rule", cfg.model.band.rule_name());
    table.add_meta("moment_delta", cfg.moment_delta);

    // Verdicts track the most stringent epsilon in the list.
    std::size_t strictest = 0;
    for (std::size_t i = 1; i < cfg.lindeberg_epsilons.size(); ++i) {
        if (cfg.lindeberg_epsilons[i] < cfg.lindeberg_epsilons[strictest]) strictest = i;
    }

    std::vector<double> lindeberg_trace, feller_trace, stabilization_trace;
    for (int n : cfg.check_n_list) {
        const ConditionReport report =
            condition_report(cfg.model, n, cfg.lindeberg_epsilons, cfg.moment_delta);
        std::vector<std::string> row = {std::to_string(n)};
        for (const auto& [eps, value] : report.lindeberg) row.push_back(fd(value));
        row.push_back(fd(report.feller));
        row.push_back(fd(report.stabilization_m));
        row.push_back(fd(report.hausdorff_form));
        row.push_back(fd(report.moment_sup));
        row.push_back(fd(report.moment_tail));
        table.add_row(std::move(row));
        lindeberg_trace.push_back(report.lindeberg[strictest].second);
        feller_trace.push_back(report.feller);
        stabilization_trace.push_back(report.stabilization_m);
    }

    const bool lindeberg_ok = sweep_ok(lindeberg_trace, cfg.check_threshold_lindeberg);
    const bool feller_ok = sweep_ok(feller_trace, cfg.check_threshold_feller);
    const bool stabilization_ok = sweep_ok(stabilization_trace, cfg.check_threshold_stabilization);
    table.add_meta("verdict_lindeberg", lindeberg_ok ? "ok" : "flag");
    table.add_meta("verdict_feller", feller_ok ? "ok" : "flag");
    table.add_meta("verdict_stabilization", stabilization_ok ? "ok" : "flag");

    write_table(table, cfg, "check", log);
    if (strict && !(lindeberg_ok && feller_ok && stabilization_ok)) {
        throw NumericalError("check: a condition verdict is flagged");
    }
}

// ============================================================================
// pde
// ============================================================================

void cmd_pde(const RunConfig& cfg, std::ostream& log) {
    const GheatProblem problem = limit_problem(cfg);
    const PdeGrid grid = cfg.make_pde_grid(problem.lambda_hi);
    SolveOptions options;
    options.store_all = cfg.pde_dump == "full";
    const PdeSolution solution = solve_gheat(problem, grid, options);
    const auto ts = solution.stepping();

    Table table = make_table(cfg, "pde",
                             {"value_origin", "lambda_lo", "lambda_hi", "half_width", "dx",
                              "theta", "steps", "dt", "boundary"});
    table.add_meta("terminal", cfg.terminal.name());
    table.add_row({fd(solution.value_at_origin()), fd(problem.lambda_lo), fd(problem.lambda_hi),
                   fd(grid.half_width()), fd(grid.dx()), fd(grid.theta()),
                   std::to_string(ts.steps), fd(ts.dt),
                   grid.boundary() == BoundaryMode::dirichlet_terminal ? "dirichlet_terminal"
                                                                       : "linear_extrapolation"});
    write_table(table, cfg, "pde", log);

    if (cfg.pde_dump != "none") {
        std::ostringstream dump;
        dump << "# tool: uvclt " << kToolVersion << "\n# config_hash: " << cfg.config_hash
             << "\n# half_width: " << fd(grid.half_width()) << "\n# dx: " << fd(grid.dx())
             << "\n# theta: " << fd(grid.theta()) << "\n";
        solution.dump_csv(dump, cfg.pde_dump == "full");
        write_raw(cfg, cfg.pde_dump == "full" ? "pde_field.csv" : "pde_slice.csv", dump.str());
    }
}

// ============================================================================
// dp
// ============================================================================

void cmd_dp(const RunConfig& cfg, std::ostream& log) {
    Table table = make_table(cfg, "dp",
                             {"n", "value_origin", "candidates", "dx", "half_width",
                              "edge_extrapolated"});
    table.add_meta("terminal", cfg.terminal.name());
    table.add_meta("candidate_rule",
                   cfg.dp_rule == CandidateRule::lambda_grid ? "lambda_grid" : "endpoints_only");
    for (int n : cfg.dp_n_list) {
        const DpProblem problem = dp_problem_for(cfg, n, cfg.dp_dump_slices);
        const DpResult result = dp_value(problem);
        table.add_row({std::to_string(n), fd(result.value_at_origin),
                       std::to_string(cfg.dp_candidates), fd(problem.grid.dx()),
                       fd(problem.grid.half_width()), result.edge_extrapolated ? "1" : "0"});
        if (cfg.dp_dump_slices && result.slices) {
            std::ostringstream dump;
            result.slices->dump_csv(dump);
            char filename[48];
            std::snprintf(filename, sizeof(filename), "dp_slices_%d.csv", n);
            write_raw(cfg, filename, dump.str());
        }
    }
    write_table(table, cfg, "dp", log);
}

// ============================================================================
// simulate
// ============================================================================

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    const int n = cfg.mc_horizon;
    ModelSpec spec_n = cfg.model;
    spec_n.horizon = n;
    const AdaptedPolicy policy = make_policy(cfg, n);
    const EstimateReport report = simulate_value(spec_n, policy, cfg.terminal, cfg.mc);

    Table table = make_table(cfg, "simulate",
                             {"policy", "n", "paths", "seed", "epsilon", "mean", "se", "ci99"});
    table.add_meta("terminal", cfg.terminal.name());
    table.add_meta("antithetic", cfg.mc.antithetic ? "true" : "false");
    table.add_meta("seed", static_cast<double>(cfg.mc.seed));
    if (cfg.mc_policy == "bang_bang") {
        const PdeGrid grid = cfg.make_pde_grid(cfg.model.band.limit_upper());
        table.add_meta("pde_dx", grid.dx());
        table.add_meta("pde_half_width", grid.half_width());
    } else if (cfg.mc_policy == "dp_argmax") {
        const PdeGrid grid = cfg.make_dp_grid(cfg.model.band.uniform_bound());
        table.add_meta("dp_dx", grid.dx());
        table.add_meta("dp_half_width", grid.half_width());
    }
    table.add_row({report.policy_label, std::to_string(report.horizon),
                   std::to_string(report.paths), std::to_string(report.seed), fd(report.epsilon),
                   fd(report.mean), fd(report.standard_error), fd(report.ci99_halfwidth)});
    write_table(table, cfg, "simulate", log);
}

// ============================================================================
// converge
// ============================================================================

void cmd_converge(const RunConfig& cfg, bool strict, std::ostream& log) {
    const GheatProblem problem = limit_problem(cfg);
    const PdeSolution solution =
        solve_gheat(problem, cfg.make_pde_grid(problem.lambda_hi), SolveOptions{});
    const double pde_origin = solution.value_at_origin();

    Table table = make_table(cfg, "converge", {"n", "dp_value", "pde_value", "gap"});
    table.add_meta("terminal", cfg.terminal.name());
    table.add_meta("slack", cfg.converge_slack);
    table.add_meta("pde_dx", solution.grid().dx());
    table.add_meta("pde_half_width", solution.grid().half_width());
    {
        const PdeGrid dp_grid = cfg.make_dp_grid(cfg.model.band.uniform_bound());
        table.add_meta("dp_dx", dp_grid.dx());
        table.add_meta("dp_half_width", dp_grid.half_width());
        table.add_meta("dp_candidates", static_cast<double>(cfg.dp_candidates));
    }
    std::vector<double> gaps;
    for (int n : cfg.dp_n_list) {
        const DpResult result = dp_value(dp_problem_for(cfg, n, false));
        const double gap = std::abs(result.value_at_origin - pde_origin);
        gaps.push_back(gap);
        table.add_row({std::to_string(n), fd(result.value_at_origin), fd(pde_origin), fd(gap)});
    }
    write_table(table, cfg, "converge", log);

    if (strict) {
        for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
            if (gaps[i + 1] > gaps[i] + cfg.converge_slack) {
                throw NumericalError("converge: gap increased beyond the configured slack");
            }
        }
    }
}

// ============================================================================
// viscosity
// ============================================================================

void cmd_viscosity(const RunConfig& cfg, bool strict, std::ostream& log) {
    std::vector<double> epsilons = cfg.pde_epsilons;
    if (epsilons.empty()) throw ConfigError("config: pde.epsilons must list the sweep values");
    if (std::find(epsilons.begin(), epsilons.end(), 0.0) == epsilons.end()) {
        throw ConfigError("config: pde.epsilons must include 0 for the reference solve");
    }
    const bool was_sorted =
        std::is_sorted(epsilons.begin(), epsilons.end(), std::greater<double>());
    std::sort(epsilons.begin(), epsilons.end(), std::greater<double>());
    epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());

    const GheatProblem problem = limit_problem(cfg);
    // One spatial geometry for the whole sweep, wide enough for the most
    // diffusive regularization; each solve re-derives its own time step.
    const double hi_max = std::sqrt(problem.lambda_hi * problem.lambda_hi +
                                    epsilons.front() * epsilons.front());
    const PdeGrid grid = cfg.make_pde_grid(hi_max);
    const double v0 = solve_gheat(problem, grid, SolveOptions{}).value_at_origin();

    Table table = make_table(cfg, "viscosity", {"epsilon", "value_origin", "diff_vs_zero"});
    table.add_meta("terminal", cfg.terminal.name());
    table.add_meta("half_width", grid.half_width());
    table.add_meta("dx", grid.dx());
    if (!was_sorted) table.add_meta("note", "epsilon list re-sorted descending");
    std::vector<double> diffs;
    for (double eps : epsilons) {
        const double value =
            eps == 0.0
                ? v0
                : vanishing_viscosity_solve(problem, eps, grid, SolveOptions{}).value_at_origin();
        const double diff = std::abs(value - v0);
        diffs.push_back(diff);
        table.add_row({fd(eps), fd(value), fd(diff)});
    }
    write_table(table, cfg, "viscosity", log);

    if (strict) {
        for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
            if (!(diffs[i + 1] < diffs[i])) {
                throw NumericalError("viscosity: differences are not strictly decreasing");
            }
        }
    }
}

// ============================================================================
// mollify-demo
// ============================================================================

void cmd_mollify_demo(const RunConfig& cfg, std::ostream& log) {
    const SmoothApproxResult approx = smooth_approx(cfg.terminal, cfg.mollify);
    const TerminalFunction truncated = truncate_terminal(approx.fn, cfg.mollify.epsilon);

    Table table = make_table(cfg, "mollify-demo", {"x", "f", "f_eps", "g_eps"});
    table.add_meta("terminal", cfg.terminal.name());
    table.add_meta("epsilon", cfg.mollify.epsilon);
    table.add_meta("bandwidth", approx.bandwidth);
    table.add_meta("achieved_deviation", approx.achieved_deviation);
    table.add_meta("window_half_width", cfg.mollify.effective_window());
    table.add_meta("window_step", cfg.mollify.window_step);
    table.add_meta("quadrature_nodes", static_cast<double>(cfg.mollify.quadrature_nodes));
    table.add_meta("cutoff", "exp(-1/t) bump partition, plateau |x|<=1, support |x|<=2");
    const double window = cfg.mollify.effective_window();
    const double step = cfg.mollify.window_step;
    const int count = static_cast<int>(std::floor(2.0 * window / step)) + 1;
    for (int i = 0; i < count; ++i) {
        const double x = -window + i * step;
        table.add_row({fd(x), fd(cfg.terminal(x)), fd(approx.fn(x)), fd(truncated(x))});
    }
    write_table(table, cfg, "mollify-demo", log);
}

// ============================================================================
// dispatch
// ============================================================================

int run_command(const std::string& name, const std::string& config_path,
                const CliOverrides& overrides, std::ostream& log, std::ostream& err) {
    try {
        RunConfig cfg = load_config(config_path);
        apply_overrides(cfg, overrides);
        if (name == "check") {
            cmd_check(cfg, overrides.strict, log);
        } else if (name == "pde") {
            cmd_pde(cfg, log);
        } else if (name == "dp") {
            cmd_dp(cfg, log);
        } else if (name == "simulate") {
            cmd_simulate(cfg, log);
        } else if (name == "converge") {
            cmd_converge(cfg, overrides.strict, log);
        } else if (name == "viscosity") {
            cmd_viscosity(cfg, overrides.strict, log);
        } else if (name == "mollify-demo") {
            cmd_mollify_demo(cfg, log);
        } else {
            err << "unknown command: " << name << "\n";
            return 2;
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceLimitError& e) {
        err << "resource error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace uvclt

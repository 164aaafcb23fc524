#pragma once

#include <iosfwd>
#include <string>

#include "uvclt/config.hpp"

namespace uvclt {

/// Flag overrides applied on top of the loaded config.
struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> paths;
    std::optional<double> epsilon;
    std::optional<std::string> policy;
    std::optional<OutputFormat> format;
    bool strict = false;
};

void apply_overrides(RunConfig& config, const CliOverrides& overrides);

/// Each command writes <out>/<name>.{csv|json} and echoes the table to `log`.
/// Errors propagate as exceptions; exit-code mapping lives in the CLI shell.
void cmd_check(const RunConfig& config, bool strict, std::ostream& log);
void cmd_pde(const RunConfig& config, std::ostream& log);
void cmd_dp(const RunConfig& config, std::ostream& log);
void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_converge(const RunConfig& config, bool strict, std::ostream& log);
void cmd_viscosity(const RunConfig& config, bool strict, std::ostream& log);
void cmd_mollify_demo(const RunConfig& config, std::ostream& log);

/// Exit-code contract: 0 ok, 2 config, 3 numerical, 4 resource.
int run_command(const std::string& name, const std::string& config_path,
                const CliOverrides& overrides, std::ostream& log, std::ostream& err);

extern const char* const kToolVersion;

}  // namespace uvclt

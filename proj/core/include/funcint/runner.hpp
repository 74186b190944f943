#pragma once

#include <optional>
#include <string>
#include <vector>

#include "funcint/config.hpp"

namespace funcint {

/// One verified property of a finished run.
struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;      // the measured residual / deviation / coverage
    double tolerance = 0.0;  // the bound it was held to
};

struct RunOptions {
    std::string subcommand;
    std::string config_path;           // empty: builtin defaults only
    std::string config_text;           // parsed instead of the path when set
    std::string out_dir = "funcint_out";
    int workers = 0;                   // 0: take [run] workers from the config
    std::optional<std::uint64_t> seed; // overrides [run] seed
};

struct RunResult {
    int exit_code = 3;  // 0 ok, 1 failed check, 2 config error, 3 runtime failure
    std::string error;
    std::vector<CheckResult> checks;
    std::vector<std::string> outputs;  // paths of CSV/JSON artifacts
    std::string manifest_path;
};

/// Executes one subcommand: validates the full configuration, runs the
/// experiment, writes CSV outputs plus a JSON manifest embedding the
/// resolved config and its hash.  Identical configs (same seed) produce
/// byte-identical CSVs for any worker count.
RunResult run(const RunOptions& options);

const std::vector<std::string>& subcommand_names();

/// Builtin default configuration text for a subcommand (what runs when no
/// config file is given).
std::string default_config_text(const std::string& subcommand);

} // namespace funcint

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "intphase/errors.hpp"

namespace intphase {

struct CliOptions {
    std::string command;  // simulate | sweep | sensitivity | classify |
                          // export-trajectories | verify
    std::string config_path;
    std::string out_path;        // empty or "-": stdout
    std::string axis;            // sweep parameter name
    std::vector<double> values;  // sweep values
    int jobs = 0;                // sweep workers; 0 = logical processors
    std::optional<bool> oracle;  // --oracle on|off override
};

// Comma-separated numbers; throws ValidationError on malformed entries.
std::vector<double> parse_value_list(const std::string& csv);

// Runs one command and returns the process exit code: 0 success,
// 1 numerical failure, 2 validation failure. Never throws.
int run_command(const CliOptions& opts);

}  // namespace intphase

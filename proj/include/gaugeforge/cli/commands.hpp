#pragma once

#include <string>
#include <vector>

#include "gaugeforge/cli/report.hpp"

namespace gaugeforge::cli {

const std::vector<std::string>& command_names();

// Runs one verification command. Failing checks become failing rows;
// configuration problems throw ConfigError.
Report run_command(const std::string& command, const RunConfig& config, bool convergence = false);

// Residuals of the product-rule identity for a fixed pair on circle grids
// of the given sizes.
std::vector<std::pair<int, double>> product_rule_study(const StructureGroup& group,
                                                       const std::vector<int>& sizes);
// Smallest observed order log2(r_N / r_2N) over consecutive doublings.
double observed_order(const std::vector<std::pair<int, double>>& study);

// Entry point of the gaugeforge executable; returns the exit code
// (0 all checks pass, 1 some check fails, 2 configuration or usage error).
int run_cli(int argc, char** argv);

}  // namespace gaugeforge::cli

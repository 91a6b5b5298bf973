#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cohertherm/cli/config.hpp"

namespace cohertherm::cli {

struct RunReport {
    std::vector<std::filesystem::path> artifacts;  // relative to output_dir
};

/// Runs the scenario and writes its CSVs plus manifest.txt into
/// config.output_dir. Library failures propagate as cohertherm::Error;
/// invalid parameter values raise ConfigError.
RunReport run_scenario(const ScenarioConfig& config);

/// Entry point shared by the executable and the tests. Exit codes: 0 success,
/// 1 config error, 2 numerical error.
int run_cli(int argc, const char* const* argv);

}  // namespace cohertherm::cli

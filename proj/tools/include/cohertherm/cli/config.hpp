#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cohertherm/dynamics.hpp"

namespace cohertherm::cli {

/// Bad config text or values. what() names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scenario { trajectories, propagator, chaos_tunneling, fluctuation_curve, phase_opt, lindblad };

std::string_view to_string(Scenario s) noexcept;

/// Parsed and defaulted configuration.
///
/// File format, one `key = value` per line, `#` starts a comment:
///
///   scenario = propagator        # required
///   seed = 7                     # optional, default 0
///   output_dir = out             # optional, default "."
///   [system]                     # SystemSpec fields
///   kind = double_well
///   hbar = 0.05
///   [params]                     # scenario table, see scenario_defaults()
///   t = 1.4
///
/// Unknown sections and keys are rejected.
struct ScenarioConfig {
    Scenario scenario = Scenario::trajectories;
    dynamics::SystemSpec system;
    std::map<std::string, std::string> params;  // every key of the scenario table
    std::filesystem::path output_dir = ".";
    std::uint64_t seed = 0;

    double number(const std::string& key) const;
    long long integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& text(const std::string& key) const;

    /// Sorted key = value dump of the resolved config, the input to the
    /// config hash.
    std::string canonical() const;
};

/// Full default table of a scenario's [params] section.
const std::map<std::string, std::string>& scenario_defaults(Scenario s);
/// Default [system] values of a scenario.
const std::map<std::string, std::string>& system_defaults(Scenario s);

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace cohertherm::cli

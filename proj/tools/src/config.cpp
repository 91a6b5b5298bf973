#include "cohertherm/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace cohertherm::cli {

namespace {

using Table = std::map<std::string, std::string>;

constexpr Scenario kScenarios[] = {Scenario::trajectories,      Scenario::propagator, Scenario::chaos_tunneling,
                                   Scenario::fluctuation_curve, Scenario::phase_opt,  Scenario::lindblad};

Scenario parse_scenario(std::string_view name)
{
    for (const auto s : kScenarios) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw ConfigError("scenario: unknown scenario '" + std::string(name) + "'");
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& value)
{
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || value.empty()) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    return out;
}

long long parse_integer(const std::string& key, const std::string& value)
{
    long long out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || value.empty()) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    return out;
}

std::uint64_t parse_seed(const std::string& value)
{
    std::uint64_t out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || value.empty()) {
        throw ConfigError("seed: expected a non-negative 64-bit integer, got '" + value + "'");
    }
    return out;
}

const Table kSystemKeys{{"kind", ""},         {"mass", ""},         {"omega", ""}, {"barrier_height", ""},
                        {"well_separation", ""}, {"kick_strength", ""}, {"hbar", ""},  {"k_B", ""}};

Table with_system(Table base, const Table& overrides)
{
    for (const auto& [k, v] : overrides) {
        base[k] = v;
    }
    return base;
}

const Table kBaseSystem{{"kind", "double_well"}, {"mass", "1"},          {"omega", "1"}, {"barrier_height", "1"},
                        {"well_separation", "2"}, {"kick_strength", "0"}, {"hbar", "1"},  {"k_B", "1"}};

dynamics::SystemSpec build_system(const Table& t)
{
    dynamics::SystemSpec s;
    try {
        s.kind = dynamics::parse_system_kind(t.at("kind"));
    } catch (const Error&) {
        throw ConfigError("kind: unknown system kind '" + t.at("kind") + "'");
    }
    s.mass = parse_double("mass", t.at("mass"));
    s.omega = parse_double("omega", t.at("omega"));
    s.barrier_height = parse_double("barrier_height", t.at("barrier_height"));
    s.well_separation = parse_double("well_separation", t.at("well_separation"));
    s.kick_strength = parse_double("kick_strength", t.at("kick_strength"));
    s.hbar = parse_double("hbar", t.at("hbar"));
    s.k_B = parse_double("k_B", t.at("k_B"));
    try {
        s.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("[system] ") + e.what());
    }
    return s;
}

}  // namespace

std::string_view to_string(Scenario s) noexcept
{
    switch (s) {
    case Scenario::trajectories: return "trajectories";
    case Scenario::propagator: return "propagator";
    case Scenario::chaos_tunneling: return "chaos_tunneling";
    case Scenario::fluctuation_curve: return "fluctuation_curve";
    case Scenario::phase_opt: return "phase_opt";
    case Scenario::lindblad: return "lindblad";
    }
    return "unknown";
}

const std::map<std::string, std::string>& scenario_defaults(Scenario s)
{
    static const Table trajectories{{"q_i", "-1"},   {"q_f", "1"},       {"t", "1.4"},
                                    {"p_min", "0"},  {"p_max", "4"},     {"n_seeds", "400"},
                                    {"dt", "0"},     {"sample_stride", "100"}};
    static const Table propagator{{"mode", "packet"}, {"q_i", "-1"},       {"q_f", "1"},          {"t", "1.4"},
                                  {"p_min", "0"},     {"p_max", "4"},      {"n_seeds", "200"},    {"dt", "0"},
                                  {"q0_a", "-1"},     {"p0_a", "2.3"},     {"sigma_a", "0.05"},   {"q0_b", "1"},
                                  {"p0_b", "-0.5"},   {"sigma_b", "0.03"}, {"nodes", "41"},       {"oracle", "true"},
                                  {"oracle_dt", "0"}, {"grid_min", "-12"}, {"grid_max", "12"},    {"grid_points", "1024"}};
    static const Table chaos{{"region_a_lo", "2.6415926535897931"},
                             {"region_a_hi", "3.6415926535897931"},
                             {"region_b_lo", "-0.5"},
                             {"region_b_hi", "0.5"},
                             {"n_kicks", "20"},
                             {"n_seeds", "20000"},
                             {"p_min", "-0.5"},
                             {"p_max", "0.5"},
                             {"points_per_region", "8"},
                             {"oracle", "true"},
                             {"grid_points", "512"}};
    static const Table curve{{"C", "2"},         {"delta_s0", "-1.5"}, {"sigma", "0.5"},
                             {"delta_s_min", "-3"}, {"delta_s_max", "3"}, {"n_points", "121"}};
    static const Table phase{{"components", "3"}, {"ancilla_dim", "0"}, {"method", "analytic"}};
    static const Table lindblad{{"model", "dephasing"}, {"gamma", "0.1"},    {"t", "10"},
                                {"dt", "0.01"},         {"coupling", "1"},   {"site_energy_gap", "1"},
                                {"delta_e", "1"},       {"snapshot_stride", "10"}};
    switch (s) {
    case Scenario::trajectories: return trajectories;
    case Scenario::propagator: return propagator;
    case Scenario::chaos_tunneling: return chaos;
    case Scenario::fluctuation_curve: return curve;
    case Scenario::phase_opt: return phase;
    case Scenario::lindblad: return lindblad;
    }
    return trajectories;
}

const std::map<std::string, std::string>& system_defaults(Scenario s)
{
    static const Table double_well = kBaseSystem;
    static const Table packet_well = with_system(kBaseSystem, {{"hbar", "0.05"}});
    static const Table rotor = with_system(kBaseSystem, {{"kind", "kicked_rotor"}, {"kick_strength", "7"}, {"hbar", "0.05"}});
    switch (s) {
    case Scenario::propagator: return packet_well;
    case Scenario::chaos_tunneling: return rotor;
    default: return double_well;
    }
}

double ScenarioConfig::number(const std::string& key) const
{
    return parse_double(key, params.at(key));
}

long long ScenarioConfig::integer(const std::string& key) const
{
    return parse_integer(key, params.at(key));
}

bool ScenarioConfig::flag(const std::string& key) const
{
    const std::string& v = params.at(key);
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

const std::string& ScenarioConfig::text(const std::string& key) const
{
    return params.at(key);
}

std::string ScenarioConfig::canonical() const
{
    std::ostringstream out;
    out << "scenario = " << to_string(scenario) << '\n' << "seed = " << seed << '\n' << "[system]\n";
    out << "kind = " << dynamics::to_string(system.kind) << '\n';
    const std::pair<const char*, double> fields[] = {
        {"barrier_height", system.barrier_height}, {"hbar", system.hbar}, {"k_B", system.k_B},
        {"kick_strength", system.kick_strength},   {"mass", system.mass}, {"omega", system.omega},
        {"well_separation", system.well_separation}};
    for (const auto& [k, v] : fields) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out << k << " = " << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    }
    out << "[params]\n";
    for (const auto& [k, v] : params) {
        out << k << " = " << v << '\n';
    }
    return out.str();
}

ScenarioConfig parse_config(std::string_view text)
{
    Table top;
    Table system;
    Table params;
    std::string section;
    std::set<std::string> seen;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header '" + line + "'");
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "system" && section != "params") {
                throw ConfigError("[" + section + "]: unknown section");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        const std::string qualified = section.empty() ? key : section + "." + key;
        if (!seen.insert(qualified).second) {
            throw ConfigError(key + ": duplicate key");
        }
        Table& target = section.empty() ? top : (section == "system" ? system : params);
        target[key] = value;
    }

    for (const auto& [k, v] : top) {
        if (k != "scenario" && k != "seed" && k != "output_dir") {
            throw ConfigError(k + ": unknown key");
        }
    }
    if (!top.contains("scenario")) {
        throw ConfigError("scenario: missing required key");
    }

    ScenarioConfig cfg;
    cfg.scenario = parse_scenario(top.at("scenario"));
    if (top.contains("seed")) {
        cfg.seed = parse_seed(top.at("seed"));
    }
    if (top.contains("output_dir")) {
        cfg.output_dir = top.at("output_dir");
    }

    Table sys = system_defaults(cfg.scenario);
    for (const auto& [k, v] : system) {
        if (!kSystemKeys.contains(k)) {
            throw ConfigError(k + ": unknown key in [system]");
        }
        sys[k] = v;
    }
    cfg.system = build_system(sys);

    cfg.params = scenario_defaults(cfg.scenario);
    for (const auto& [k, v] : params) {
        if (!cfg.params.contains(k)) {
            throw ConfigError(k + ": unknown key in [params] for scenario " + std::string(to_string(cfg.scenario)));
        }
        cfg.params[k] = v;
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace cohertherm::cli

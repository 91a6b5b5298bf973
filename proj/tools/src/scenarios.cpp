#include "cohertherm/cli/scenarios.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cohertherm/csv.hpp"
#include "cohertherm/fluctuation.hpp"
#include "cohertherm/opensystem.hpp"
#include "cohertherm/oracle.hpp"
#include "cohertherm/purification.hpp"
#include "cohertherm/rng.hpp"
#include "cohertherm/semiclassics.hpp"

namespace cohertherm::cli {

namespace fs = std::filesystem;

namespace {

class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

    template <typename Write>
    void emit(const std::string& name, Write&& write)
    {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        }
        write(out);
        out.close();
        if (!out) {
            throw std::runtime_error("failed writing " + (dir_ / name).string());
        }
        names_.emplace_back(name);
    }

    const std::vector<fs::path>& names() const noexcept { return names_; }
    const fs::path& dir() const noexcept { return dir_; }

private:
    fs::path dir_;
    std::vector<fs::path> names_;
};

int positive_int(const ScenarioConfig& c, const std::string& key, long long min = 1)
{
    const long long v = c.integer(key);
    if (v < min || v > 100000000) {
        throw ConfigError(key + ": must be an integer >= " + std::to_string(min));
    }
    return static_cast<int>(v);
}

double positive(const ScenarioConfig& c, const std::string& key)
{
    const double v = c.number(key);
    if (!(v > 0.0)) {
        throw ConfigError(key + ": must be > 0");
    }
    return v;
}

Interval window(const ScenarioConfig& c, const std::string& lo, const std::string& hi)
{
    const Interval w{c.number(lo), c.number(hi)};
    if (!(w.hi > w.lo)) {
        throw ConfigError(hi + ": must exceed " + lo);
    }
    return w;
}

void run_trajectories(const ScenarioConfig& c, Artifacts& out)
{
    dynamics::BoundarySearchOptions opt;
    opt.dt = c.number("dt");
    opt.integration.sample_stride = static_cast<std::size_t>(positive_int(c, "sample_stride", 0));
    const auto found = dynamics::find_boundary_trajectories(c.system, c.number("q_i"), c.number("q_f"),
                                                            c.number("t"), window(c, "p_min", "p_max"),
                                                            positive_int(c, "n_seeds", 2), opt);
    for (std::size_t k = 0; k < found.trajectories.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "trajectory_%03zu.csv", k);
        out.emit(name, [&](std::ostream& os) { dynamics::write_trajectory_csv(os, found.trajectories[k]); });
    }
}

void run_propagator(const ScenarioConfig& c, Artifacts& out)
{
    const std::string& mode = c.text("mode");
    const double t = c.number("t");
    if (mode == "point") {
        dynamics::BoundarySearchOptions opt;
        opt.dt = c.number("dt");
        opt.integration.sample_stride = 0;
        const auto found = dynamics::find_boundary_trajectories(c.system, c.number("q_i"), c.number("q_f"), t,
                                                                window(c, "p_min", "p_max"),
                                                                positive_int(c, "n_seeds", 2), opt);
        for (const auto& tr : found.trajectories) {
            dynamics::maslov_and_prefactor(tr, c.system.hbar);
        }
        const auto r = semiclassics::vvg_amplitude(found.trajectories, c.system.hbar);
        out.emit("propagator.csv", [&](std::ostream& os) { semiclassics::write_propagator_csv(os, r); });
        return;
    }
    if (mode != "packet") {
        throw ConfigError("mode: expected point or packet, got '" + mode + "'");
    }
    const semiclassics::GaussianPacket a{c.number("q0_a"), c.number("p0_a"), positive(c, "sigma_a")};
    const semiclassics::GaussianPacket b{c.number("q0_b"), c.number("p0_b"), positive(c, "sigma_b")};
    semiclassics::PacketOptions opt;
    opt.nodes = positive_int(c, "nodes", 3);
    opt.n_seeds = positive_int(c, "n_seeds", 2);
    opt.dt = c.number("dt");
    const auto r = semiclassics::packet_transition_amplitude(c.system, a, b, t, opt);
    out.emit("propagator.csv", [&](std::ostream& os) { semiclassics::write_propagator_csv(os, r); });
    if (c.flag("oracle")) {
        const double odt = c.number("oracle_dt") > 0.0 ? c.number("oracle_dt") : t / 4000.0;
        const auto n = static_cast<std::size_t>(positive_int(c, "grid_points", 64));
        const double hbar = c.system.hbar;
        const auto psi0 = oracle::GridState::from_function(c.number("grid_min"), c.number("grid_max"), n, hbar,
                                                           [&](double q) { return a(q, hbar); });
        const auto psi = oracle::evolve_exact(psi0, c.system, t, odt);
        out.emit("final_state.csv", [&](std::ostream& os) { oracle::write_grid_csv(os, psi); });
    }
}

void run_chaos(const ScenarioConfig& c, Artifacts& out)
{
    semiclassics::ChaosTunnelingOptions opt;
    opt.p_window = window(c, "p_min", "p_max");
    opt.points_per_region = positive_int(c, "points_per_region");
    const Interval ra = window(c, "region_a_lo", "region_a_hi");
    const Interval rb = window(c, "region_b_lo", "region_b_hi");
    const int kicks = positive_int(c, "n_kicks", 0);
    const auto r = semiclassics::chaos_tunneling_probability(c.system, ra, rb, kicks, positive_int(c, "n_seeds", 2), opt);
    std::optional<double> exact;
    if (c.flag("oracle")) {
        exact = oracle::kicked_region_transfer_exact(c.system, ra, rb, kicks, opt.p_window, opt.points_per_region,
                                                     static_cast<std::size_t>(positive_int(c, "grid_points", 64)));
    }
    out.emit("chaos.csv", [&](std::ostream& os) {
        csv::Writer w(os);
        w.header({"quantity", "value"});
        w.row({"semiclassical", csv::format(r.probability)});
        w.row({"coherent_part", csv::format(r.coherent_part)});
        w.row({"incoherent_part", csv::format(r.incoherent_part)});
        if (exact) {
            w.row({"exact", csv::format(*exact)});
        }
        w.row({"refined_trajectories", csv::format(static_cast<long long>(r.refined_trajectories))});
        w.row({"unresolved_roots", csv::format(static_cast<long long>(r.unresolved_roots))});
        w.row({"no_trajectory_found", r.no_trajectory_found ? "1" : "0"});
        w.row({"window_too_coarse", r.window_too_coarse ? "1" : "0"});
    });
}

void run_curve(const ScenarioConfig& c, Artifacts& out)
{
    const fluctuation::StructuredCoherenceModel model{c.number("C"), c.number("delta_s0"), c.number("sigma")};
    try {
        model.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("C/sigma: ") + e.what());
    }
    const auto curve = fluctuation::structured_curve(model, c.number("delta_s_min"), c.number("delta_s_max"),
                                                     positive_int(c, "n_points", 2), c.system.k_B);
    out.emit("ratio_curve.csv", [&](std::ostream& os) { fluctuation::write_ratio_curve_csv(os, curve); });
}

void run_phase(const ScenarioConfig& c, Artifacts& out)
{
    const int n = positive_int(c, "components");
    const long long anc_param = c.integer("ancilla_dim");
    const Eigen::Index anc = anc_param == 0 ? n : anc_param;
    purification::PhaseMethod method{};
    const std::string& m = c.text("method");
    if (m == "analytic") {
        method = purification::PhaseMethod::analytic;
    } else if (m == "gradient") {
        method = purification::PhaseMethod::gradient;
    } else if (m == "grid") {
        method = purification::PhaseMethod::grid;
    } else {
        throw ConfigError("method: expected analytic, gradient or grid, got '" + m + "'");
    }

    Rng rng(c.seed);
    std::vector<double> p(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (auto& x : p) {
        x = rng.uniform(0.05, 1.0);
        sum += x;
    }
    for (auto& x : p) {
        x /= sum;
    }
    const purification::MixedState mixed{p, n};
    const auto state = purification::purify(mixed, anc);
    const auto u = purification::UnitaryMatrix::random(state.joint_dim(), rng);
    CVector target(state.joint_dim());
    for (Eigen::Index i = 0; i < target.size(); ++i) {
        target(i) = rng.complex_normal();
    }
    target.normalize();
    const auto overlaps = purification::component_overlaps(state, u, target);
    const auto best = purification::optimize_phases(state, u, target, method);
    out.emit("phase_report.csv",
             [&](std::ostream& os) { purification::write_phase_report_csv(os, state, overlaps, best); });
}

void run_lindblad(const ScenarioConfig& c, Artifacts& out)
{
    const std::string& model_name = c.text("model");
    const double gamma = c.number("gamma");
    if (!(gamma >= 0.0)) {
        throw ConfigError("gamma: must be >= 0");
    }
    opensystem::LindbladModel model;
    model.hbar = c.system.hbar;
    CMatrix rho0;
    const double de = c.number("delta_e");
    if (model_name == "dephasing" || model_name == "amplitude_damping") {
        CMatrix h = CMatrix::Zero(2, 2);
        h(0, 0) = -0.5 * de;
        h(1, 1) = 0.5 * de;
        model.hamiltonian = h;
        CMatrix l = CMatrix::Zero(2, 2);
        if (model_name == "dephasing") {
            l(0, 0) = -1.0;  // sigma_z with |1> excited
            l(1, 1) = 1.0;
            rho0 = CMatrix::Constant(2, 2, 0.5);
        } else {
            l(0, 1) = 1.0;  // |0><1|
            rho0 = CMatrix::Identity(2, 2) * 0.5;
        }
        model.jump_operators = {l};
        model.rates = {gamma};
    } else if (model_name == "resonant") {
        opensystem::ResonantCoupling rc;
        rc.couplings = RMatrix::Zero(2, 2);
        rc.couplings(0, 1) = rc.couplings(1, 0) = c.number("coupling");
        const double gap = c.number("site_energy_gap");
        rc.site_energies = {0.5 * gap, -0.5 * gap};
        model.hamiltonian = opensystem::build_resonant_hamiltonian(rc);
        for (int s = 0; s < 2; ++s) {
            CMatrix l = CMatrix::Zero(2, 2);
            l(s, s) = 1.0;
            model.jump_operators.push_back(l);
            model.rates.push_back(gamma);
        }
        rho0 = CMatrix::Zero(2, 2);
        rho0(0, 0) = 1.0;
    } else {
        throw ConfigError("model: expected dephasing, amplitude_damping or resonant, got '" + model_name + "'");
    }
    opensystem::LindbladOptions opt;
    opt.snapshot_stride = static_cast<std::size_t>(positive_int(c, "snapshot_stride"));
    const auto snaps = opensystem::evolve_lindblad(DensityMatrix::from_matrix(rho0), model, c.number("t"),
                                                   positive(c, "dt"), opt);
    out.emit("snapshots.csv", [&](std::ostream& os) { opensystem::write_snapshot_csv(os, snaps, c.system.k_B); });
}

void write_manifest(const ScenarioConfig& c, const Artifacts& out, double seconds)
{
    std::ofstream m(out.dir() / "manifest.txt", std::ios::binary | std::ios::trunc);
    m << "scenario " << to_string(c.scenario) << '\n';
    m << "config_hash " << csv::hex(csv::fnv1a(c.canonical())) << '\n';
    m << "seed " << c.seed << '\n';
    m << "wall_time_s " << csv::format(seconds) << '\n';
    for (const auto& name : out.names()) {
        m << "artifact " << name.generic_string() << ' ' << csv::hex(csv::fnv1a_file(out.dir() / name)) << '\n';
    }
    if (!m) {
        throw std::runtime_error("failed writing manifest.txt");
    }
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config)
{
    const auto start = std::chrono::steady_clock::now();
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) {
        throw ConfigError("output_dir: cannot create '" + config.output_dir.string() + "': " + ec.message());
    }
    Artifacts out(config.output_dir);
    switch (config.scenario) {
    case Scenario::trajectories: run_trajectories(config, out); break;
    case Scenario::propagator: run_propagator(config, out); break;
    case Scenario::chaos_tunneling: run_chaos(config, out); break;
    case Scenario::fluctuation_curve: run_curve(config, out); break;
    case Scenario::phase_opt: run_phase(config, out); break;
    case Scenario::lindblad: run_lindblad(config, out); break;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(config, out, seconds);
    return {out.names()};
}

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"Semiclassical and open-system scenario runner"};
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    app.add_option("config", config_path, "Scenario config file")->required();
    auto* out_opt = app.add_option("--output-dir", output_dir, "Directory for CSV artifacts (overrides config)");
    auto* seed_opt = app.add_option("--seed", seed, "64-bit seed (overrides config)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    ScenarioConfig cfg;
    try {
        cfg = load_config(config_path);
        if (*out_opt) {
            cfg.output_dir = output_dir;
        }
        if (*seed_opt) {
            cfg.seed = seed;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }

    try {
        const auto report = run_scenario(cfg);
        std::cout << to_string(cfg.scenario) << ": wrote " << report.artifacts.size() << " artifact(s) to "
                  << cfg.output_dir.string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace cohertherm::cli

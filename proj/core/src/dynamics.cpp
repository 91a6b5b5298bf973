#include "cohertherm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "cohertherm/csv.hpp"
#include "cohertherm/parallel.hpp"

namespace cohertherm::dynamics {

std::string_view to_string(SystemKind kind) noexcept
{
    switch (kind) {
    case SystemKind::free_particle: return "free_particle";
    case SystemKind::harmonic: return "harmonic";
    case SystemKind::double_well: return "double_well";
    case SystemKind::kicked_rotor: return "kicked_rotor";
    }
    return "unknown";
}

SystemKind parse_system_kind(std::string_view name)
{
    for (const auto kind : {SystemKind::free_particle, SystemKind::harmonic, SystemKind::double_well,
                            SystemKind::kicked_rotor}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown system kind '" + std::string(name) + "'");
}

SystemSpec SystemSpec::free_particle(double mass, double hbar)
{
    SystemSpec s;
    s.kind = SystemKind::free_particle;
    s.mass = mass;
    s.hbar = hbar;
    return s;
}

SystemSpec SystemSpec::harmonic(double mass, double omega, double hbar)
{
    SystemSpec s;
    s.kind = SystemKind::harmonic;
    s.mass = mass;
    s.omega = omega;
    s.hbar = hbar;
    return s;
}

SystemSpec SystemSpec::double_well(double barrier_height, double well_separation, double mass, double hbar)
{
    SystemSpec s;
    s.kind = SystemKind::double_well;
    s.barrier_height = barrier_height;
    s.well_separation = well_separation;
    s.mass = mass;
    s.hbar = hbar;
    return s;
}

SystemSpec SystemSpec::kicked_rotor(double kick_strength, double hbar, double mass)
{
    SystemSpec s;
    s.kind = SystemKind::kicked_rotor;
    s.kick_strength = kick_strength;
    s.hbar = hbar;
    s.mass = mass;
    return s;
}

void SystemSpec::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw Error(ErrorCode::InvalidArgument, what);
        }
    };
    require(std::isfinite(mass) && mass > 0.0, "mass must be > 0");
    require(std::isfinite(hbar) && hbar > 0.0, "hbar must be > 0");
    require(std::isfinite(k_B) && k_B > 0.0, "k_B must be > 0");
    require(std::isfinite(kick_strength), "kick_strength must be finite");
    if (kind == SystemKind::harmonic) {
        require(std::isfinite(omega) && omega > 0.0, "omega must be > 0 for harmonic systems");
    }
    if (kind == SystemKind::double_well) {
        require(std::isfinite(barrier_height) && barrier_height > 0.0,
                "barrier_height must be > 0 for double_well systems");
        require(std::isfinite(well_separation) && well_separation > 0.0,
                "well_separation must be > 0 for double_well systems");
    }
}

double SystemSpec::potential(double q) const noexcept
{
    switch (kind) {
    case SystemKind::free_particle: return 0.0;
    case SystemKind::harmonic: return 0.5 * mass * omega * omega * q * q;
    case SystemKind::double_well: {
        const double a = 0.5 * well_separation;
        const double u = (q / a) * (q / a) - 1.0;
        return barrier_height * u * u;
    }
    case SystemKind::kicked_rotor: return kick_strength * std::cos(q);
    }
    return 0.0;
}

double SystemSpec::potential_gradient(double q) const noexcept
{
    switch (kind) {
    case SystemKind::free_particle: return 0.0;
    case SystemKind::harmonic: return mass * omega * omega * q;
    case SystemKind::double_well: {
        const double a2 = 0.25 * well_separation * well_separation;
        return 4.0 * barrier_height * q * (q * q / a2 - 1.0) / a2;
    }
    case SystemKind::kicked_rotor: return -kick_strength * std::sin(q);
    }
    return 0.0;
}

double SystemSpec::potential_curvature(double q) const noexcept
{
    switch (kind) {
    case SystemKind::free_particle: return 0.0;
    case SystemKind::harmonic: return mass * omega * omega;
    case SystemKind::double_well: {
        const double a2 = 0.25 * well_separation * well_separation;
        return 4.0 * barrier_height * (3.0 * q * q / a2 - 1.0) / a2;
    }
    case SystemKind::kicked_rotor: return -kick_strength * std::cos(q);
    }
    return 0.0;
}

double SystemSpec::energy(double q, double p) const noexcept
{
    return 0.5 * p * p / mass + potential(q);
}

namespace {

// Counts conjugate points from the sequence of m21 values. A sign flip
// between consecutive values is one crossing; an exact zero counts once and
// the sign after it starts a fresh run.
class MaslovCounter {
public:
    void update(double m21) noexcept
    {
        if (m21 == 0.0) {
            if (!at_zero_ && last_sign_ != 0) {
                ++count_;
            }
            at_zero_ = true;
            return;
        }
        const int s = m21 > 0.0 ? 1 : -1;
        if (!at_zero_ && last_sign_ != 0 && s != last_sign_) {
            ++count_;
        }
        at_zero_ = false;
        last_sign_ = s;
    }

    int count() const noexcept { return count_; }

private:
    int count_ = 0;
    int last_sign_ = 0;
    bool at_zero_ = false;
};

struct State {
    double q = 0.0;
    double p = 0.0;
    double action = 0.0;
    Stability m;
};

struct StepPlan {
    std::size_t steps = 0;
    double dt = 0.0;
};

StepPlan plan_steps(const SystemSpec& system, double t, double dt)
{
    if (!std::isfinite(t) || t < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "t must be finite and >= 0");
    }
    if (system.is_map()) {
        const double n = std::round(t);
        if (std::abs(n - t) > 1e-9) {
            throw Error(ErrorCode::InvalidArgument, "kicked maps need an integer kick count");
        }
        return {static_cast<std::size_t>(n), 1.0};
    }
    if (t == 0.0) {
        return {0, 0.0};
    }
    const double step = dt > 0.0 ? dt : t / static_cast<double>(kDefaultSteps);
    if (!std::isfinite(step)) {
        throw Error(ErrorCode::InvalidArgument, "dt must be finite");
    }
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(t / step - 1e-9)));
    return {n, t / static_cast<double>(n)};
}

// Exact flow of the quadratic systems evaluated at elapsed time tau.
State quadratic_flow(const SystemSpec& system, double q0, double p0, double tau)
{
    State s;
    const double m = system.mass;
    if (system.kind == SystemKind::free_particle) {
        s.q = q0 + p0 * tau / m;
        s.p = p0;
        s.m = {1.0, 0.0, tau / m, 1.0};
    } else {
        const double w = system.omega;
        const double c = std::cos(w * tau);
        const double sn = std::sin(w * tau);
        s.q = q0 * c + p0 * sn / (m * w);
        s.p = p0 * c - m * w * q0 * sn;
        s.m = {c, -m * w * sn, sn / (m * w), c};
    }
    // Quadratic H: d(pq)/dt = 2L.
    s.action = 0.5 * (s.p * s.q - p0 * q0);
    return s;
}

void verlet_step(const SystemSpec& system, State& s, double dt)
{
    const double m = system.mass;
    const double q0 = s.q;
    const double v0 = system.potential(q0);

    const double c0 = system.potential_curvature(q0);
    double p = s.p - 0.5 * dt * system.potential_gradient(q0);
    double m11 = s.m.m11 - 0.5 * dt * c0 * s.m.m21;
    double m12 = s.m.m12 - 0.5 * dt * c0 * s.m.m22;

    const double q1 = q0 + dt * p / m;
    const double m21 = s.m.m21 + dt * m11 / m;
    const double m22 = s.m.m22 + dt * m12 / m;

    const double c1 = system.potential_curvature(q1);
    p -= 0.5 * dt * system.potential_gradient(q1);
    m11 -= 0.5 * dt * c1 * m21;
    m12 -= 0.5 * dt * c1 * m22;

    const double dq = q1 - q0;
    s.action += 0.5 * m * dq * dq / dt - 0.5 * dt * (v0 + system.potential(q1));
    s.q = q1;
    s.p = p;
    s.m = {m11, m12, m21, m22};
}

void kick_step(const SystemSpec& system, State& s)
{
    const double m = system.mass;
    const double q0 = s.q;
    const double kc = -system.potential_curvature(q0);  // K cos q

    const double p1 = s.p - system.potential_gradient(q0);
    const double m11 = s.m.m11 + kc * s.m.m21;
    const double m12 = s.m.m12 + kc * s.m.m22;
    const double q1 = q0 + p1 / m;
    const double m21 = s.m.m21 + m11 / m;
    const double m22 = s.m.m22 + m12 / m;

    s.action += 0.5 * p1 * p1 / m - system.potential(q0);
    s.q = q1;
    s.p = p1;
    s.m = {m11, m12, m21, m22};
}

// Drives the integration; visit(k, time, state, maslov) is called for the
// initial state (k = 0) and after every step.
template <typename Visit>
State run(const SystemSpec& system, double q0, double p0, double t, double dt, Visit&& visit)
{
    system.validate();
    if (!std::isfinite(q0) || !std::isfinite(p0)) {
        throw Error(ErrorCode::NonFiniteState, "initial condition is not finite");
    }
    const StepPlan plan = plan_steps(system, t, dt);
    State s;
    s.q = q0;
    s.p = p0;
    MaslovCounter maslov;
    visit(std::size_t{0}, 0.0, s, 0, plan.steps);

    const bool quadratic =
        system.kind == SystemKind::free_particle || system.kind == SystemKind::harmonic;
    for (std::size_t k = 1; k <= plan.steps; ++k) {
        const double time = k == plan.steps && !system.is_map() ? t : static_cast<double>(k) * plan.dt;
        if (quadratic) {
            s = quadratic_flow(system, q0, p0, time);
        } else if (system.is_map()) {
            kick_step(system, s);
        } else {
            verlet_step(system, s, plan.dt);
        }
        if (!std::isfinite(s.q) || !std::isfinite(s.p) || !std::isfinite(s.action) ||
            !std::isfinite(s.m.m21) || !std::isfinite(s.m.m11)) {
            throw Error(ErrorCode::NonFiniteState,
                        "state left the representable range at t = " + csv::format(time));
        }
        maslov.update(s.m.m21);
        visit(k, time, s, maslov.count(), plan.steps);
    }
    return s;
}

}  // namespace

Trajectory integrate_trajectory(const SystemSpec& system, double q0, double p0, double t, double dt,
                                const IntegrationOptions& options)
{
    Trajectory traj;
    traj.q_i = q0;
    traj.p_i = p0;
    traj.t = t;
    int last_maslov = 0;
    const State end = run(system, q0, p0, t, dt,
                          [&](std::size_t k, double time, const State& s, int nu, std::size_t steps) {
                              last_maslov = nu;
                              const bool keep = k == 0 || k == steps ||
                                                (options.sample_stride > 0 && k % options.sample_stride == 0);
                              if (keep) {
                                  traj.samples.push_back({time, s.q, s.p, s.action, s.m, nu});
                              }
                          });
    traj.q_f = end.q;
    traj.p_f = end.p;
    traj.action = end.action;
    traj.stability = end.m;
    traj.maslov_index = last_maslov;
    if (system.is_map()) {
        traj.n_kicks = static_cast<int>(std::lround(t));
    }
    return traj;
}

Endpoint propagate_endpoint(const SystemSpec& system, double q0, double p0, double t, double dt)
{
    int last_maslov = 0;
    const State end = run(system, q0, p0, t, dt,
                          [&](std::size_t, double, const State&, int nu, std::size_t) { last_maslov = nu; });
    return {end.q, end.p, end.action, end.m, last_maslov};
}

namespace {

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double target = 0.0;
    int winding = 0;
};

struct Root {
    double p = 0.0;
    int winding = 0;
    bool ok = false;
};

Root refine(const SystemSpec& system, double q_i, double t, const Bracket& b, double f_lo, double f_hi,
            const BoundarySearchOptions& opt)
{
    double a = b.lo;
    double c = b.hi;
    double fa = f_lo;
    double p = a + (c - a) * fa / (fa - f_hi);
    if (!(p > a && p < c)) {
        p = 0.5 * (a + c);
    }
    const double strict = 1e-13 * std::max(1.0, std::abs(b.target));
    const double eps = std::numeric_limits<double>::epsilon();
    double f = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        const Endpoint e = propagate_endpoint(system, q_i, p, t, opt.dt);
        f = e.q - b.target;
        if (std::abs(f) <= strict) {
            break;
        }
        if ((f < 0.0) == (fa < 0.0)) {
            a = p;
            fa = f;
        } else {
            c = p;
        }
        // Bracket down to a few ulp: q(p) cannot be resolved any further.
        if (std::abs(c - a) <= 4.0 * eps * std::max({std::abs(a), std::abs(c), 1e-300})) {
            break;
        }
        double next = e.stability.m21 != 0.0 ? p - f / e.stability.m21 : 0.5 * (a + c);
        if (!(next > std::min(a, c) && next < std::max(a, c))) {
            next = 0.5 * (a + c);
        }
        p = next;
    }
    return {p, b.winding, std::abs(f) < opt.refine_tolerance};
}

}  // namespace

SeedScan scan_seeds(const SystemSpec& system, double q_i, double t, Interval p_window, int n_seeds, double dt,
                    unsigned threads)
{
    system.validate();
    if (n_seeds < 2) {
        throw Error(ErrorCode::InvalidArgument, "n_seeds must be >= 2");
    }
    if (!(p_window.hi > p_window.lo)) {
        throw Error(ErrorCode::InvalidArgument, "momentum window is degenerate");
    }
    const auto n = static_cast<std::size_t>(n_seeds);
    SeedScan scan;
    scan.q_i = q_i;
    scan.t = t;
    scan.p.resize(n);
    scan.q.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        scan.p[s] = p_window.lo + p_window.width() * static_cast<double>(s) / static_cast<double>(n - 1);
    }
    parallel_for(
        n, [&](std::size_t s) { scan.q[s] = propagate_endpoint(system, q_i, scan.p[s], t, dt).q; }, threads);
    return scan;
}

BoundarySearchResult find_boundary_trajectories(const SystemSpec& system, double q_i, double q_f, double t,
                                                Interval p_window, int n_seeds,
                                                const BoundarySearchOptions& options)
{
    const SeedScan scan = scan_seeds(system, q_i, t, p_window, n_seeds, options.dt, options.threads);
    return find_boundary_trajectories(system, scan, q_f, options);
}

BoundarySearchResult find_boundary_trajectories(const SystemSpec& system, const SeedScan& scan, double q_f,
                                                const BoundarySearchOptions& options)
{
    system.validate();
    const double q_i = scan.q_i;
    const double t = scan.t;
    const std::size_t n = scan.p.size();
    const std::vector<double>& seeds = scan.p;
    const std::vector<double>& q_end = scan.q;
    BoundarySearchResult result;
    std::vector<Root> roots;
    std::vector<Bracket> brackets;
    std::vector<std::pair<double, double>> bracket_values;

    const bool circle = system.is_map();
    auto winding_of = [&](double q) { return static_cast<int>(std::lround((q - q_f) / kTwoPi)); };
    for (std::size_t s = 0; s < n; ++s) {
        const double q = q_end[s];
        if (circle) {
            const double level = q_f + kTwoPi * winding_of(q);
            if (q == level) {
                roots.push_back({seeds[s], winding_of(q), true});
            }
        } else if (q == q_f) {
            roots.push_back({seeds[s], 0, true});
        }
        if (s + 1 == n) {
            break;
        }
        const double q_next = q_end[s + 1];
        if (!circle) {
            const double f0 = q - q_f;
            const double f1 = q_next - q_f;
            if (f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
                brackets.push_back({seeds[s], seeds[s + 1], q_f, 0});
                bracket_values.emplace_back(f0, f1);
            }
            continue;
        }
        const double lo = std::min(q, q_next);
        const double hi = std::max(q, q_next);
        const auto w_lo = static_cast<long long>(std::floor((lo - q_f) / kTwoPi)) + 1;
        const auto w_hi = static_cast<long long>(std::ceil((hi - q_f) / kTwoPi)) - 1;
        if (w_hi < w_lo) {
            continue;
        }
        const auto count = static_cast<std::size_t>(w_hi - w_lo + 1);
        if (count > 1) {
            result.window_too_coarse = true;
        }
        if (count > options.max_windings_per_bracket) {
            result.unresolved.push_back({seeds[s], seeds[s + 1], q, q_next, count});
            continue;
        }
        for (long long w = w_lo; w <= w_hi; ++w) {
            const double level = q_f + kTwoPi * static_cast<double>(w);
            brackets.push_back({seeds[s], seeds[s + 1], level, static_cast<int>(w)});
            bracket_values.emplace_back(q - level, q_next - level);
        }
    }

    std::vector<Root> refined(brackets.size());
    parallel_for(
        brackets.size(),
        [&](std::size_t i) {
            refined[i] = refine(system, q_i, t, brackets[i], bracket_values[i].first, bracket_values[i].second,
                                options);
        },
        options.threads);
    for (const auto& r : refined) {
        if (r.ok) {
            roots.push_back(r);
        }
    }

    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        return a.p < b.p || (a.p == b.p && a.winding < b.winding);
    });
    std::vector<Root> unique;
    for (const auto& r : roots) {
        const bool duplicate = std::any_of(unique.rbegin(), unique.rend(), [&](const Root& u) {
            return u.winding == r.winding && std::abs(u.p - r.p) < options.dedup_tolerance;
        });
        if (duplicate) {
            result.window_too_coarse = true;
            continue;
        }
        unique.push_back(r);
    }

    result.trajectories.resize(unique.size());
    parallel_for(
        unique.size(),
        [&](std::size_t i) {
            result.trajectories[i] = integrate_trajectory(system, q_i, unique[i].p, t, options.dt, options.integration);
        },
        options.threads);
    return result;
}

double classical_action(const Trajectory& trajectory) noexcept
{
    return trajectory.action;
}

MaslovPrefactor maslov_and_prefactor(const Trajectory& trajectory, double hbar)
{
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "hbar must be > 0");
    }
    const double m21 = trajectory.stability.m21;
    if (std::abs(m21) < kCausticThreshold) {
        throw Error(ErrorCode::CausticAtEndpoint,
                    "dq_f/dp_i = " + csv::format(m21) + " at t = " + csv::format(trajectory.t));
    }
    return {trajectory.maslov_index, 1.0 / std::sqrt(kTwoPi * hbar * std::abs(m21))};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory)
{
    csv::Writer w(out);
    w.header({"time", "q", "p", "action_so_far", "m11", "m12", "m21", "m22", "maslov"});
    for (const auto& s : trajectory.samples) {
        w.row({csv::format(s.time), csv::format(s.q), csv::format(s.p), csv::format(s.action),
               csv::format(s.stability.m11), csv::format(s.stability.m12), csv::format(s.stability.m21),
               csv::format(s.stability.m22), csv::format(static_cast<long long>(s.maslov))});
    }
}

}  // namespace cohertherm::dynamics

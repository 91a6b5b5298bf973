#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cohertherm/common.hpp"

namespace cohertherm::dynamics {

enum class SystemKind { free_particle, harmonic, double_well, kicked_rotor };

std::string_view to_string(SystemKind kind) noexcept;
SystemKind parse_system_kind(std::string_view name);

/// One-dimensional Hamiltonian system.
///
/// Potentials:
///   free_particle  V = 0
///   harmonic       V = m omega^2 q^2 / 2
///   double_well    V = h ((q/a)^2 - 1)^2, h = barrier_height, a = well_separation / 2
///   kicked_rotor   H = p^2 / 2m + K cos(q) sum_n delta(t - n), unit kick period,
///                  q taken on the circle [0, 2 pi)
struct SystemSpec {
    SystemKind kind = SystemKind::free_particle;
    double mass = 1.0;
    double omega = 1.0;
    double barrier_height = 1.0;
    double well_separation = 2.0;
    double kick_strength = 0.0;
    double hbar = 1.0;
    double k_B = 1.0;

    static SystemSpec free_particle(double mass = 1.0, double hbar = 1.0);
    static SystemSpec harmonic(double mass = 1.0, double omega = 1.0, double hbar = 1.0);
    static SystemSpec double_well(double barrier_height = 1.0, double well_separation = 2.0,
                                  double mass = 1.0, double hbar = 1.0);
    static SystemSpec kicked_rotor(double kick_strength, double hbar = 1.0, double mass = 1.0);

    /// Throws Error(InvalidArgument) when a field breaks its invariant.
    void validate() const;

    bool is_map() const noexcept { return kind == SystemKind::kicked_rotor; }

    /// For kicked_rotor these return the kick potential K cos q and its derivatives.
    double potential(double q) const noexcept;
    double potential_gradient(double q) const noexcept;
    double potential_curvature(double q) const noexcept;

    /// Continuous systems only.
    double energy(double q, double p) const noexcept;
};

/// Linearised flow (monodromy) in (p, q) ordering:
///
///   [ dp/dp0  dp/dq0 ]   [ m11 m12 ]
///   [ dq/dp0  dq/dq0 ] = [ m21 m22 ]
///
/// so m21 = dq_f/dp_i, whose zeros are the conjugate points and which gives
/// d^2 S / dq_i dq_f = -1 / m21.
struct Stability {
    double m11 = 1.0;
    double m12 = 0.0;
    double m21 = 0.0;
    double m22 = 1.0;

    double det() const noexcept { return m11 * m22 - m12 * m21; }
};

struct TrajectorySample {
    double time = 0.0;
    double q = 0.0;
    double p = 0.0;
    double action = 0.0;  // accumulated up to this sample
    Stability stability;
    int maslov = 0;
};

/// A classical path. For kicked maps q is unwrapped (it is not reduced mod
/// 2 pi), n_kicks is the step count and t == n_kicks.
struct Trajectory {
    double q_i = 0.0;
    double p_i = 0.0;
    double q_f = 0.0;
    double p_f = 0.0;
    double t = 0.0;
    int n_kicks = 0;
    double action = 0.0;
    int maslov_index = 0;
    Stability stability;
    std::vector<TrajectorySample> samples;
};

struct IntegrationOptions {
    /// Keep every n-th step in Trajectory::samples (the final state is
    /// always kept). 0 keeps only the endpoints.
    std::size_t sample_stride = 1;
};

/// Default step: t / 10^4.
inline constexpr std::size_t kDefaultSteps = 10000;

/// Integrates from (q0, p0) for time t. Continuous systems use fixed steps of
/// size dt (dt <= 0 selects t / 10^4; the step is shrunk so that an integer
/// number of steps spans t exactly). Kicked maps read t as the kick count.
///
/// Double well: velocity Verlet with the discrete Lagrangian as action.
/// Free particle and harmonic oscillator: the exact flow evaluated at each
/// step time. Kicked rotor: exact map (kick, then unit free flight).
Trajectory integrate_trajectory(const SystemSpec& system, double q0, double p0, double t,
                                double dt = 0.0, const IntegrationOptions& options = {});

/// Endpoint-only propagation used by the boundary search.
struct Endpoint {
    double q = 0.0;
    double p = 0.0;
    double action = 0.0;
    Stability stability;
    int maslov = 0;
};
Endpoint propagate_endpoint(const SystemSpec& system, double q0, double p0, double t, double dt = 0.0);

struct BoundarySearchOptions {
    double dt = 0.0;
    /// Accept a refined root when |q(t) - q_f| < this.
    double refine_tolerance = 1e-10;
    /// Roots closer than this in p_i are the same trajectory.
    double dedup_tolerance = 1e-8;
    /// Kicked maps: a seed interval that crosses more than this many
    /// windings of q_f is left unrefined (flagged as too coarse).
    std::size_t max_windings_per_bracket = 8;
    IntegrationOptions integration{.sample_stride = 0};
    unsigned threads = 0;
};

/// A seed interval whose image crosses too many windings to refine. It
/// certifies at least `windings` roots between p_lo and p_hi.
struct UnresolvedInterval {
    double p_lo = 0.0;
    double p_hi = 0.0;
    double q_lo = 0.0;  // q(t) at p_lo
    double q_hi = 0.0;  // q(t) at p_hi
    std::size_t windings = 0;
};

struct BoundarySearchResult {
    std::vector<Trajectory> trajectories;  // ascending p_i
    /// Adjacent seeds bracketed more than one root: some were merged or
    /// skipped, so the census may be incomplete.
    bool window_too_coarse = false;
    std::vector<UnresolvedInterval> unresolved;
};

/// Endpoints q(t) of n_seeds evenly spaced initial momenta.
struct SeedScan {
    double q_i = 0.0;
    double t = 0.0;
    std::vector<double> p;
    std::vector<double> q;
};
SeedScan scan_seeds(const SystemSpec& system, double q_i, double t, Interval p_window, int n_seeds,
                    double dt = 0.0, unsigned threads = 0);

/// All isolated solutions p_i of q(t; q_i, p_i) = q_f in the momentum window,
/// found by sign bracketing over n_seeds evenly spaced momenta and
/// safeguarded Newton refinement. On the circle every winding q_f + 2 pi w
/// is a separate target. An empty result is valid.
BoundarySearchResult find_boundary_trajectories(const SystemSpec& system, double q_i, double q_f,
                                                double t, Interval p_window, int n_seeds,
                                                const BoundarySearchOptions& options = {});

/// Same search reusing a scan, so several q_f can share one seed sweep.
BoundarySearchResult find_boundary_trajectories(const SystemSpec& system, const SeedScan& scan, double q_f,
                                                const BoundarySearchOptions& options = {});

double classical_action(const Trajectory& trajectory) noexcept;

struct MaslovPrefactor {
    int nu = 0;
    double prefactor_magnitude = 0.0;  // (2 pi hbar |m21|)^(-1/2)
};

inline constexpr double kCausticThreshold = 1e-12;

/// Throws Error(CausticAtEndpoint) when |m21| < 1e-12.
MaslovPrefactor maslov_and_prefactor(const Trajectory& trajectory, double hbar);

/// CSV: time,q,p,action_so_far,m11,m12,m21,m22,maslov
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace cohertherm::dynamics

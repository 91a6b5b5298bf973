#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "cohertherm/common.hpp"
#include "cohertherm/dynamics.hpp"

namespace cohertherm::semiclassics {

/// One term A e^{i phase} of the propagator sum.
///
/// The (2 pi i hbar)^(-1/2) normalisation contributes a global e^{-i pi/4}
/// that is applied to every term in amplitude(); `phase` itself is
/// action / hbar - (pi / 2) maslov_index.
struct TrajectoryContribution {
    std::size_t branch_index = 0;
    double amplitude_magnitude = 0.0;
    double action = 0.0;
    int maslov_index = 0;
    double phase = 0.0;

    Complex amplitude() const;
};

TrajectoryContribution make_contribution(double amplitude_magnitude, double action, int maslov_index,
                                         double hbar, std::size_t branch_index = 0);

struct PropagatorResult {
    Complex total_amplitude{0.0, 0.0};
    std::vector<TrajectoryContribution> contributions;  // ascending action
    double diagonal_sum = 0.0;
    double cross_sum = 0.0;
};

/// Sorts by action, then forms the total, sum |A|^2 and the pair sum
/// sum_{a != b} A_a conj(A_b) with compensated accumulation.
PropagatorResult assemble(std::vector<TrajectoryContribution> contributions);

/// Van Vleck-Gutzwiller kernel K(q_f, q_i; t) from a boundary-trajectory set.
/// Throws EmptyTrajectorySet, CausticContribution, or InvalidArgument when
/// the trajectories do not share endpoints and time.
PropagatorResult vvg_amplitude(const std::vector<dynamics::Trajectory>& trajectories, double hbar);

struct TransitionProbability {
    double p_total = 0.0;
    double p_classical = 0.0;
    double p_interference = 0.0;
};

TransitionProbability transition_probability(const PropagatorResult& result) noexcept;

/// psi(q) = (2 pi sigma^2)^(-1/4) exp(-(q - q0)^2 / (4 sigma^2) + i p0 (q - q0) / hbar)
struct GaussianPacket {
    double q0 = 0.0;
    double p0 = 0.0;
    double sigma = 1.0;

    Complex operator()(double q, double hbar) const;
};

struct PacketOptions {
    /// Trapezoid nodes per packet, spanning +/- extent_sigmas.
    int nodes = 41;
    double extent_sigmas = 6.0;
    /// Momentum window for the root search; a zero-width window selects
    /// p0 +/- 5 hbar / (2 sigma) of the initial packet.
    Interval p_window{0.0, 0.0};
    int n_seeds = 400;
    double dt = 0.0;
    unsigned threads = 0;
};

/// Semiclassical <to| U(t) |from> for a continuous system.
///
/// The kernel is integrated against both packets on a trapezoid grid. Roots
/// found at each node pair are labelled by their rank in p_i, and each rank
/// is one branch of the result. A branch's magnitude and phase are those of
/// its smeared amplitude; its Maslov index is taken from the trajectory at
/// the heaviest node pair, and its action is the effective action
/// hbar (arg A + pi/4 + pi nu / 2) chosen on the 2 pi hbar sheet nearest that
/// trajectory's own action.
PropagatorResult packet_transition_amplitude(const dynamics::SystemSpec& system, const GaussianPacket& from,
                                             const GaussianPacket& to, double t,
                                             const PacketOptions& options = {});

struct ChaosTunnelingOptions {
    /// Initial momenta are restricted to this window; region states are
    /// the corresponding band-limited position eigenstates.
    Interval p_window{-0.5, 0.5};
    int points_per_region = 8;
    std::size_t max_windings_per_bracket = 8;
    unsigned threads = 0;
};

struct ChaosTunnelingResult {
    double probability = 0.0;
    /// Parts of `probability` from refined trajectories (coherent sum) and
    /// from the remaining seed density (counted incoherently).
    double coherent_part = 0.0;
    double incoherent_part = 0.0;
    std::size_t refined_trajectories = 0;
    std::size_t unresolved_roots = 0;
    bool no_trajectory_found = false;
    bool window_too_coarse = false;
};

/// Probability of moving from region_a to region_b of the kicked rotor in
/// n_kicks kicks.
///
/// A point a of region_a stands for the band-limited state
/// sqrt(2 pi hbar / dp) P_w |a>, so the density at b is
/// (2 pi hbar / dp) |sum_alpha K_alpha(b, a)|^2 over trajectories with p_i in
/// the window. The result is width(region_b) times the mean density over the
/// points_per_region^2 pairs of cell-centre points.
///
/// In chaotic regimes most roots are too unstable to refine. Their share of
/// the diagonal sum (1/dp) sum 1/|m21| is estimated from the fraction of
/// seeds that land in b's cell, and whatever the refined roots do not
/// account for is added incoherently.
/// An empty census returns 0 with no_trajectory_found set.
ChaosTunnelingResult chaos_tunneling_probability(const dynamics::SystemSpec& system, Interval region_a,
                                                 Interval region_b, int n_kicks, int n_seeds,
                                                 const ChaosTunnelingOptions& options = {});

/// Cell-centre representative points of a region.
std::vector<double> representative_points(Interval region, int count);
/// Whether q lies in region, reading both on the circle.
bool on_circle_in(double q, Interval region) noexcept;

/// CSV: branch_index,action,maslov,amplitude_magnitude,phase and a final row
/// TOTAL,re,im,p_classical,p_interference.
void write_propagator_csv(std::ostream& out, const PropagatorResult& result);

}  // namespace cohertherm::semiclassics

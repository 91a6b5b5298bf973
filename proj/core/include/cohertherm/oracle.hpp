#pragma once

#include <functional>
#include <iosfwd>

#include "cohertherm/common.hpp"
#include "cohertherm/dynamics.hpp"

namespace cohertherm::oracle {

/// Wavefunction sampled on the periodic grid q_j = grid_min + j dq,
/// dq = (grid_max - grid_min) / n_points, j = 0 .. n_points - 1.
class GridState {
public:
    /// Samples f and rescales so that sum |psi_j|^2 dq = 1.
    static GridState from_function(double grid_min, double grid_max, std::size_t n_points, double hbar,
                                   const std::function<Complex(double)>& f);
    /// Throws InvalidArgument unless the amplitudes are normalised within 1e-10.
    static GridState from_amplitudes(double grid_min, double grid_max, double hbar, CVector amplitudes);

    double grid_min() const noexcept { return grid_min_; }
    double grid_max() const noexcept { return grid_max_; }
    std::size_t n_points() const noexcept { return static_cast<std::size_t>(psi_.size()); }
    double hbar() const noexcept { return hbar_; }
    double dq() const noexcept { return (grid_max_ - grid_min_) / static_cast<double>(psi_.size()); }
    double q(std::size_t j) const noexcept { return grid_min_ + dq() * static_cast<double>(j); }
    const CVector& amplitudes() const noexcept { return psi_; }

    double norm() const;
    /// sum conj(this_j) other_j dq. Throws GridMismatch.
    Complex inner(const GridState& other) const;
    bool same_grid(const GridState& other) const noexcept;

private:
    GridState(double grid_min, double grid_max, double hbar, CVector psi);
    friend GridState with_amplitudes(const GridState& like, CVector psi);

    double grid_min_ = 0.0;
    double grid_max_ = 0.0;
    double hbar_ = 1.0;
    CVector psi_;
};

/// Copy of the grid of `like` carrying new amplitudes (no normalisation check).
GridState with_amplitudes(const GridState& like, CVector psi);

inline constexpr double kDefaultGridMin = -12.0;
inline constexpr double kDefaultGridMax = 12.0;
inline constexpr std::size_t kDefaultGridPoints = 1024;
inline constexpr std::size_t kDefaultKickedGridPoints = 512;

/// Strang split-step propagation: half potential step, full kinetic step in
/// momentum space, half potential step. Steps of dt (shortened so an integer
/// number spans t). Throws BoundaryLeak once more than 1e-6 of the probability
/// sits in the outer 5% of the grid (both ends together).
GridState evolve_exact(const GridState& state, const dynamics::SystemSpec& system, double t, double dt);

/// n_kicks applications of U = exp(-i hbar k^2 / 2m) exp(-i K cos q / hbar).
/// The grid must be [0, 2 pi).
GridState evolve_kicked_exact(const GridState& state, const dynamics::SystemSpec& system, int n_kicks);

/// |<final| U(t) |initial>|^2. Kicked maps read t as the kick count and
/// ignore dt. Throws GridMismatch.
double transition_probability_exact(const GridState& initial, const GridState& final,
                                    const dynamics::SystemSpec& system, double t, double dt);

/// Dense H = T + V on the grid, with T the spectral kinetic operator used by
/// evolve_exact (real symmetric).
RMatrix grid_hamiltonian(const dynamics::SystemSpec& system, double grid_min, double grid_max,
                         std::size_t n_points);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};
Moments position_moments(const GridState& state);
/// Moments of p = hbar k from the discrete Fourier coefficients.
Moments momentum_moments(const GridState& state);

/// Probability in the (circular, when the grid is [0, 2 pi)) interval.
double region_probability(const GridState& state, Interval region);

/// Exact counterpart of semiclassics::chaos_tunneling_probability: each
/// cell-centre point a of region_a is the band-limited state with momenta
/// hbar k in p_window; the result is the mean over a of the probability in
/// region_b after n_kicks.
double kicked_region_transfer_exact(const dynamics::SystemSpec& system, Interval region_a, Interval region_b,
                                    int n_kicks, Interval p_window, int points_per_region = 8,
                                    std::size_t n_points = kDefaultKickedGridPoints);

/// CSV: q,re_psi,im_psi,prob_density
void write_grid_csv(std::ostream& out, const GridState& state);

}  // namespace cohertherm::oracle

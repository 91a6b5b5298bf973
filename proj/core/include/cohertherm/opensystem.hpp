#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "cohertherm/common.hpp"
#include "cohertherm/density_matrix.hpp"

namespace cohertherm::opensystem {

/// exp(-i H t / hbar) rho exp(i H t / hbar) from the eigendecomposition of H.
/// Throws DimensionMismatch or NotHermitian.
DensityMatrix evolve_von_neumann(const DensityMatrix& rho, const CMatrix& h, double t, double hbar = 1.0);

/// d rho/dt = -(i/hbar)[H, rho] + sum_k gamma_k (L rho L^dagger - {L^dagger L, rho} / 2)
struct LindbladModel {
    CMatrix hamiltonian;
    std::vector<CMatrix> jump_operators;
    std::vector<double> rates;
    double hbar = 1.0;

    void validate() const;
    /// Right-hand side of the master equation.
    CMatrix generator(const CMatrix& rho) const;
};

struct Snapshot {
    double time = 0.0;
    DensityMatrix rho;
};

struct LindbladOptions {
    /// Keep every n-th step (the initial and final states are always kept).
    std::size_t snapshot_stride = 1;
};

/// Fixed-step RK4 with re-hermitisation after each step. The step is shrunk
/// so an integer number of steps spans t.
///
/// Throws StabilityViolation when dt max(gamma_k, rho(H) / hbar) >= 0.1 and
/// PositivityLoss when a kept snapshot has an eigenvalue below -1e-6.
std::vector<Snapshot> evolve_lindblad(const DensityMatrix& rho, const LindbladModel& model, double t, double dt,
                                      const LindbladOptions& options = {});

/// Orthogonal projector P = P^dagger = P^2.
class CoherentSubspace {
public:
    /// Throws InvalidArgument unless P is a Hermitian (1e-12) idempotent (1e-10).
    static CoherentSubspace from_projector(CMatrix p);
    /// Projector onto the span of the given columns (orthonormalised first).
    static CoherentSubspace from_basis(const CMatrix& columns);

    const CMatrix& projector() const noexcept { return p_; }

private:
    explicit CoherentSubspace(CMatrix p) : p_(std::move(p)) {}
    CMatrix p_;
};

struct Projection {
    CMatrix projected;  // P rho P, not renormalised
    double weight = 0.0;
};

Projection project_coherent_subspace(const DensityMatrix& rho, const CoherentSubspace& sub);

/// Sites coupled by hopping J_mn. site_energies (empty for none) adds
/// sum_m e_m |m><m|, which gives a site its low-energy role in scenarios.
struct ResonantCoupling {
    RMatrix couplings;
    std::vector<double> site_energies;

    Eigen::Index site_count() const noexcept { return couplings.rows(); }
};

/// sum_{m<n} J_mn (|m><n| + |n><m|) + diag(site_energies).
/// Throws AsymmetricCouplings for an asymmetric J or a non-zero diagonal.
CMatrix build_resonant_hamiltonian(const ResonantCoupling& coupling);

struct PhononCoupling {
    Eigen::Index site_count = 1;
    std::vector<double> mode_frequencies;
    RMatrix couplings;  // site_count x mode_count
    int fock_cutoff = 4;
    bool include_free_phonons = false;
    double hbar = 1.0;
};

/// sum_{j,k} g_jk |j><j| (x) (b_k + b_k^dagger) on sites (x) modes, site index
/// slowest and the first mode slowest among the modes; each mode keeps
/// fock_cutoff levels. With include_free_phonons, adds sum_k hbar w_k b_k^dagger b_k.
/// Throws CutoffTooSmall when fock_cutoff < 2.
CMatrix build_phonon_hamiltonian(const PhononCoupling& coupling);

/// (time, von Neumann entropy) per snapshot.
std::vector<std::pair<double, double>> entropy_trace(const std::vector<Snapshot>& snapshots, double k_B = 1.0);

/// CSV: time,entropy,purity,pop_0,...,pop_{d-1},abs_coh_max
void write_snapshot_csv(std::ostream& out, const std::vector<Snapshot>& snapshots, double k_B = 1.0);

}  // namespace cohertherm::opensystem

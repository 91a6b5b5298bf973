#pragma once

#include <iosfwd>
#include <vector>

#include "cohertherm/common.hpp"
#include "cohertherm/density_matrix.hpp"
#include "cohertherm/rng.hpp"

namespace cohertherm::purification {

/// Diagonal mixed state sum_i p_i |s_i><s_i| over the first probabilities.size()
/// basis states of a system_dim-dimensional space.
struct MixedState {
    std::vector<double> probabilities;
    Eigen::Index system_dim = 0;

    /// Throws InvalidArgument unless every p_i > 0, sum = 1 within 1e-12 and
    /// the count fits in system_dim.
    void validate() const;
    DensityMatrix density_matrix() const;
};

/// sum_i sqrt(p_i) e^{i phi_i} |s_i>|a_i>. Joint basis index is
/// s * ancilla_dim + a (system-major), so component i sits at
/// i * ancilla_dim + i.
struct PurifiedState {
    std::vector<double> probabilities;
    std::vector<double> phases;
    Eigen::Index system_dim = 0;
    Eigen::Index ancilla_dim = 0;

    Eigen::Index joint_dim() const noexcept { return system_dim * ancilla_dim; }
    Eigen::Index joint_index(std::size_t component) const noexcept
    {
        const auto i = static_cast<Eigen::Index>(component);
        return i * ancilla_dim + i;
    }
    CVector joint_vector() const;
};

class UnitaryMatrix {
public:
    /// Throws NotUnitary unless max |U^dagger U - I| <= 1e-10.
    static UnitaryMatrix from_matrix(CMatrix u);
    static UnitaryMatrix identity(Eigen::Index dim);
    /// Modified Gram-Schmidt on the columns of a complex Gaussian matrix.
    static UnitaryMatrix random(Eigen::Index dim, Rng& rng);

    Eigen::Index dim() const noexcept { return u_.rows(); }
    const CMatrix& matrix() const noexcept { return u_; }

private:
    explicit UnitaryMatrix(CMatrix u) : u_(std::move(u)) {}
    CMatrix u_;
};

/// Phases all zero. Throws AncillaTooSmall when ancilla_dim < component count.
PurifiedState purify(const MixedState& mixed, Eigen::Index ancilla_dim);

/// Throws LengthMismatch.
PurifiedState apply_phases(const PurifiedState& state, const std::vector<double>& phases);

DensityMatrix joint_density_matrix(const PurifiedState& state);

/// M_i = <target| U |s_i a_i>. Throws DimensionMismatch or TargetNotNormalized.
std::vector<Complex> component_overlaps(const PurifiedState& state, const UnitaryMatrix& u, const CVector& target);

/// |sum_i sqrt(p_i) e^{i phi_i} M_i|^2
double transition_probability(const PurifiedState& state, const UnitaryMatrix& u, const CVector& target);

/// dP/dphi_k = 2 Re(conj(z) i w_k) = -2 Im(conj(z) w_k), with
/// w_k = sqrt(p_k) e^{i phi_k} M_k and z = sum_k w_k.
std::vector<double> phase_gradient(const PurifiedState& state, const UnitaryMatrix& u, const CVector& target);

enum class PhaseMethod { analytic, gradient, grid };

struct PhaseOptimum {
    std::vector<double> phases;
    double probability = 0.0;
    int iterations = 0;
};

/// analytic: phi_i = -arg M_i (0 where M_i = 0), P* = (sum sqrt(p_i) |M_i|)^2.
/// gradient: ascent from phi = 0 with a backtracking line search.
/// grid: exhaustive search with step pi/32, phi_1 pinned at 0 (a global phase
/// leaves P unchanged); ties go to the lexicographically smallest phases.
/// Throws GridTooLarge for grid search over more than 4 components.
PhaseOptimum optimize_phases(const PurifiedState& state, const UnitaryMatrix& u, const CVector& target,
                             PhaseMethod method);

/// CSV: component,p,abs_M,arg_M,phi_opt and a final row P_star,<value>.
void write_phase_report_csv(std::ostream& out, const PurifiedState& state, const std::vector<Complex>& overlaps,
                            const PhaseOptimum& optimum);

}  // namespace cohertherm::purification

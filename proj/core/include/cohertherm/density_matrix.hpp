#pragma once

#include "cohertherm/common.hpp"

namespace cohertherm {

/// Hermitian, unit-trace, positive semidefinite matrix.
///
/// from_matrix() enforces the invariants; unchecked() is for integrator
/// output, where drift is reported by the caller rather than rejected here.
class DensityMatrix {
public:
    struct Tolerance {
        double hermitian = 1e-12;
        double trace = 1e-12;
        double min_eigenvalue = -1e-10;
    };

    DensityMatrix() = default;

    /// Throws Error(NotAState) naming the first violated invariant.
    static DensityMatrix from_matrix(CMatrix m, const Tolerance& tol);
    static DensityMatrix from_matrix(CMatrix m) { return from_matrix(std::move(m), Tolerance{}); }
    static DensityMatrix unchecked(CMatrix m);

    /// |psi><psi| / <psi|psi>.
    static DensityMatrix pure(const CVector& psi);
    static DensityMatrix maximally_mixed(Eigen::Index dim);
    static DensityMatrix diagonal(const RVector& probabilities);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const CMatrix& matrix() const noexcept { return m_; }

    Complex trace() const { return m_.trace(); }
    double purity() const;
    /// Ascending.
    RVector eigenvalues() const;
    double hermiticity_error() const;

private:
    explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
    CMatrix m_;
};

/// Largest |a_ij - conj(a_ji)|.
double hermiticity_error(const CMatrix& a);
double max_abs(const CMatrix& a);

/// Tr_A of a joint operator on S (x) A, with basis index s * ancilla_dim + a.
CMatrix partial_trace_ancilla(const CMatrix& joint, Eigen::Index system_dim, Eigen::Index ancilla_dim);

}  // namespace cohertherm

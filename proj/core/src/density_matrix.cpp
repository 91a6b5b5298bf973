#include "cohertherm/density_matrix.hpp"

#include <Eigen/Eigenvalues>

#include "cohertherm/csv.hpp"

namespace cohertherm {

double hermiticity_error(const CMatrix& a)
{
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
    }
    return a.rows() == 0 ? 0.0 : (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const CMatrix& a)
{
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

DensityMatrix DensityMatrix::from_matrix(CMatrix m, const Tolerance& tol)
{
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw Error(ErrorCode::NotAState, "density matrix must be square and non-empty");
    }
    if (!m.allFinite()) {
        throw Error(ErrorCode::NotAState, "density matrix has non-finite entries");
    }
    const double herm = cohertherm::hermiticity_error(m);
    if (herm > tol.hermitian) {
        throw Error(ErrorCode::NotAState, "not Hermitian (deviation " + csv::format(herm) + ")");
    }
    const Complex tr = m.trace();
    if (std::abs(tr - 1.0) > tol.trace) {
        throw Error(ErrorCode::NotAState, "trace is " + csv::format(tr.real()) + ", expected 1");
    }
    DensityMatrix rho(std::move(m));
    const double lmin = rho.eigenvalues()(0);
    if (lmin < tol.min_eigenvalue) {
        throw Error(ErrorCode::NotAState, "negative eigenvalue " + csv::format(lmin));
    }
    return rho;
}

DensityMatrix DensityMatrix::unchecked(CMatrix m)
{
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const CVector& psi)
{
    const double n2 = psi.squaredNorm();
    if (psi.size() == 0 || !(n2 > 0.0)) {
        throw Error(ErrorCode::NotAState, "state vector is zero");
    }
    return DensityMatrix(psi * psi.adjoint() / n2);
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim)
{
    if (dim <= 0) {
        throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    }
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::diagonal(const RVector& probabilities)
{
    CMatrix m = CMatrix::Zero(probabilities.size(), probabilities.size());
    m.diagonal() = probabilities.cast<Complex>();
    return from_matrix(std::move(m));
}

double DensityMatrix::purity() const
{
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return m_.cwiseAbs2().sum();
}

RVector DensityMatrix::eigenvalues() const
{
    const CMatrix h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double DensityMatrix::hermiticity_error() const
{
    return cohertherm::hermiticity_error(m_);
}

CMatrix partial_trace_ancilla(const CMatrix& joint, Eigen::Index system_dim, Eigen::Index ancilla_dim)
{
    if (system_dim <= 0 || ancilla_dim <= 0 || joint.rows() != system_dim * ancilla_dim ||
        joint.cols() != joint.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "joint matrix does not match system x ancilla dimensions");
    }
    CMatrix out = CMatrix::Zero(system_dim, system_dim);
    for (Eigen::Index i = 0; i < system_dim; ++i) {
        for (Eigen::Index j = 0; j < system_dim; ++j) {
            Complex acc{0.0, 0.0};
            for (Eigen::Index a = 0; a < ancilla_dim; ++a) {
                acc += joint(i * ancilla_dim + a, j * ancilla_dim + a);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

}  // namespace cohertherm

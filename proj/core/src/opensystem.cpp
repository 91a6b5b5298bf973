#include "cohertherm/opensystem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <string>

#include "cohertherm/csv.hpp"
#include "cohertherm/fluctuation.hpp"

namespace cohertherm::opensystem {

namespace {

void require_hermitian(const CMatrix& h, const char* what)
{
    if (h.rows() != h.cols()) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " is not square");
    }
    const double err = hermiticity_error(h);
    if (err > 1e-12) {
        throw Error(ErrorCode::NotHermitian, std::string(what) + " deviates from Hermitian by " + csv::format(err));
    }
}

double spectral_radius(const CMatrix& h)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

DensityMatrix evolve_von_neumann(const DensityMatrix& rho, const CMatrix& h, double t, double hbar)
{
    require_hermitian(h, "Hamiltonian");
    if (h.rows() != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "Hamiltonian and state dimensions differ");
    }
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "hbar must be > 0");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
    const CMatrix& v = es.eigenvectors();
    CVector phase(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        phase(i) = std::polar(1.0, -es.eigenvalues()(i) * t / hbar);
    }
    const CMatrix u = v * phase.asDiagonal() * v.adjoint();
    CMatrix out = u * rho.matrix() * u.adjoint();
    out = 0.5 * (out + out.adjoint());
    return DensityMatrix::unchecked(std::move(out));
}

void LindbladModel::validate() const
{
    require_hermitian(hamiltonian, "Hamiltonian");
    if (jump_operators.size() != rates.size()) {
        throw Error(ErrorCode::InvalidArgument, "jump operator and rate lists differ in length");
    }
    for (std::size_t k = 0; k < rates.size(); ++k) {
        if (!(rates[k] >= 0.0) || !std::isfinite(rates[k])) {
            throw Error(ErrorCode::InvalidArgument, "rates must be >= 0");
        }
        if (jump_operators[k].rows() != hamiltonian.rows() || jump_operators[k].cols() != hamiltonian.cols()) {
            throw Error(ErrorCode::DimensionMismatch, "jump operator " + std::to_string(k) + " has the wrong shape");
        }
    }
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "hbar must be > 0");
    }
}

CMatrix LindbladModel::generator(const CMatrix& rho) const
{
    const Complex minus_i_over_hbar(0.0, -1.0 / hbar);
    CMatrix d = minus_i_over_hbar * (hamiltonian * rho - rho * hamiltonian);
    for (std::size_t k = 0; k < rates.size(); ++k) {
        if (rates[k] == 0.0) {
            continue;
        }
        const CMatrix& l = jump_operators[k];
        const CMatrix ldl = l.adjoint() * l;
        d += rates[k] * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
    }
    return d;
}

std::vector<Snapshot> evolve_lindblad(const DensityMatrix& rho, const LindbladModel& model, double t, double dt,
                                      const LindbladOptions& options)
{
    model.validate();
    if (model.hamiltonian.rows() != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "model and state dimensions differ");
    }
    if (!(dt > 0.0) || !(t >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "need dt > 0 and t >= 0");
    }
    double fastest = spectral_radius(model.hamiltonian) / model.hbar;
    for (const double g : model.rates) {
        fastest = std::max(fastest, g);
    }
    if (dt * fastest >= 0.1) {
        throw Error(ErrorCode::StabilityViolation,
                    "dt * max(gamma, rho(H) / hbar) = " + csv::format(dt * fastest) + " >= 0.1");
    }
    const auto steps = t == 0.0 ? std::size_t{0} : static_cast<std::size_t>(std::max(1.0, std::ceil(t / dt - 1e-9)));
    const double h = steps == 0 ? 0.0 : t / static_cast<double>(steps);

    std::vector<Snapshot> out;
    auto keep = [&](double time, const CMatrix& m) {
        DensityMatrix s = DensityMatrix::unchecked(m);
        const double lmin = s.eigenvalues()(0);
        if (lmin < -1e-6) {
            throw Error(ErrorCode::PositivityLoss,
                        "eigenvalue " + csv::format(lmin) + " at t = " + csv::format(time) + "; reduce dt");
        }
        out.push_back({time, std::move(s)});
    };

    CMatrix r = rho.matrix();
    keep(0.0, r);
    for (std::size_t s = 1; s <= steps; ++s) {
        const CMatrix k1 = model.generator(r);
        const CMatrix k2 = model.generator(r + 0.5 * h * k1);
        const CMatrix k3 = model.generator(r + 0.5 * h * k2);
        const CMatrix k4 = model.generator(r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        r = 0.5 * (r + r.adjoint()).eval();
        if (!r.allFinite()) {
            throw Error(ErrorCode::NonFiniteState, "Lindblad state became non-finite");
        }
        if (s == steps || (options.snapshot_stride > 0 && s % options.snapshot_stride == 0)) {
            keep(s == steps ? t : h * static_cast<double>(s), r);
        }
    }
    return out;
}

CoherentSubspace CoherentSubspace::from_projector(CMatrix p)
{
    if (p.rows() == 0 || p.rows() != p.cols()) {
        throw Error(ErrorCode::InvalidArgument, "projector must be square and non-empty");
    }
    if (hermiticity_error(p) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "projector is not Hermitian");
    }
    const double idem = max_abs(p * p - p);
    if (idem > 1e-10) {
        throw Error(ErrorCode::InvalidArgument, "projector is not idempotent (" + csv::format(idem) + ")");
    }
    return CoherentSubspace(std::move(p));
}

CoherentSubspace CoherentSubspace::from_basis(const CMatrix& columns)
{
    CMatrix q = columns;
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
        for (Eigen::Index k = 0; k < c; ++k) {
            q.col(c) -= q.col(k).dot(q.col(c)) * q.col(k);
        }
        const double n = q.col(c).norm();
        if (!(n > 1e-12)) {
            throw Error(ErrorCode::InvalidArgument, "basis vectors are linearly dependent");
        }
        q.col(c) /= n;
    }
    CMatrix p = q * q.adjoint();
    p = 0.5 * (p + p.adjoint()).eval();
    return from_projector(std::move(p));
}

Projection project_coherent_subspace(const DensityMatrix& rho, const CoherentSubspace& sub)
{
    const CMatrix& p = sub.projector();
    if (p.rows() != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "projector and state dimensions differ");
    }
    Projection out;
    out.projected = p * rho.matrix() * p;
    out.weight = out.projected.trace().real();
    return out;
}

CMatrix build_resonant_hamiltonian(const ResonantCoupling& coupling)
{
    const RMatrix& j = coupling.couplings;
    const Eigen::Index n = j.rows();
    if (n == 0 || j.cols() != n) {
        throw Error(ErrorCode::InvalidArgument, "couplings must be a non-empty square matrix");
    }
    for (Eigen::Index m = 0; m < n; ++m) {
        if (j(m, m) != 0.0) {
            throw Error(ErrorCode::AsymmetricCouplings, "J has a non-zero diagonal entry at site " + std::to_string(m));
        }
        for (Eigen::Index k = m + 1; k < n; ++k) {
            if (j(m, k) != j(k, m)) {
                throw Error(ErrorCode::AsymmetricCouplings,
                            "J(" + std::to_string(m) + "," + std::to_string(k) + ") != J(" + std::to_string(k) + "," +
                                std::to_string(m) + ")");
            }
        }
    }
    if (!coupling.site_energies.empty() && static_cast<Eigen::Index>(coupling.site_energies.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "site_energies length differs from the site count");
    }
    CMatrix h = CMatrix::Zero(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index k = m + 1; k < n; ++k) {
            h(m, k) = j(m, k);
            h(k, m) = j(m, k);
        }
        if (!coupling.site_energies.empty()) {
            h(m, m) = coupling.site_energies[static_cast<std::size_t>(m)];
        }
    }
    return h;
}

CMatrix build_phonon_hamiltonian(const PhononCoupling& coupling)
{
    if (coupling.fock_cutoff < 2) {
        throw Error(ErrorCode::CutoffTooSmall, "fock_cutoff " + std::to_string(coupling.fock_cutoff) + " < 2");
    }
    const Eigen::Index sites = coupling.site_count;
    const auto modes = static_cast<Eigen::Index>(coupling.mode_frequencies.size());
    if (sites < 1 || modes < 1) {
        throw Error(ErrorCode::InvalidArgument, "need at least one site and one mode");
    }
    if (coupling.couplings.rows() != sites || coupling.couplings.cols() != modes) {
        throw Error(ErrorCode::DimensionMismatch, "couplings must be site_count x mode_count");
    }
    for (const double w : coupling.mode_frequencies) {
        if (!(w > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "mode frequencies must be > 0");
        }
    }
    const Eigen::Index nc = coupling.fock_cutoff;
    Eigen::Index bath = 1;
    for (Eigen::Index k = 0; k < modes; ++k) {
        bath *= nc;
    }

    RMatrix b = RMatrix::Zero(nc, nc);
    for (Eigen::Index n = 1; n < nc; ++n) {
        b(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    const RMatrix x = b + b.transpose();
    const RMatrix number = b.transpose() * b;

    // Operator acting as `op` on mode k and identity on the other modes.
    auto embed = [&](const RMatrix& op, Eigen::Index k) {
        RMatrix out = RMatrix::Ones(1, 1);
        for (Eigen::Index m = 0; m < modes; ++m) {
            const RMatrix& f = m == k ? op : RMatrix::Identity(nc, nc).eval();
            RMatrix next = RMatrix::Zero(out.rows() * f.rows(), out.cols() * f.cols());
            for (Eigen::Index i = 0; i < out.rows(); ++i) {
                for (Eigen::Index j = 0; j < out.cols(); ++j) {
                    next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
                }
            }
            out = std::move(next);
        }
        return out;
    };

    CMatrix h = CMatrix::Zero(sites * bath, sites * bath);
    for (Eigen::Index k = 0; k < modes; ++k) {
        const RMatrix xk = embed(x, k);
        for (Eigen::Index s = 0; s < sites; ++s) {
            h.block(s * bath, s * bath, bath, bath) += (coupling.couplings(s, k) * xk).cast<Complex>();
        }
        if (coupling.include_free_phonons) {
            const RMatrix nk = coupling.hbar * coupling.mode_frequencies[static_cast<std::size_t>(k)] * embed(number, k);
            for (Eigen::Index s = 0; s < sites; ++s) {
                h.block(s * bath, s * bath, bath, bath) += nk.cast<Complex>();
            }
        }
    }
    return h;
}

std::vector<std::pair<double, double>> entropy_trace(const std::vector<Snapshot>& snapshots, double k_B)
{
    std::vector<std::pair<double, double>> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) {
        out.emplace_back(s.time, fluctuation::von_neumann_entropy(s.rho, k_B));
    }
    return out;
}

void write_snapshot_csv(std::ostream& out, const std::vector<Snapshot>& snapshots, double k_B)
{
    csv::Writer w(out);
    const Eigen::Index d = snapshots.empty() ? 0 : snapshots.front().rho.dim();
    std::vector<std::string> names{"time", "entropy", "purity"};
    for (Eigen::Index i = 0; i < d; ++i) {
        names.push_back("pop_" + std::to_string(i));
    }
    names.emplace_back("abs_coh_max");
    w.row(names);
    for (const auto& s : snapshots) {
        const CMatrix& m = s.rho.matrix();
        std::vector<std::string> row{csv::format(s.time), csv::format(fluctuation::von_neumann_entropy(s.rho, k_B)),
                                     csv::format(s.rho.purity())};
        double coh = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            row.push_back(csv::format(m(i, i).real()));
            for (Eigen::Index j = 0; j < d; ++j) {
                if (i != j) {
                    coh = std::max(coh, std::abs(m(i, j)));
                }
            }
        }
        row.push_back(csv::format(coh));
        w.row(row);
    }
}

}  // namespace cohertherm::opensystem

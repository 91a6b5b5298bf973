#include "cohertherm/purification.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "cohertherm/csv.hpp"

namespace cohertherm::purification {

void MixedState::validate() const
{
    if (probabilities.empty()) {
        throw Error(ErrorCode::InvalidArgument, "mixed state needs at least one probability");
    }
    if (static_cast<Eigen::Index>(probabilities.size()) > system_dim) {
        throw Error(ErrorCode::InvalidArgument, "more probabilities than system basis states");
    }
    CompensatedSum<double> sum;
    for (const double p : probabilities) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw Error(ErrorCode::InvalidArgument, "probabilities must be > 0");
        }
        sum.add(p);
    }
    if (std::abs(sum.value() - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "probabilities sum to " + csv::format(sum.value()));
    }
}

DensityMatrix MixedState::density_matrix() const
{
    validate();
    RVector p = RVector::Zero(system_dim);
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        p(static_cast<Eigen::Index>(i)) = probabilities[i];
    }
    return DensityMatrix::diagonal(p);
}

CVector PurifiedState::joint_vector() const
{
    CVector v = CVector::Zero(joint_dim());
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        v(joint_index(i)) = std::sqrt(probabilities[i]) * std::polar(1.0, phases[i]);
    }
    return v;
}

UnitaryMatrix UnitaryMatrix::from_matrix(CMatrix u)
{
    if (u.rows() == 0 || u.rows() != u.cols()) {
        throw Error(ErrorCode::NotUnitary, "matrix must be square and non-empty");
    }
    const double err = max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols()));
    if (!(err <= 1e-10)) {
        throw Error(ErrorCode::NotUnitary, "max |U^dagger U - I| = " + csv::format(err));
    }
    return UnitaryMatrix(std::move(u));
}

UnitaryMatrix UnitaryMatrix::identity(Eigen::Index dim)
{
    return from_matrix(CMatrix::Identity(dim, dim));
}

UnitaryMatrix UnitaryMatrix::random(Eigen::Index dim, Rng& rng)
{
    if (dim <= 0) {
        throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    }
    CMatrix a(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            a(r, c) = rng.complex_normal();
        }
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index k = 0; k < c; ++k) {
            a.col(c) -= a.col(k).dot(a.col(c)) * a.col(k);
        }
        a.col(c).normalize();
    }
    return from_matrix(std::move(a));
}

PurifiedState purify(const MixedState& mixed, Eigen::Index ancilla_dim)
{
    mixed.validate();
    if (ancilla_dim < static_cast<Eigen::Index>(mixed.probabilities.size())) {
        throw Error(ErrorCode::AncillaTooSmall, "ancilla_dim " + std::to_string(ancilla_dim) + " < " +
                                                    std::to_string(mixed.probabilities.size()) + " components");
    }
    PurifiedState s;
    s.probabilities = mixed.probabilities;
    s.phases.assign(mixed.probabilities.size(), 0.0);
    s.system_dim = mixed.system_dim;
    s.ancilla_dim = ancilla_dim;
    return s;
}

PurifiedState apply_phases(const PurifiedState& state, const std::vector<double>& phases)
{
    if (phases.size() != state.probabilities.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(phases.size()) + " phases for " +
                                                   std::to_string(state.probabilities.size()) + " components");
    }
    PurifiedState out = state;
    out.phases = phases;
    return out;
}

DensityMatrix joint_density_matrix(const PurifiedState& state)
{
    const CVector v = state.joint_vector();
    return DensityMatrix::from_matrix(v * v.adjoint());
}

std::vector<Complex> component_overlaps(const PurifiedState& state, const UnitaryMatrix& u, const CVector& target)
{
    if (u.dim() != state.joint_dim() || target.size() != state.joint_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "U is " + std::to_string(u.dim()) + ", target has " +
                                                      std::to_string(target.size()) + ", joint space has " +
                                                      std::to_string(state.joint_dim()));
    }
    if (std::abs(target.norm() - 1.0) > 1e-10) {
        throw Error(ErrorCode::TargetNotNormalized, "|target| = " + csv::format(target.norm()));
    }
    std::vector<Complex> m(state.probabilities.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = target.dot(u.matrix().col(state.joint_index(i)));
    }
    return m;
}

namespace {

Complex weighted_sum(const std::vector<double>& p, const std::vector<double>& phi, const std::vector<Complex>& m)
{
    CompensatedSum<Complex> z;
    for (std::size_t i = 0; i < m.size(); ++i) {
        z.add(std::sqrt(p[i]) * std::polar(1.0, phi[i]) * m[i]);
    }
    return z.value();
}

std::vector<double> gradient_of(const std::vector<double>& p, const std::vector<double>& phi,
                                const std::vector<Complex>& m)
{
    const Complex z = weighted_sum(p, phi, m);
    std::vector<double> g(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
        const Complex w = std::sqrt(p[k]) * std::polar(1.0, phi[k]) * m[k];
        g[k] = -2.0 * (std::conj(z) * w).imag();
    }
    return g;
}

}  // namespace

double transition_probability(const PurifiedState& state, const UnitaryMatrix& u, const CVector& target)
{
    const auto m = component_overlaps(state, u, target);
    return std::norm(weighted_sum(state.probabilities, state.phases, m));
}

std::vector<double> phase_gradient(const PurifiedState& state, const UnitaryMatrix& u, const CVector& target)
{
    const auto m = component_overlaps(state, u, target);
    return gradient_of(state.probabilities, state.phases, m);
}

PhaseOptimum optimize_phases(const PurifiedState& state, const UnitaryMatrix& u, const CVector& target,
                             PhaseMethod method)
{
    const auto m = component_overlaps(state, u, target);
    const auto& p = state.probabilities;
    const std::size_t n = m.size();
    auto prob = [&](const std::vector<double>& phi) { return std::norm(weighted_sum(p, phi, m)); };

    PhaseOptimum out;
    switch (method) {
    case PhaseMethod::analytic: {
        out.phases.resize(n);
        CompensatedSum<double> amp;
        for (std::size_t i = 0; i < n; ++i) {
            out.phases[i] = std::abs(m[i]) == 0.0 ? 0.0 : -std::arg(m[i]);
            amp.add(std::sqrt(p[i]) * std::abs(m[i]));
        }
        out.probability = amp.value() * amp.value();
        return out;
    }
    case PhaseMethod::gradient: {
        std::vector<double> phi(n, 0.0);
        double value = prob(phi);
        double step = 1.0;
        int it = 0;
        for (; it < 10000; ++it) {
            const auto g = gradient_of(p, phi, m);
            const double g2 = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
            if (g2 < 1e-26) {
                break;
            }
            bool accepted = false;
            std::vector<double> trial(n);
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t k = 0; k < n; ++k) {
                    trial[k] = phi[k] + step * g[k];
                }
                const double v = prob(trial);
                if (v >= value + 1e-4 * step * g2) {
                    phi = trial;
                    value = v;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                break;
            }
            step *= 2.0;
        }
        for (auto& x : phi) {
            x = std::remainder(x, kTwoPi);
        }
        out.phases = phi;
        out.probability = prob(phi);
        out.iterations = it;
        return out;
    }
    case PhaseMethod::grid: {
        if (n > 4) {
            throw Error(ErrorCode::GridTooLarge, "grid search supports at most 4 components, got " + std::to_string(n));
        }
        constexpr int kSteps = 64;  // 2 pi / (pi / 32)
        const double h = kPi / 32.0;
        std::vector<int> idx(n, 0);
        std::vector<double> phi(n, 0.0);
        out.phases = phi;
        out.probability = prob(phi);
        const std::size_t free = n > 0 ? n - 1 : 0;
        std::size_t total = 1;
        for (std::size_t k = 0; k < free; ++k) {
            total *= kSteps;
        }
        for (std::size_t cell = 0; cell < total; ++cell) {
            std::size_t rest = cell;
            for (std::size_t k = n; k-- > 1;) {
                idx[k] = static_cast<int>(rest % kSteps);
                rest /= kSteps;
                phi[k] = h * idx[k];
            }
            const double v = prob(phi);
            if (v > out.probability) {
                out.probability = v;
                out.phases = phi;
            }
        }
        out.iterations = static_cast<int>(total);
        return out;
    }
    }
    return out;
}

void write_phase_report_csv(std::ostream& out, const PurifiedState& state, const std::vector<Complex>& overlaps,
                            const PhaseOptimum& optimum)
{
    csv::Writer w(out);
    w.header({"component", "p", "abs_M", "arg_M", "phi_opt"});
    for (std::size_t i = 0; i < overlaps.size(); ++i) {
        w.row({csv::format(static_cast<long long>(i)), csv::format(state.probabilities[i]),
               csv::format(std::abs(overlaps[i])), csv::format(std::arg(overlaps[i])),
               csv::format(optimum.phases[i])});
    }
    w.row({"P_star", csv::format(optimum.probability)});
}

}  // namespace cohertherm::purification

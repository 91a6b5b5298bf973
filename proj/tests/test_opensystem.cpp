#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <sstream>

#include "cohertherm/fluctuation.hpp"
#include "cohertherm/opensystem.hpp"
#include "cohertherm/purification.hpp"
#include "cohertherm/rng.hpp"

using namespace cohertherm;
using namespace cohertherm::opensystem;

namespace {

constexpr double kPiT = 3.14159265358979323846;

CMatrix sigma_z()
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

// |1> excited, |0> ground.
CMatrix sigma_minus()
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

DensityMatrix plus_state()
{
    return DensityMatrix::from_matrix(CMatrix::Constant(2, 2, 0.5));
}

DensityMatrix random_state(Rng& rng, int d)
{
    CMatrix a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            a(i, j) = rng.complex_normal();
        }
    }
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix::from_matrix(0.5 * (rho + rho.adjoint()));
}

CMatrix random_hermitian(Rng& rng, int d)
{
    CMatrix a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            a(i, j) = rng.complex_normal();
        }
    }
    return 0.5 * (a + a.adjoint());
}

double mean_target_population(double j, double gamma)
{
    ResonantCoupling rc;
    rc.couplings = RMatrix::Zero(2, 2);
    rc.couplings(0, 1) = rc.couplings(1, 0) = j;
    rc.site_energies = {0.5, -0.5};
    LindbladModel m;
    m.hamiltonian = build_resonant_hamiltonian(rc);
    for (int s = 0; s < 2; ++s) {
        CMatrix l = CMatrix::Zero(2, 2);
        l(s, s) = 1.0;
        m.jump_operators.push_back(l);
        m.rates.push_back(gamma);
    }
    CMatrix rho0 = CMatrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const auto snaps = evolve_lindblad(DensityMatrix::from_matrix(rho0), m, 10.0, 0.01);
    // Trapezoid time average of the site-1 population over [0, 10].
    double acc = 0.0;
    for (std::size_t k = 1; k < snaps.size(); ++k) {
        acc += 0.5 * (snaps[k].rho.matrix()(1, 1).real() + snaps[k - 1].rho.matrix()(1, 1).real()) *
               (snaps[k].time - snaps[k - 1].time);
    }
    return acc / 10.0;
}

}  // namespace

TEST(VonNeumannEvolution, StationaryState)
{
    CMatrix h = CMatrix::Zero(3, 3);
    h.diagonal() << 1.0, -0.5, 2.0;
    RVector p(3);
    p << 0.2, 0.5, 0.3;
    const auto rho = DensityMatrix::diagonal(p);
    const auto out = evolve_von_neumann(rho, h, 3.7);
    EXPECT_LT(max_abs(out.matrix() - rho.matrix()), 1e-12);
}

TEST(VonNeumannEvolution, LarmorPrecession)
{
    const double de = 1.3;
    const double hbar = 0.7;
    const CMatrix h = 0.5 * de * sigma_z();
    for (const double t : {0.3, 1.0, 2.5}) {
        const auto out = evolve_von_neumann(plus_state(), h, t, hbar);
        const Complex expected = 0.5 * std::polar(1.0, -de * t / hbar);
        EXPECT_LT(std::abs(out.matrix()(0, 1) - expected), 1e-12);
    }
    const auto full = evolve_von_neumann(plus_state(), h, 2 * kPiT * hbar / de, hbar);
    EXPECT_LT(max_abs(full.matrix() - plus_state().matrix()), 1e-12);
}

TEST(VonNeumannEvolution, EntropyAndPurityPreserved)
{
    Rng rng(17);
    const auto rho = random_state(rng, 6);
    const auto out = evolve_von_neumann(rho, random_hermitian(rng, 6), 2.3);
    EXPECT_NEAR(fluctuation::von_neumann_entropy(rho), fluctuation::von_neumann_entropy(out), 1e-9);
    EXPECT_NEAR(rho.purity(), out.purity(), 1e-10);
}

TEST(VonNeumannEvolution, Errors)
{
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 1) = 1.0;
    try {
        evolve_von_neumann(plus_state(), h, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
    }
    try {
        evolve_von_neumann(plus_state(), CMatrix::Identity(3, 3), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(Lindblad, ClosedSystemLimit)
{
    Rng rng(23);
    const auto rho = random_state(rng, 4);
    LindbladModel m;
    m.hamiltonian = random_hermitian(rng, 4);
    m.jump_operators = {CMatrix::Identity(4, 4)};
    m.rates = {0.0};
    const auto snaps = evolve_lindblad(rho, m, 3.0, 0.005, {.snapshot_stride = 50});
    for (const auto& s : snaps) {
        EXPECT_LT(max_abs(s.rho.matrix() - evolve_von_neumann(rho, m.hamiltonian, s.time).matrix()), 1e-8);
    }
}

TEST(Lindblad, QubitDephasing)
{
    const double gamma = 0.3;
    LindbladModel m{0.5 * sigma_z(), {sigma_z()}, {gamma}, 1.0};
    const auto snaps = evolve_lindblad(plus_state(), m, 5.0, 0.01);
    for (const auto& s : snaps) {
        EXPECT_NEAR(std::abs(s.rho.matrix()(0, 1)), 0.5 * std::exp(-2 * gamma * s.time), 1e-6);
        EXPECT_NEAR(s.rho.matrix()(0, 0).real(), 0.5, 1e-8);
    }
}

TEST(Lindblad, AmplitudeDamping)
{
    const double gamma = 0.4;
    CMatrix excited = CMatrix::Zero(2, 2);
    excited(1, 1) = 1.0;
    LindbladModel m{0.5 * sigma_z(), {sigma_minus()}, {gamma}, 1.0};
    const auto snaps = evolve_lindblad(DensityMatrix::from_matrix(excited), m, 8.0, 0.01);
    for (const auto& s : snaps) {
        EXPECT_NEAR(s.rho.matrix()(1, 1).real(), std::exp(-gamma * s.time), 1e-6);
    }
}

TEST(Lindblad, TraceHermiticityPositivity)
{
    Rng rng(31);
    const auto rho = random_state(rng, 3);
    LindbladModel m;
    m.hamiltonian = random_hermitian(rng, 3);
    for (int k = 0; k < 3; ++k) {
        CMatrix l(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                l(i, j) = rng.complex_normal();
            }
        }
        m.jump_operators.push_back(l);
        m.rates.push_back(0.05 * (k + 1));
    }
    const auto snaps = evolve_lindblad(rho, m, 20.0, 0.01);
    for (const auto& s : snaps) {
        EXPECT_LT(std::abs(s.rho.trace() - 1.0), 1e-9);
        EXPECT_LT(s.rho.hermiticity_error(), 1e-10);
        EXPECT_GT(s.rho.eigenvalues()(0), -1e-6);
    }
}

TEST(Lindblad, FourthOrderConvergence)
{
    Rng rng(41);
    const auto rho = random_state(rng, 3);
    LindbladModel m;
    m.hamiltonian = random_hermitian(rng, 3);
    m.jump_operators = {random_hermitian(rng, 3)};
    m.rates = {0.3};
    const double t = 2.0;
    auto final_state = [&](double dt) { return evolve_lindblad(rho, m, t, dt).back().rho.matrix(); };
    const CMatrix ref = final_state(0.0025);
    const double e1 = max_abs(final_state(0.04) - ref);
    const double e2 = max_abs(final_state(0.02) - ref);
    EXPECT_NEAR(e1 / e2, 16.0, 4.0);
}

TEST(Lindblad, StabilityGuard)
{
    LindbladModel m{0.5 * sigma_z(), {sigma_z()}, {2.0}, 1.0};
    try {
        evolve_lindblad(plus_state(), m, 1.0, 0.05);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StabilityViolation);
    }
}

TEST(Lindblad, ModelValidation)
{
    LindbladModel m{0.5 * sigma_z(), {sigma_z()}, {-1.0}, 1.0};
    EXPECT_THROW(m.validate(), Error);
    m.rates = {1.0, 2.0};
    EXPECT_THROW(m.validate(), Error);
    m.rates = {1.0};
    m.hamiltonian(0, 1) = 1.0;
    EXPECT_THROW(m.validate(), Error);
}

TEST(Lindblad, SnapshotStride)
{
    LindbladModel m{0.5 * sigma_z(), {sigma_z()}, {0.1}, 1.0};
    const auto snaps = evolve_lindblad(plus_state(), m, 1.0, 0.01, {.snapshot_stride = 25});
    ASSERT_EQ(snaps.size(), 5u);
    EXPECT_DOUBLE_EQ(snaps.back().time, 1.0);
}

TEST(Projection, Examples)
{
    Rng rng(2);
    const auto rho = random_state(rng, 4);
    const auto id = project_coherent_subspace(rho, CoherentSubspace::from_projector(CMatrix::Identity(4, 4)));
    EXPECT_LT(max_abs(id.projected - rho.matrix()), 1e-15);
    EXPECT_NEAR(id.weight, 1.0, 1e-12);

    CMatrix sup = CMatrix::Zero(4, 4);
    sup(0, 0) = 1.0;
    const auto pure = DensityMatrix::from_matrix(sup);
    CMatrix p = CMatrix::Zero(4, 4);
    p(2, 2) = p(3, 3) = 1.0;
    const auto orth = project_coherent_subspace(pure, CoherentSubspace::from_projector(p));
    EXPECT_EQ(max_abs(orth.projected), 0.0);
    EXPECT_EQ(orth.weight, 0.0);

    CMatrix v(4, 1);
    v << 0.5, Complex(0, 0.5), -0.5, 0.5;
    const auto one = project_coherent_subspace(DensityMatrix::maximally_mixed(4), CoherentSubspace::from_basis(v));
    EXPECT_NEAR(one.weight, 0.25, 1e-12);

    EXPECT_THROW(CoherentSubspace::from_projector(2.0 * CMatrix::Identity(2, 2)), Error);
    EXPECT_THROW(project_coherent_subspace(pure, CoherentSubspace::from_projector(CMatrix::Identity(2, 2))), Error);
}

TEST(Resonant, Spectra)
{
    ResonantCoupling two;
    two.couplings = RMatrix::Zero(2, 2);
    two.couplings(0, 1) = two.couplings(1, 0) = 0.8;
    Eigen::SelfAdjointEigenSolver<CMatrix> es2(build_resonant_hamiltonian(two));
    EXPECT_NEAR(es2.eigenvalues()(0), -0.8, 1e-12);
    EXPECT_NEAR(es2.eigenvalues()(1), 0.8, 1e-12);

    ResonantCoupling zero;
    zero.couplings = RMatrix::Zero(3, 3);
    EXPECT_EQ(max_abs(build_resonant_hamiltonian(zero)), 0.0);

    ResonantCoupling ring;
    const double j = 0.6;
    ring.couplings = RMatrix::Constant(3, 3, j);
    ring.couplings.diagonal().setZero();
    Eigen::SelfAdjointEigenSolver<CMatrix> es3(build_resonant_hamiltonian(ring));
    EXPECT_NEAR(es3.eigenvalues()(0), -j, 1e-12);
    EXPECT_NEAR(es3.eigenvalues()(1), -j, 1e-12);
    EXPECT_NEAR(es3.eigenvalues()(2), 2 * j, 1e-12);

    ResonantCoupling bad;
    bad.couplings = RMatrix::Zero(2, 2);
    bad.couplings(0, 1) = 1.0;
    try {
        build_resonant_hamiltonian(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AsymmetricCouplings);
    }
    bad.couplings(1, 0) = 1.0;
    bad.couplings(0, 0) = 0.1;
    EXPECT_THROW(build_resonant_hamiltonian(bad), Error);
}

TEST(Phonon, LadderEntries)
{
    PhononCoupling pc;
    pc.site_count = 1;
    pc.mode_frequencies = {1.0};
    pc.couplings = RMatrix::Ones(1, 1);
    pc.fock_cutoff = 2;
    const CMatrix h = build_phonon_hamiltonian(pc);
    ASSERT_EQ(h.rows(), 2);
    EXPECT_EQ(h(0, 1), Complex(1.0));
    EXPECT_EQ(h(1, 0), Complex(1.0));
    EXPECT_EQ(h(0, 0), Complex(0.0));
    EXPECT_EQ(h(1, 1), Complex(0.0));
}

TEST(Phonon, BlockStructure)
{
    PhononCoupling pc;
    pc.site_count = 2;
    pc.mode_frequencies = {1.0};
    pc.couplings = RMatrix(2, 1);
    pc.couplings << 0.1, -0.1;
    pc.fock_cutoff = 4;
    const CMatrix h = build_phonon_hamiltonian(pc);
    ASSERT_EQ(h.rows(), 8);
    EXPECT_LT(hermiticity_error(h), 1e-14);
    EXPECT_EQ(max_abs(h.block(0, 4, 4, 4)), 0.0);
    EXPECT_EQ(max_abs(h.block(4, 0, 4, 4)), 0.0);
    for (int n = 0; n + 1 < 4; ++n) {
        EXPECT_NEAR(h(n, n + 1).real(), 0.1 * std::sqrt(n + 1.0), 1e-15);
        EXPECT_NEAR(h(4 + n, 4 + n + 1).real(), -0.1 * std::sqrt(n + 1.0), 1e-15);
    }
    pc.couplings.setZero();
    EXPECT_EQ(max_abs(build_phonon_hamiltonian(pc)), 0.0);
    pc.include_free_phonons = true;
    const CMatrix free = build_phonon_hamiltonian(pc);
    EXPECT_NEAR(free(3, 3).real(), 3.0, 1e-15);
    pc.fock_cutoff = 1;
    try {
        build_phonon_hamiltonian(pc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CutoffTooSmall);
    }
}

TEST(Phonon, TwoModesTensorOrdering)
{
    PhononCoupling pc;
    pc.site_count = 1;
    pc.mode_frequencies = {1.0, 2.0};
    pc.couplings = RMatrix(1, 2);
    pc.couplings << 0.0, 1.0;
    pc.fock_cutoff = 3;
    const CMatrix h = build_phonon_hamiltonian(pc);
    ASSERT_EQ(h.rows(), 9);
    // Independent construction: I_3 (x) (b + b^dagger) for the second mode.
    RMatrix x = RMatrix::Zero(3, 3);
    x(0, 1) = x(1, 0) = 1.0;
    x(1, 2) = x(2, 1) = std::sqrt(2.0);
    RMatrix expected = RMatrix::Zero(9, 9);
    for (int a = 0; a < 3; ++a) {
        expected.block(3 * a, 3 * a, 3, 3) = x;
    }
    EXPECT_LT(max_abs(h - expected.cast<Complex>()), 1e-15);
}

TEST(EntropyTrace, UnitaryConstant)
{
    Rng rng(5);
    const auto rho = random_state(rng, 3);
    const CMatrix h = random_hermitian(rng, 3);
    std::vector<Snapshot> exact;
    for (int k = 0; k <= 50; ++k) {
        exact.push_back({0.1 * k, evolve_von_neumann(rho, h, 0.1 * k)});
    }
    for (const auto& [t, s] : entropy_trace(exact)) {
        EXPECT_NEAR(s, fluctuation::von_neumann_entropy(rho), 1e-9) << t;
    }
    // RK4 is not exactly unitary; the drift shrinks as dt^4.
    LindbladModel m{h, {}, {}, 1.0};
    const auto tr = entropy_trace(evolve_lindblad(rho, m, 5.0, 0.002));
    for (const auto& [t, s] : tr) {
        EXPECT_NEAR(s, tr.front().second, 1e-9) << t;
    }
}

TEST(EntropyTrace, DephasingMonotoneToLn2)
{
    const double gamma = 0.5;
    LindbladModel m{0.5 * sigma_z(), {sigma_z()}, {gamma}, 1.0};
    const auto tr = entropy_trace(evolve_lindblad(plus_state(), m, 10.0 / gamma, 0.01), 2.0);
    for (std::size_t k = 1; k < tr.size(); ++k) {
        EXPECT_GE(tr[k].second, tr[k - 1].second - 1e-12);
    }
    EXPECT_NEAR(tr.back().second, 2.0 * std::log(2.0), 1e-4);
}

TEST(EntropyTrace, AmplitudeDampingRelaxesBelowLn2)
{
    LindbladModel m{0.5 * sigma_z(), {sigma_minus()}, {0.5}, 1.0};
    const auto tr = entropy_trace(evolve_lindblad(DensityMatrix::maximally_mixed(2), m, 10.0, 0.01));
    EXPECT_NEAR(tr.front().second, std::log(2.0), 1e-12);
    EXPECT_LT(tr.back().second, std::log(2.0) - 0.1);
}

TEST(Demonstrator, CouplingRaisesTargetPopulation)
{
    const double off = mean_target_population(0.0, 0.2);
    const double on = mean_target_population(1.0, 0.2);
    EXPECT_NEAR(off, 0.0, 1e-12);
    EXPECT_GE(on - off, 0.01);
}

TEST(Csv, SnapshotColumns)
{
    LindbladModel m{0.5 * sigma_z(), {sigma_z()}, {0.1}, 1.0};
    const auto snaps = evolve_lindblad(plus_state(), m, 0.1, 0.01, {.snapshot_stride = 5});
    std::ostringstream os;
    write_snapshot_csv(os, snaps);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "time,entropy,purity,pop_0,pop_1,abs_coh_max");
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
        ++rows;
    }
    EXPECT_EQ(rows, 3);
}

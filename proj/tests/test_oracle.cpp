#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <sstream>

#include "cohertherm/oracle.hpp"
#include "kernels.hpp"

using namespace cohertherm;
using namespace cohertherm::oracle;
using testing_support::gaussian;
using testing_support::pi;

namespace {

GridState packet(double q0, double p0, double sigma, double hbar, double lo = -12, double hi = 12,
                 std::size_t n = 1024)
{
    return GridState::from_function(lo, hi, n, hbar, [&](double q) { return gaussian(q, q0, p0, sigma, hbar); });
}

double fidelity(const GridState& a, const GridState& b)
{
    return std::norm(a.inner(b));
}

}  // namespace

TEST(GridState, Invariants)
{
    const auto g = packet(0.0, 1.0, 1.0, 1.0);
    EXPECT_NEAR(g.norm(), 1.0, 1e-12);
    EXPECT_EQ(g.n_points(), 1024u);
    EXPECT_THROW(packet(0, 0, 1, 1, -12, 12, 32), Error);
    EXPECT_THROW(packet(0, 0, 1, 1, -12, 12, 100), Error);
    CVector bad = CVector::Constant(64, 2.0);
    EXPECT_THROW(GridState::from_amplitudes(0, 1, 1.0, bad), Error);
    EXPECT_NO_THROW(GridState::from_amplitudes(0, 1, 1.0, CVector::Constant(64, 1.0)));
}

TEST(SplitStep, FreeGaussianSpreading)
{
    const auto g = packet(0.0, 0.0, 1.0, 1.0);
    const auto out = evolve_exact(g, dynamics::SystemSpec::free_particle(), 2.0, 0.01);
    const double sigma_t = std::sqrt(1.0 + std::pow(1.0 * 2.0 / 2.0, 2));
    EXPECT_NEAR(std::sqrt(position_moments(out).variance), sigma_t, 1e-6);
    EXPECT_NEAR(out.norm(), 1.0, 1e-12);
}

TEST(SplitStep, HarmonicRevival)
{
    const auto sys = dynamics::SystemSpec::harmonic();
    // Coherent state: ground-state width sigma^2 = hbar / (2 m omega).
    const auto g = packet(1.5, 0.0, std::sqrt(0.5), 1.0);
    const auto out = evolve_exact(g, sys, 2 * pi, 2 * pi / 10000);
    EXPECT_GT(fidelity(g, out), 1.0 - 1e-8);
}

TEST(SplitStep, SecondOrderInDt)
{
    const auto sys = dynamics::SystemSpec::double_well(1.0, 2.0, 1.0, 0.3);
    const auto g = packet(-1.0, 0.5, 0.3, 0.3, -6, 6, 512);
    const double t = 2.0;
    const auto ref = evolve_exact(g, sys, t, t / 8000);
    const auto a = evolve_exact(g, sys, t, t / 100);
    const auto b = evolve_exact(g, sys, t, t / 200);
    const double ea = (a.amplitudes() - ref.amplitudes()).norm();
    const double eb = (b.amplitudes() - ref.amplitudes()).norm();
    EXPECT_NEAR(ea / eb, 4.0, 0.4);
}

TEST(SplitStep, NormDriftOver10kSteps)
{
    const auto sys = dynamics::SystemSpec::double_well(1.0, 2.0, 1.0, 0.05);
    const auto g = packet(-1.0, 2.3, 0.05, 0.05);
    const auto out = evolve_exact(g, sys, 1.0, 1e-4);
    EXPECT_LT(std::abs(out.norm() - 1.0), 1e-12);
}

TEST(SplitStep, DoubleWellTunnellingPeriod)
{
    const double hbar = 0.3;
    const auto sys = dynamics::SystemSpec::double_well(1.0, 2.0, 1.0, hbar);
    const double lo = -4.0;
    const double hi = 4.0;
    const std::size_t n = 256;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(grid_hamiltonian(sys, lo, hi, n));
    const double de = es.eigenvalues()(1) - es.eigenvalues()(0);
    const double period = 2 * pi * hbar / de;
    const double dq = (hi - lo) / n;
    CVector left = ((es.eigenvectors().col(0) + es.eigenvectors().col(1)) / std::sqrt(2.0 * dq)).cast<Complex>();
    const auto g = GridState::from_amplitudes(lo, hi, hbar, left);
    // Left-well probability is 1/2 + 1/2 cos(dE t / hbar) up to tiny
    // corrections; locate its first minimum by a parabola through samples.
    const double dt = period / 20000;
    std::vector<double> times;
    std::vector<double> p_left;
    for (const double f : {0.46, 0.5, 0.54}) {
        const double t = f * period;
        const auto out = evolve_exact(g, sys, t, dt);
        times.push_back(t);
        p_left.push_back(region_probability(out, {lo, 0.0}));
    }
    const double h = times[1] - times[0];
    const double t_min = times[1] + 0.5 * h * (p_left[0] - p_left[2]) / (p_left[0] - 2 * p_left[1] + p_left[2]);
    EXPECT_NEAR(2 * t_min / period, 1.0, 0.01);
    EXPECT_LT(p_left[1], 0.05);
}

TEST(SplitStep, BoundaryLeakDetected)
{
    const auto g = packet(9.0, 3.0, 0.3, 1.0);
    try {
        evolve_exact(g, dynamics::SystemSpec::free_particle(), 2.0, 0.01);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BoundaryLeak);
    }
}

TEST(SplitStep, RejectsKickedSystem)
{
    EXPECT_THROW(evolve_exact(packet(0, 0, 1, 1), dynamics::SystemSpec::kicked_rotor(1.0), 1.0, 0.1), Error);
}

TEST(TransitionExact, Examples)
{
    const auto sys = dynamics::SystemSpec::double_well(1.0, 2.0, 1.0, 0.1);
    const auto g = packet(-1.0, 0.5, 0.2, 0.1);
    const auto evolved = evolve_exact(g, sys, 1.3, 1e-3);
    EXPECT_NEAR(transition_probability_exact(g, evolved, sys, 1.3, 1e-3), 1.0, 1e-10);
    const auto far = packet(4.0, 0.0, 0.2, 0.1);
    EXPECT_LT(transition_probability_exact(g, far, sys, 0.0, 1e-3), 1e-12);
    const auto other = packet(0, 0, 1, 0.1, -10, 10, 1024);
    try {
        transition_probability_exact(g, other, sys, 1.0, 0.01);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}

TEST(TransitionExact, GridConverged)
{
    const double hbar = 0.05;
    const auto sys = dynamics::SystemSpec::double_well(1.0, 2.0, 1.0, hbar);
    double p[2];
    for (int k = 0; k < 2; ++k) {
        const std::size_t n = k == 0 ? 1024 : 2048;
        const auto a = packet(-1.0, 2.3, 0.05, hbar, -12, 12, n);
        const auto b = packet(1.0, -0.5, 0.03, hbar, -12, 12, n);
        p[k] = transition_probability_exact(a, b, sys, 1.4, 1.4 / 4000);
    }
    EXPECT_LT(std::abs(p[0] - p[1]), 1e-8);
}

TEST(Kicked, ZeroKicksIdentityAndFreeRotation)
{
    const double hbar = 0.25;
    auto f = [&](double q) { return std::exp(Complex(0.0, 3.0 * std::cos(q))) * (1.0 + 0.3 * std::sin(2 * q)); };
    const auto g = GridState::from_function(0, 2 * pi, 512, hbar, f);
    const auto same = evolve_kicked_exact(g, dynamics::SystemSpec::kicked_rotor(7.0, hbar), 0);
    EXPECT_LT((same.amplitudes() - g.amplitudes()).norm(), 1e-15);

    const auto free = evolve_kicked_exact(g, dynamics::SystemSpec::kicked_rotor(0.0, hbar), 13);
    const auto m0 = momentum_moments(g);
    const auto m1 = momentum_moments(free);
    EXPECT_NEAR(m0.mean, m1.mean, 1e-10);
    EXPECT_NEAR(m0.variance, m1.variance, 1e-10);
    EXPECT_NEAR(free.norm(), 1.0, 1e-12);
}

TEST(Kicked, MatchesDenseFloquetMatrix)
{
    // Independent Floquet operator built from the DFT matrix.
    const double hbar = 0.4;
    const double kick = 1.7;
    const int n = 64;
    const double dq = 2 * pi / n;
    CMatrix f(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            f(k, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), -2 * pi * j * k / n);
        }
    }
    CVector kin(n);
    CVector pot(n);
    for (int k = 0; k < n; ++k) {
        const int kk = k < n / 2 ? k : k - n;
        kin(k) = std::polar(1.0, -hbar * kk * kk / 2.0);
        pot(k) = std::polar(1.0, -kick * std::cos(k * dq) / hbar);
    }
    const CMatrix u = f.adjoint() * kin.asDiagonal() * f * pot.asDiagonal();
    auto init = [](double q) { return Complex(std::exp(-2.0 * (q - 2.0) * (q - 2.0)), 0.3 * std::sin(q)); };
    const auto g = GridState::from_function(0, 2 * pi, n, hbar, init);
    CVector v = g.amplitudes();
    for (int s = 0; s < 5; ++s) {
        v = u * v;
    }
    const auto out = evolve_kicked_exact(g, dynamics::SystemSpec::kicked_rotor(kick, hbar), 5);
    EXPECT_LT((out.amplitudes() - v).norm() / v.norm(), 1e-12);
}

TEST(Kicked, DynamicalLocalisation)
{
    const double hbar = 1.0;
    const auto sys = dynamics::SystemSpec::kicked_rotor(7.0, hbar);
    const auto g = GridState::from_function(0, 2 * pi, 512, hbar, [](double) { return Complex(1.0, 0.0); });
    const auto s20 = evolve_kicked_exact(g, sys, 20);
    const auto s100 = evolve_kicked_exact(s20, sys, 80);
    const double v1 = momentum_moments(evolve_kicked_exact(g, sys, 1)).variance;
    const double v20 = momentum_moments(s20).variance;
    const double v100 = momentum_moments(s100).variance;
    EXPECT_GT(v20, 5 * v1);
    EXPECT_LT(v100, 10 * v20);
    EXPECT_NEAR(s100.norm(), 1.0, 1e-12);
}

TEST(Observables, MomentsOfGaussian)
{
    const auto g = packet(0.7, -1.3, 0.4, 0.5);
    const auto x = position_moments(g);
    const auto p = momentum_moments(g);
    EXPECT_NEAR(x.mean, 0.7, 1e-10);
    EXPECT_NEAR(x.variance, 0.16, 1e-10);
    EXPECT_NEAR(p.mean, -1.3, 1e-10);
    EXPECT_NEAR(p.variance, std::pow(0.5 / (2 * 0.4), 2), 1e-10);
    EXPECT_NEAR(region_probability(g, {-12, 12}), 1.0, 1e-12);
    EXPECT_NEAR(region_probability(g, {0.7, 12}), 0.5, 2e-2);
}

TEST(Csv, GridColumns)
{
    const auto g = packet(0, 0, 1, 1, -8, 8, 64);
    std::ostringstream os;
    write_grid_csv(os, g);
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("q,re_psi,im_psi,prob_density\n", 0), 0u);
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 65);
}

#include <benchmark/benchmark.h>

#include "cohertherm/fluctuation.hpp"
#include "cohertherm/opensystem.hpp"
#include "cohertherm/oracle.hpp"
#include "cohertherm/purification.hpp"
#include "cohertherm/rng.hpp"
#include "cohertherm/semiclassics.hpp"

using namespace cohertherm;

namespace {

void BM_IntegrateDoubleWell(benchmark::State& state)
{
    const auto sys = dynamics::SystemSpec::double_well(1.0, 2.0);
    const double t = 1.4;
    const double dt = t / static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dynamics::propagate_endpoint(sys, -1.0, 2.0, t, dt));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntegrateDoubleWell)->Arg(1000)->Arg(10000);

void BM_KickedMap(benchmark::State& state)
{
    const auto sys = dynamics::SystemSpec::kicked_rotor(7.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dynamics::propagate_endpoint(sys, 1.0, 0.1, static_cast<double>(state.range(0))));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KickedMap)->Arg(20)->Arg(100);

void BM_BoundarySearchDoubleWell(benchmark::State& state)
{
    const auto sys = dynamics::SystemSpec::double_well(1.0, 2.0);
    dynamics::BoundarySearchOptions opt;
    opt.dt = 1.4 / 2000;
    opt.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            dynamics::find_boundary_trajectories(sys, -1.0, 1.0, 1.4, {0.0, 4.0}, static_cast<int>(state.range(0)), opt));
    }
}
BENCHMARK(BM_BoundarySearchDoubleWell)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SplitStep(benchmark::State& state)
{
    const double hbar = 0.05;
    const auto sys = dynamics::SystemSpec::double_well(1.0, 2.0, 1.0, hbar);
    const semiclassics::GaussianPacket g{-1.0, 2.3, 0.05};
    const auto psi = oracle::GridState::from_function(-12, 12, static_cast<std::size_t>(state.range(0)), hbar,
                                                      [&](double q) { return g(q, hbar); });
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle::evolve_exact(psi, sys, 0.1, 1e-4));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SplitStep)->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_KickedFloquet(benchmark::State& state)
{
    const double hbar = 0.05;
    const auto sys = dynamics::SystemSpec::kicked_rotor(7.0, hbar);
    const auto psi = oracle::GridState::from_function(0, 2 * kPi, 512, hbar, [](double q) {
        return Complex(std::exp(-4.0 * (q - kPi) * (q - kPi)), 0.0);
    });
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle::evolve_kicked_exact(psi, sys, 20));
    }
}
BENCHMARK(BM_KickedFloquet)->Unit(benchmark::kMicrosecond);

void BM_ChaosTunnelling(benchmark::State& state)
{
    const auto sys = dynamics::SystemSpec::kicked_rotor(7.0, 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(semiclassics::chaos_tunneling_probability(
            sys, {kPi - 0.5, kPi + 0.5}, {-0.5, 0.5}, 10, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_ChaosTunnelling)->Arg(2000)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_Lindblad(benchmark::State& state)
{
    const auto d = static_cast<Eigen::Index>(state.range(0));
    Rng rng(1);
    CMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            a(i, j) = rng.complex_normal();
        }
    }
    opensystem::LindbladModel m;
    m.hamiltonian = 0.05 * (a + a.adjoint());
    for (Eigen::Index k = 0; k < d; ++k) {
        CMatrix l = CMatrix::Zero(d, d);
        l(k, k) = 1.0;
        m.jump_operators.push_back(l);
        m.rates.push_back(0.1);
    }
    const auto rho = DensityMatrix::maximally_mixed(d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(opensystem::evolve_lindblad(rho, m, 1.0, 0.01, {.snapshot_stride = 100}));
    }
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Lindblad)->Arg(2)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PhaseOptimisation(benchmark::State& state)
{
    Rng rng(2);
    const int n = 4;
    const auto s = purification::purify({{0.1, 0.2, 0.3, 0.4}, n}, n);
    const auto u = purification::UnitaryMatrix::random(s.joint_dim(), rng);
    CVector target(s.joint_dim());
    for (Eigen::Index i = 0; i < target.size(); ++i) {
        target(i) = rng.complex_normal();
    }
    target.normalize();
    const auto method = static_cast<purification::PhaseMethod>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(purification::optimize_phases(s, u, target, method));
    }
}
BENCHMARK(BM_PhaseOptimisation)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_StructuredFit(benchmark::State& state)
{
    std::vector<std::pair<double, double>> samples;
    const fluctuation::StructuredCoherenceModel m{2.0, -1.0, 0.5};
    for (int i = 0; i < 50; ++i) {
        const double ds = -3.0 + 6.0 * i / 49.0;
        samples.emplace_back(ds, fluctuation::structured_ratio(ds, m));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fluctuation::fit_structured_model(samples));
    }
}
BENCHMARK(BM_StructuredFit)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();

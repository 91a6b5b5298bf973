#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cohertherm/fluctuation.hpp"
#include "cohertherm/purification.hpp"
#include "cohertherm/rng.hpp"

using namespace cohertherm;
using namespace cohertherm::fluctuation;

namespace {

semiclassics::PropagatorResult result_with(double diagonal, double cross)
{
    semiclassics::PropagatorResult r;
    r.diagonal_sum = diagonal;
    r.cross_sum = cross;
    return r;
}

std::vector<std::pair<double, double>> synthetic(double c, double s0, double w, int n, double noise, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> eps(0.0, noise);
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < n; ++i) {
        const double ds = -3.0 + 6.0 * i / (n - 1);
        const double r = std::exp(ds) * (1.0 + c * std::exp(-(ds - s0) * (ds - s0) / (2 * w * w)));
        out.emplace_back(ds, noise > 0 ? r * (1.0 + eps(gen)) : r);
    }
    return out;
}

}  // namespace

TEST(ClassicalRatio, Examples)
{
    EXPECT_EQ(classical_ratio(0.0), 1.0);
    EXPECT_NEAR(classical_ratio(1.0), 2.718281828, 1e-9);
    EXPECT_NEAR(classical_ratio(-2.0), 0.135335283, 1e-9);
    EXPECT_NEAR(classical_ratio(2.0, 2.0), std::exp(1.0), 1e-15);
    EXPECT_THROW(classical_ratio(1.0, 0.0), Error);
}

TEST(ClassicalRatio, DetailedBalance)
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double ds = u(gen);
        EXPECT_NEAR(classical_ratio(ds) * classical_ratio(-ds), 1.0, 1e-15);
    }
}

TEST(QuantumRatio, Examples)
{
    EXPECT_EQ(quantum_ratio(result_with(0.3, 0.0), result_with(0.7, 0.0), 1.3), classical_ratio(1.3));
    EXPECT_NEAR(quantum_ratio(result_with(0.5, 0.5), result_with(0.2, 0.0), 0.0), 2.0, 1e-15);
    EXPECT_NEAR(quantum_ratio(result_with(1.0, -0.5), result_with(2.0, 1.0), 0.4, 2.0),
                std::exp(0.2) * 0.5 / 1.5, 1e-15);
    try {
        quantum_ratio(result_with(1.0, 0.0), result_with(1.0, -1.0), 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateDenominator);
    }
    EXPECT_THROW(quantum_ratio(result_with(0.0, 0.0), result_with(1.0, 0.0), 0.0), Error);
}

TEST(EntropyChange, Reversed)
{
    const EntropyChange e{1.5, "a->b", "b->a"};
    const auto r = e.reversed();
    EXPECT_EQ(r.delta_s, -1.5);
    EXPECT_EQ(r.forward_label, "b->a");
}

TEST(Structured, Examples)
{
    const StructuredCoherenceModel m{2.0, -1.5, 0.5};
    EXPECT_NEAR(structured_ratio(-1.5, m), std::exp(-1.5) * 3.0, 1e-15);
    const StructuredCoherenceModel off{0.0, -1.5, 0.5};
    for (const double ds : {-3.0, 0.0, 2.2}) {
        EXPECT_EQ(structured_ratio(ds, off), classical_ratio(ds));
    }
    const double tail = -1.5 + 10 * 0.5;
    EXPECT_NEAR(structured_ratio(tail, m) / classical_ratio(tail), 1.0, 1e-10);
    EXPECT_THROW((StructuredCoherenceModel{-0.1, 0, 1}.validate()), Error);
    EXPECT_THROW((StructuredCoherenceModel{1, 0, 0}.validate()), Error);
}

TEST(Structured, DominatesClassical)
{
    const StructuredCoherenceModel m{0.7, 0.3, 0.2};
    for (int i = 0; i <= 400; ++i) {
        const double ds = -10 + 0.05 * i;
        const double s = structured_ratio(ds, m);
        const double c = classical_ratio(ds);
        EXPECT_GE(s, c);
        const double g = std::exp(-(ds - 0.3) * (ds - 0.3) / (2 * 0.04));
        if (c + 0.7 * g * c == c) {
            EXPECT_EQ(s, c);
        } else {
            EXPECT_GT(s, c);
        }
    }
}

TEST(Structured, CurveShape)
{
    const StructuredCoherenceModel m{2.0, -1.5, 0.5};
    const auto curve = structured_curve(m, -3.0, 3.0, 121);
    ASSERT_EQ(curve.points.size(), 121u);
    EXPECT_NO_THROW(curve.validate());
    for (const auto& p : curve.points) {
        EXPECT_EQ(*p.structured, structured_ratio(p.delta_s, m));
        EXPECT_FALSE(p.quantum.has_value());
    }
    const auto& peak = curve.points[30];
    EXPECT_NEAR(peak.delta_s, -1.5, 1e-12);
    EXPECT_GT(*peak.structured / peak.classical, 2.5);
    const auto& right = curve.points[100];
    EXPECT_NEAR(right.delta_s, 2.0, 1e-12);
    EXPECT_LT(*right.structured / right.classical, 1.01);
}

TEST(Structured, CurveThreadsDeterministic)
{
    const StructuredCoherenceModel m{1.0, 0.5, 0.3};
    const auto a = structured_curve(m, -2, 2, 77, 1.0, 1);
    const auto b = structured_curve(m, -2, 2, 77, 1.0, 4);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_EQ(a.points[i].delta_s, b.points[i].delta_s);
        EXPECT_EQ(*a.points[i].structured, *b.points[i].structured);
    }
}

TEST(RatioCurve, ValidateRejectsBadCurves)
{
    RatioCurve c;
    c.points = {{0.0, 1.0, std::nullopt, std::nullopt}, {0.0, 1.0, std::nullopt, std::nullopt}};
    EXPECT_THROW(c.validate(), Error);
    c.points = {{0.0, 1.0, -1.0, std::nullopt}, {1.0, 1.0, std::nullopt, std::nullopt}};
    EXPECT_THROW(c.validate(), Error);
}

TEST(RatioCurve, CsvHasEmptyFieldsForAbsentValues)
{
    RatioCurve c;
    c.points = {{0.0, 1.0, std::nullopt, 2.0}, {1.0, 2.5, 3.0, std::nullopt}};
    std::ostringstream os;
    write_ratio_curve_csv(os, c);
    EXPECT_EQ(os.str(), "delta_s,classical,quantum,structured\n0,1,,2\n1,2.5,3,\n");
}

TEST(Fit, NoiselessRoundTrip)
{
    const auto fit = fit_structured_model(synthetic(2.0, -1.0, 0.5, 50, 0.0, 0));
    EXPECT_NEAR(fit.model.enhancement_strength, 2.0, 1e-6);
    EXPECT_NEAR(fit.model.target_delta_s, -1.0, 1e-6);
    EXPECT_NEAR(fit.model.width, 0.5, 1e-6);
    EXPECT_LT(fit.residual, 1e-20);
}

TEST(Fit, ClassicalDataGivesZeroEnhancement)
{
    const auto fit = fit_structured_model(synthetic(0.0, 0.0, 1.0, 40, 0.0, 0));
    EXPECT_LT(fit.model.enhancement_strength, 1e-8);
}

TEST(Fit, NoisyRoundTrip)
{
    const auto fit = fit_structured_model(synthetic(2.0, -1.0, 0.5, 50, 0.01, 2024));
    EXPECT_NEAR(fit.model.enhancement_strength, 2.0, 0.05 * 2.0);
    EXPECT_NEAR(fit.model.target_delta_s, -1.0, 0.05 * 1.0);
    EXPECT_NEAR(fit.model.width, 0.5, 0.05 * 0.5);
}

TEST(Fit, RejectsTooFewOrNonPositiveSamples)
{
    auto s = synthetic(1.0, 0.0, 0.5, 7, 0.0, 0);
    EXPECT_THROW(fit_structured_model(s), Error);
    s = synthetic(1.0, 0.0, 0.5, 20, 0.0, 0);
    s[3].second = 0.0;
    EXPECT_THROW(fit_structured_model(s), Error);
}

TEST(RegionEntropy, CellCounting)
{
    // dq = 1 on [0, 256) so a closed interval [a, b] holds b - a + 1 points.
    const auto g = oracle::GridState::from_function(0, 256, 256, 1.0, [](double) { return Complex(1.0, 0.0); });
    EXPECT_NEAR(entropy_change_between_regions({10, 19}, {100, 109}, g), 0.0, 1e-15);
    EXPECT_NEAR(entropy_change_between_regions({10, 19}, {100, 119}, g), std::log(2.0), 1e-15);
    EXPECT_NEAR(entropy_change_between_regions({0, 99}, {100, 124}, g, 2.0), 2.0 * std::log(0.25), 1e-15);
    try {
        entropy_change_between_regions({10.2, 10.8}, {1, 5}, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyRegion);
    }
}

TEST(VonNeumann, Examples)
{
    CVector psi(3);
    psi << Complex(0.6, 0), Complex(0, 0.8), 0.0;
    EXPECT_NEAR(von_neumann_entropy(DensityMatrix::pure(psi)), 0.0, 1e-10);
    EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(2)), std::log(2.0), 1e-14);
    RVector p(2);
    p << 0.75, 0.25;
    EXPECT_NEAR(von_neumann_entropy(DensityMatrix::diagonal(p), 1.0), 0.562335, 1e-6);
    EXPECT_NEAR(von_neumann_entropy(DensityMatrix::diagonal(p), 3.0), 3.0 * 0.5623351446188083, 1e-12);
    CMatrix bad = CMatrix::Identity(2, 2);
    try {
        von_neumann_entropy(DensityMatrix::unchecked(bad));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAState);
    }
}

TEST(VonNeumann, UnitaryInvariance)
{
    Rng rng(5);
    for (int d = 2; d <= 8; ++d) {
        CMatrix a(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                a(i, j) = rng.complex_normal();
            }
        }
        CMatrix rho = a * a.adjoint();
        rho /= rho.trace().real();
        rho = 0.5 * (rho + rho.adjoint()).eval();
        const auto u = purification::UnitaryMatrix::random(d, rng).matrix();
        CMatrix rotated = u * rho * u.adjoint();
        rotated = 0.5 * (rotated + rotated.adjoint()).eval();
        EXPECT_NEAR(von_neumann_entropy(DensityMatrix::from_matrix(rho)),
                    von_neumann_entropy(DensityMatrix::from_matrix(rotated)), 1e-9);
    }
}

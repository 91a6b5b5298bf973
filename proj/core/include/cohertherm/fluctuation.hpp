#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cohertherm/common.hpp"
#include "cohertherm/density_matrix.hpp"
#include "cohertherm/oracle.hpp"
#include "cohertherm/semiclassics.hpp"

namespace cohertherm::fluctuation {

struct EntropyChange {
    double delta_s = 0.0;
    std::string forward_label;
    std::string backward_label;

    EntropyChange reversed() const { return {-delta_s, backward_label, forward_label}; }
};

/// exp(delta_s / k_B)
double classical_ratio(double delta_s, double k_B = 1.0);

/// exp(delta_s / k_B) (1 + x_f) / (1 + x_b), with x = cross_sum / diagonal_sum
/// of each direction. Throws DegenerateDenominator when 1 + x_b <= 1e-12.
double quantum_ratio(const semiclassics::PropagatorResult& forward, const semiclassics::PropagatorResult& backward,
                     double delta_s, double k_B = 1.0);

/// Gaussian enhancement of the classical ratio:
///   R(dS) = exp(dS / k_B) (1 + C exp(-(dS - dS0)^2 / (2 sigma^2)))
struct StructuredCoherenceModel {
    double enhancement_strength = 0.0;  // C >= 0
    double target_delta_s = 0.0;        // dS0
    double width = 1.0;                 // sigma > 0

    void validate() const;
};

double structured_ratio(double delta_s, const StructuredCoherenceModel& model, double k_B = 1.0);

struct FitOptions {
    int max_iterations = 500;
    int starts = 5;
};

struct FitResult {
    StructuredCoherenceModel model;
    /// Sum of squared log-ratio residuals at the solution.
    double residual = 0.0;
    int iterations = 0;
    int converged_starts = 0;
};

/// Least-squares fit of (C, dS0, sigma) in log-ratio space by Gauss-Newton
/// with backtracking. Starts place dS0 at the samples where the data sit
/// furthest above the classical ratio, sigma at three sample spacings and C
/// at max(ratio / classical - 1). Throws FitDiverged if no start converges.
FitResult fit_structured_model(const std::vector<std::pair<double, double>>& samples, double k_B = 1.0,
                               const FitOptions& options = {});

/// k_B ln(W_B / W_A), W = number of grid points inside the region.
double entropy_change_between_regions(Interval region_a, Interval region_b, const oracle::GridState& grid,
                                      double k_B = 1.0);

/// -k_B sum lambda ln lambda over eigenvalues above 1e-14. Throws NotAState
/// unless rho is Hermitian, unit trace and PSD within 1e-10.
double von_neumann_entropy(const DensityMatrix& rho, double k_B = 1.0);

struct RatioPoint {
    double delta_s = 0.0;
    double classical = 0.0;
    std::optional<double> quantum;
    std::optional<double> structured;
};

struct RatioCurve {
    std::vector<RatioPoint> points;

    /// delta_s strictly increasing, every present ratio > 0.
    void validate() const;
};

/// n evenly spaced points on [lo, hi] with classical and structured ratios.
RatioCurve structured_curve(const StructuredCoherenceModel& model, double lo, double hi, int n, double k_B = 1.0,
                            unsigned threads = 0);

/// CSV: delta_s,classical,quantum,structured (absent values are empty fields).
void write_ratio_curve_csv(std::ostream& out, const RatioCurve& curve);

}  // namespace cohertherm::fluctuation

#include "cohertherm/fluctuation.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>

#include "cohertherm/csv.hpp"
#include "cohertherm/parallel.hpp"

namespace cohertherm::fluctuation {

namespace {

void require_kb(double k_B)
{
    if (!(k_B > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "k_B must be > 0");
    }
}

}  // namespace

double classical_ratio(double delta_s, double k_B)
{
    require_kb(k_B);
    return std::exp(delta_s / k_B);
}

double quantum_ratio(const semiclassics::PropagatorResult& forward, const semiclassics::PropagatorResult& backward,
                     double delta_s, double k_B)
{
    require_kb(k_B);
    if (!(forward.diagonal_sum > 0.0) || !(backward.diagonal_sum > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "both directions need diagonal_sum > 0");
    }
    const double num = 1.0 + forward.cross_sum / forward.diagonal_sum;
    const double den = 1.0 + backward.cross_sum / backward.diagonal_sum;
    if (den <= 1e-12) {
        throw Error(ErrorCode::DegenerateDenominator,
                    "backward interference factor is " + csv::format(den) + " (total destructive interference)");
    }
    return classical_ratio(delta_s, k_B) * num / den;
}

void StructuredCoherenceModel::validate() const
{
    if (!(enhancement_strength >= 0.0) || !std::isfinite(enhancement_strength)) {
        throw Error(ErrorCode::InvalidArgument, "enhancement strength C must be finite and >= 0");
    }
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw Error(ErrorCode::InvalidArgument, "width sigma must be > 0");
    }
    if (!std::isfinite(target_delta_s)) {
        throw Error(ErrorCode::InvalidArgument, "target delta_s must be finite");
    }
}

double structured_ratio(double delta_s, const StructuredCoherenceModel& model, double k_B)
{
    model.validate();
    const double x = (delta_s - model.target_delta_s) / model.width;
    return classical_ratio(delta_s, k_B) * (1.0 + model.enhancement_strength * std::exp(-0.5 * x * x));
}

namespace {

using Params = Eigen::Vector3d;  // C, dS0, sigma

struct Problem {
    Eigen::VectorXd s;  // delta_s
    Eigen::VectorXd z;  // log ratio - delta_s / k_B

    Eigen::VectorXd residual(const Params& th) const
    {
        Eigen::VectorXd r(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double x = (s(i) - th(1)) / th(2);
            r(i) = z(i) - std::log1p(th(0) * std::exp(-0.5 * x * x));
        }
        return r;
    }

    // Jacobian of the model log(1 + C g); the residual Jacobian is its negative.
    Eigen::MatrixXd jacobian(const Params& th) const
    {
        Eigen::MatrixXd j(s.size(), 3);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double d = s(i) - th(1);
            const double x = d / th(2);
            const double g = std::exp(-0.5 * x * x);
            const double den = 1.0 + th(0) * g;
            j(i, 0) = g / den;
            j(i, 1) = th(0) * g * d / (th(2) * th(2)) / den;
            j(i, 2) = th(0) * g * d * d / (th(2) * th(2) * th(2)) / den;
        }
        return j;
    }
};

Params project(Params th)
{
    th(0) = std::max(th(0), 0.0);
    th(2) = std::max(th(2), 1e-12);
    return th;
}

struct Run {
    Params theta;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

Run gauss_newton(const Problem& pb, Params theta, int max_iterations)
{
    Run run;
    theta = project(theta);
    Eigen::VectorXd r = pb.residual(theta);
    double cost = r.squaredNorm();
    for (int it = 0; it < max_iterations; ++it) {
        run.iterations = it + 1;
        if (!std::isfinite(cost)) {
            break;
        }
        const Eigen::MatrixXd j = pb.jacobian(theta);
        const Params step = j.completeOrthogonalDecomposition().solve(r);
        if (!step.allFinite()) {
            break;
        }
        double alpha = 1.0;
        bool improved = false;
        Params next = theta;
        double next_cost = cost;
        for (int ls = 0; ls < 40; ++ls) {
            next = project(theta + alpha * step);
            next_cost = pb.residual(next).squaredNorm();
            if (std::isfinite(next_cost) && next_cost < cost) {
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        const double moved = (next - theta).norm();
        if (!improved) {
            // No descent left along the Gauss-Newton direction: stationary.
            run.converged = true;
            break;
        }
        const double drop = cost - next_cost;
        theta = next;
        cost = next_cost;
        r = pb.residual(theta);
        if (moved <= 1e-13 * (1.0 + theta.norm()) || drop <= 1e-15 * cost || cost < 1e-30) {
            run.converged = true;
            break;
        }
    }
    run.theta = theta;
    run.cost = cost;
    return run;
}

}  // namespace

FitResult fit_structured_model(const std::vector<std::pair<double, double>>& samples, double k_B,
                               const FitOptions& options)
{
    require_kb(k_B);
    if (samples.size() < 8) {
        throw Error(ErrorCode::InvalidArgument, "need at least 8 samples");
    }
    Problem pb;
    const auto n = static_cast<Eigen::Index>(samples.size());
    pb.s.resize(n);
    pb.z.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& [ds, ratio] = samples[static_cast<std::size_t>(i)];
        if (!(ratio > 0.0) || !std::isfinite(ratio) || !std::isfinite(ds)) {
            throw Error(ErrorCode::InvalidArgument, "ratios must be finite and > 0");
        }
        pb.s(i) = ds;
        pb.z(i) = std::log(ratio) - ds / k_B;
    }

    std::vector<double> sorted(pb.s.data(), pb.s.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double spacing = (sorted.back() - sorted.front()) / static_cast<double>(n - 1);
    if (!(spacing > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "samples need distinct delta_s values");
    }
    const double c0 = std::max(0.0, std::expm1(pb.z.maxCoeff()));

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pb.z(a) > pb.z(b); });
    const auto starts = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, options.starts)), order.size());

    std::vector<Run> runs(starts);
    for (std::size_t k = 0; k < starts; ++k) {
        runs[k] = gauss_newton(pb, Params(c0, pb.s(order[k]), 3.0 * spacing), options.max_iterations);
    }

    FitResult out;
    const Run* best = nullptr;
    for (const auto& r : runs) {
        if (!r.converged) {
            continue;
        }
        ++out.converged_starts;
        if (best == nullptr || r.cost < best->cost) {
            best = &r;
        }
    }
    if (best == nullptr) {
        throw Error(ErrorCode::FitDiverged, "no start converged within " + std::to_string(options.max_iterations) +
                                                " iterations");
    }
    out.model = {best->theta(0), best->theta(1), best->theta(2)};
    out.residual = best->cost;
    out.iterations = best->iterations;
    return out;
}

double entropy_change_between_regions(Interval region_a, Interval region_b, const oracle::GridState& grid,
                                      double k_B)
{
    require_kb(k_B);
    auto count = [&](Interval r) {
        if (!(r.hi >= r.lo) || r.lo < grid.grid_min() || r.hi > grid.grid_max()) {
            throw Error(ErrorCode::InvalidArgument, "region must lie within the grid");
        }
        std::size_t w = 0;
        for (std::size_t j = 0; j < grid.n_points(); ++j) {
            const double q = grid.q(j);
            if (q >= r.lo && q <= r.hi) {
                ++w;
            }
        }
        if (w == 0) {
            throw Error(ErrorCode::EmptyRegion,
                        "[" + csv::format(r.lo) + ", " + csv::format(r.hi) + "] holds no grid cell");
        }
        return static_cast<double>(w);
    };
    const double wa = count(region_a);
    const double wb = count(region_b);
    return k_B * std::log(wb / wa);
}

double von_neumann_entropy(const DensityMatrix& rho, double k_B)
{
    require_kb(k_B);
    const DensityMatrix checked = DensityMatrix::from_matrix(rho.matrix(), {1e-10, 1e-10, -1e-10});
    const RVector lambda = checked.eigenvalues();
    CompensatedSum<double> s;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > 1e-14) {
            s.add(-lambda(i) * std::log(lambda(i)));
        }
    }
    return k_B * s.value();
}

void RatioCurve::validate() const
{
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (i > 0 && !(p.delta_s > points[i - 1].delta_s)) {
            throw Error(ErrorCode::InvalidArgument, "delta_s must be strictly increasing");
        }
        if (!(p.classical > 0.0) || (p.quantum && !(*p.quantum > 0.0)) || (p.structured && !(*p.structured > 0.0))) {
            throw Error(ErrorCode::InvalidArgument, "ratios must be > 0");
        }
    }
}

RatioCurve structured_curve(const StructuredCoherenceModel& model, double lo, double hi, int n, double k_B,
                            unsigned threads)
{
    model.validate();
    require_kb(k_B);
    if (n < 2 || !(hi > lo)) {
        throw Error(ErrorCode::InvalidArgument, "curve needs n >= 2 points on a non-empty range");
    }
    RatioCurve curve;
    curve.points.resize(static_cast<std::size_t>(n));
    parallel_for(
        curve.points.size(),
        [&](std::size_t i) {
            const double ds = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
            curve.points[i] = {ds, classical_ratio(ds, k_B), std::nullopt, structured_ratio(ds, model, k_B)};
        },
        threads);
    curve.validate();
    return curve;
}

void write_ratio_curve_csv(std::ostream& out, const RatioCurve& curve)
{
    csv::Writer w(out);
    w.header({"delta_s", "classical", "quantum", "structured"});
    for (const auto& p : curve.points) {
        w.row({csv::format(p.delta_s), csv::format(p.classical), p.quantum ? csv::format(*p.quantum) : "",
               p.structured ? csv::format(*p.structured) : ""});
    }
}

}  // namespace cohertherm::fluctuation

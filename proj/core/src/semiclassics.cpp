#include "cohertherm/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "cohertherm/csv.hpp"
#include "cohertherm/parallel.hpp"

namespace cohertherm::semiclassics {

namespace {

const Complex kGlobalPhase = std::polar(1.0, -0.25 * kPi);

Complex kernel_term(const dynamics::Trajectory& traj, double hbar)
{
    const double m21 = traj.stability.m21;
    if (std::abs(m21) < dynamics::kCausticThreshold) {
        throw Error(ErrorCode::CausticContribution,
                    "trajectory with p_i = " + csv::format(traj.p_i) + " has |m21| = " + csv::format(std::abs(m21)));
    }
    const double mag = 1.0 / std::sqrt(kTwoPi * hbar * std::abs(m21));
    return mag * std::polar(1.0, traj.action / hbar - 0.5 * kPi * traj.maslov_index) * kGlobalPhase;
}

bool same_endpoint(double a, double b, bool circle)
{
    double d = a - b;
    if (circle) {
        d -= kTwoPi * std::round(d / kTwoPi);
    }
    return std::abs(d) <= 1e-8 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

Complex TrajectoryContribution::amplitude() const
{
    return amplitude_magnitude * std::polar(1.0, phase) * kGlobalPhase;
}

TrajectoryContribution make_contribution(double amplitude_magnitude, double action, int maslov_index, double hbar,
                                         std::size_t branch_index)
{
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "hbar must be > 0");
    }
    if (!(amplitude_magnitude >= 0.0) || !std::isfinite(amplitude_magnitude) || !std::isfinite(action)) {
        throw Error(ErrorCode::InvalidArgument, "contribution must have finite magnitude >= 0 and finite action");
    }
    return {branch_index, amplitude_magnitude, action, maslov_index, action / hbar - 0.5 * kPi * maslov_index};
}

PropagatorResult assemble(std::vector<TrajectoryContribution> contributions)
{
    std::stable_sort(contributions.begin(), contributions.end(),
                     [](const auto& a, const auto& b) { return a.action < b.action; });
    CompensatedSum<Complex> total;
    CompensatedSum<double> diagonal;
    CompensatedSum<double> cross;
    for (const auto& c : contributions) {
        const Complex a = c.amplitude();
        // 2 Re(a conj(sum of earlier terms)) adds every pair once in each order.
        cross.add(2.0 * (a * std::conj(total.value())).real());
        total.add(a);
        diagonal.add(c.amplitude_magnitude * c.amplitude_magnitude);
    }
    PropagatorResult r;
    r.total_amplitude = total.value();
    r.diagonal_sum = diagonal.value();
    r.cross_sum = cross.value();
    r.contributions = std::move(contributions);
    return r;
}

PropagatorResult vvg_amplitude(const std::vector<dynamics::Trajectory>& trajectories, double hbar)
{
    if (trajectories.empty()) {
        throw Error(ErrorCode::EmptyTrajectorySet, "no trajectories to sum");
    }
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "hbar must be > 0");
    }
    const auto& first = trajectories.front();
    const bool circle = first.n_kicks > 0;
    std::vector<TrajectoryContribution> contributions;
    contributions.reserve(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& tr = trajectories[i];
        if (!same_endpoint(tr.q_i, first.q_i, circle) || !same_endpoint(tr.q_f, first.q_f, circle) ||
            std::abs(tr.t - first.t) > 1e-12 * std::max(1.0, std::abs(first.t))) {
            throw Error(ErrorCode::InvalidArgument, "trajectories do not share (q_i, q_f, t)");
        }
        if (std::abs(tr.stability.m21) < dynamics::kCausticThreshold) {
            throw Error(ErrorCode::CausticContribution, "trajectory " + std::to_string(i) + " has |m21| = " +
                                                            csv::format(std::abs(tr.stability.m21)));
        }
        const auto mp = dynamics::maslov_and_prefactor(tr, hbar);
        contributions.push_back(make_contribution(mp.prefactor_magnitude, tr.action, mp.nu, hbar, i));
    }
    return assemble(std::move(contributions));
}

TransitionProbability transition_probability(const PropagatorResult& result) noexcept
{
    return {std::norm(result.total_amplitude), result.diagonal_sum, result.cross_sum};
}

Complex GaussianPacket::operator()(double q, double hbar) const
{
    const double x = q - q0;
    const double norm = std::pow(kTwoPi * sigma * sigma, -0.25);
    return norm * std::exp(-x * x / (4.0 * sigma * sigma)) * std::polar(1.0, p0 * x / hbar);
}

namespace {

struct BranchAccumulator {
    CompensatedSum<Complex> amplitude;
    double best_weight = -1.0;
    double action = 0.0;
    int maslov = 0;
};

std::vector<double> trapezoid_nodes(double center, double half_width, int n, std::vector<double>& weights)
{
    std::vector<double> x(static_cast<std::size_t>(n));
    weights.assign(x.size(), 0.0);
    const double h = 2.0 * half_width / (n - 1);
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = center - half_width + h * i;
        weights[static_cast<std::size_t>(i)] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
    return x;
}

}  // namespace

PropagatorResult packet_transition_amplitude(const dynamics::SystemSpec& system, const GaussianPacket& from,
                                             const GaussianPacket& to, double t, const PacketOptions& options)
{
    system.validate();
    if (system.is_map()) {
        throw Error(ErrorCode::InvalidArgument, "packet propagation needs a continuous system");
    }
    if (!(t > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "t must be > 0");
    }
    if (!(from.sigma > 0.0) || !(to.sigma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "packet widths must be > 0");
    }
    if (options.nodes < 3) {
        throw Error(ErrorCode::InvalidArgument, "need at least 3 quadrature nodes");
    }
    const double hbar = system.hbar;
    Interval window = options.p_window;
    if (!(window.width() > 0.0)) {
        const double half = 5.0 * hbar / (2.0 * from.sigma);
        window = {from.p0 - half, from.p0 + half};
    }

    std::vector<double> wx;
    std::vector<double> wy;
    const auto xs = trapezoid_nodes(from.q0, options.extent_sigmas * from.sigma, options.nodes, wx);
    const auto ys = trapezoid_nodes(to.q0, options.extent_sigmas * to.sigma, options.nodes, wy);

    dynamics::BoundarySearchOptions search;
    search.dt = options.dt;
    search.threads = 1;

    std::vector<std::map<std::size_t, BranchAccumulator>> per_node(xs.size());
    parallel_for(
        xs.size(),
        [&](std::size_t i) {
            const Complex gx = from(xs[i], hbar) * wx[i];
            const auto scan = dynamics::scan_seeds(system, xs[i], t, window, options.n_seeds, options.dt, 1);
            auto& branches = per_node[i];
            for (std::size_t j = 0; j < ys.size(); ++j) {
                const Complex gy = std::conj(to(ys[j], hbar)) * wy[j];
                const double weight = std::abs(gx * gy);
                const auto found = dynamics::find_boundary_trajectories(system, scan, ys[j], search);
                for (std::size_t b = 0; b < found.trajectories.size(); ++b) {
                    const auto& tr = found.trajectories[b];
                    auto& acc = branches[b];
                    acc.amplitude.add(gy * kernel_term(tr, hbar) * gx);
                    if (weight > acc.best_weight) {
                        acc.best_weight = weight;
                        acc.action = tr.action;
                        acc.maslov = tr.maslov_index;
                    }
                }
            }
        },
        options.threads);

    std::map<std::size_t, BranchAccumulator> merged;
    for (const auto& node : per_node) {
        for (const auto& [b, acc] : node) {
            auto& m = merged[b];
            m.amplitude.add(acc.amplitude.value());
            if (acc.best_weight > m.best_weight) {
                m.best_weight = acc.best_weight;
                m.action = acc.action;
                m.maslov = acc.maslov;
            }
        }
    }
    if (merged.empty()) {
        throw Error(ErrorCode::EmptyTrajectorySet, "no trajectories connect the two packets");
    }

    std::vector<TrajectoryContribution> contributions;
    for (const auto& [b, acc] : merged) {
        const Complex a = acc.amplitude.value();
        const double phi = std::arg(a) + 0.25 * kPi + 0.5 * kPi * acc.maslov;
        const double sheet = std::round((acc.action / hbar - phi) / kTwoPi);
        const double action = hbar * (phi + kTwoPi * sheet);
        contributions.push_back(make_contribution(std::abs(a), action, acc.maslov, hbar, b));
    }
    return assemble(std::move(contributions));
}

std::vector<double> representative_points(Interval region, int count)
{
    if (count < 1) {
        throw Error(ErrorCode::InvalidArgument, "need at least one point per region");
    }
    std::vector<double> pts(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        pts[static_cast<std::size_t>(j)] = region.lo + (j + 0.5) * region.width() / count;
    }
    return pts;
}

bool on_circle_in(double q, Interval region) noexcept
{
    double d = std::fmod(q - region.lo, kTwoPi);
    if (d < 0.0) {
        d += kTwoPi;
    }
    return d <= region.width();
}

ChaosTunnelingResult chaos_tunneling_probability(const dynamics::SystemSpec& system, Interval region_a,
                                                 Interval region_b, int n_kicks, int n_seeds,
                                                 const ChaosTunnelingOptions& options)
{
    system.validate();
    if (!system.is_map()) {
        throw Error(ErrorCode::InvalidArgument, "chaos tunneling needs a kicked_rotor system");
    }
    if (n_kicks < 0) {
        throw Error(ErrorCode::InvalidArgument, "n_kicks must be >= 0");
    }
    for (const auto& r : {region_a, region_b}) {
        if (!(r.width() > 0.0) || r.width() > kTwoPi) {
            throw Error(ErrorCode::InvalidArgument, "region width must lie in (0, 2 pi]");
        }
    }
    if (!(options.p_window.width() > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "momentum window is degenerate");
    }
    const auto as = representative_points(region_a, options.points_per_region);
    const auto bs = representative_points(region_b, options.points_per_region);

    ChaosTunnelingResult out;
    if (n_kicks == 0) {
        const auto inside = std::count_if(as.begin(), as.end(), [&](double a) { return on_circle_in(a, region_b); });
        out.probability = static_cast<double>(inside) / static_cast<double>(as.size());
        out.coherent_part = out.probability;
        return out;
    }

    const double hbar = system.hbar;
    const double dp = options.p_window.width();
    const std::size_t nb = bs.size();
    struct PairResult {
        double coherent = 0.0;
        double incoherent = 0.0;
        std::size_t refined = 0;
        std::size_t unresolved = 0;
        std::size_t landed = 0;
        bool coarse = false;
    };
    const double cell_width = region_b.width() / static_cast<double>(nb);
    std::vector<PairResult> pairs(as.size() * nb);

    dynamics::BoundarySearchOptions search;
    search.max_windings_per_bracket = options.max_windings_per_bracket;
    search.threads = 1;
    parallel_for(
        as.size(),
        [&](std::size_t i) {
            const auto scan =
                dynamics::scan_seeds(system, as[i], static_cast<double>(n_kicks), options.p_window, n_seeds, 0.0, 1);
            for (std::size_t j = 0; j < nb; ++j) {
                const auto found = dynamics::find_boundary_trajectories(system, scan, bs[j], search);
                PairResult& pr = pairs[i * nb + j];
                CompensatedSum<Complex> k;
                CompensatedSum<double> found_density;
                for (const auto& tr : found.trajectories) {
                    k.add(kernel_term(tr, hbar));
                    found_density.add(1.0 / (dp * std::abs(tr.stability.m21)));
                }
                const Interval cell{bs[j] - 0.5 * cell_width, bs[j] + 0.5 * cell_width};
                const auto landed = std::count_if(scan.q.begin(), scan.q.end(),
                                                  [&](double q) { return on_circle_in(q, cell); });
                const double seed_density =
                    static_cast<double>(landed) / (static_cast<double>(scan.q.size()) * cell_width);
                for (const auto& u : found.unresolved) {
                    pr.unresolved += u.windings;
                }
                pr.coherent = kTwoPi * hbar / dp * std::norm(k.value());
                pr.incoherent = std::max(0.0, seed_density - found_density.value());
                pr.refined = found.trajectories.size();
                pr.landed = static_cast<std::size_t>(landed);
                pr.coarse = found.window_too_coarse;
            }
        },
        options.threads);

    CompensatedSum<double> coherent;
    CompensatedSum<double> incoherent;
    std::size_t landed = 0;
    for (const auto& pr : pairs) {
        coherent.add(pr.coherent);
        incoherent.add(pr.incoherent);
        out.refined_trajectories += pr.refined;
        out.unresolved_roots += pr.unresolved;
        landed += pr.landed;
        out.window_too_coarse = out.window_too_coarse || pr.coarse;
    }
    const double scale = region_b.width() / static_cast<double>(pairs.size());
    out.coherent_part = scale * coherent.value();
    out.incoherent_part = scale * incoherent.value();
    out.probability = out.coherent_part + out.incoherent_part;
    out.no_trajectory_found = out.refined_trajectories == 0 && out.unresolved_roots == 0 && landed == 0;
    if (out.no_trajectory_found) {
        out.probability = 0.0;
    }
    return out;
}

void write_propagator_csv(std::ostream& out, const PropagatorResult& result)
{
    csv::Writer w(out);
    w.header({"branch_index", "action", "maslov", "amplitude_magnitude", "phase"});
    for (const auto& c : result.contributions) {
        w.row({csv::format(static_cast<long long>(c.branch_index)), csv::format(c.action),
               csv::format(static_cast<long long>(c.maslov_index)), csv::format(c.amplitude_magnitude),
               csv::format(c.phase)});
    }
    const auto p = transition_probability(result);
    w.row({"TOTAL", csv::format(result.total_amplitude.real()), csv::format(result.total_amplitude.imag()),
           csv::format(p.p_classical), csv::format(p.p_interference)});
}

}  // namespace cohertherm::semiclassics

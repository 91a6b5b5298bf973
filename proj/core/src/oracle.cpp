#include "cohertherm/oracle.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <ostream>

#include "cohertherm/csv.hpp"
#include "cohertherm/semiclassics.hpp"

namespace cohertherm::oracle {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

// In-place forward/backward transform pair on one buffer. FFTW's planner is
// not thread-safe, so plan creation and destruction are serialised.
class Fft {
public:
    explicit Fft(CVector& buffer) : data_(reinterpret_cast<fftw_complex*>(buffer.data()))
    {
        const int n = static_cast<int>(buffer.size());
        std::lock_guard lock(planner_mutex());
        forward_ = fftw_plan_dft_1d(n, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(n, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }

private:
    fftw_complex* data_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

bool is_power_of_two(std::size_t n) noexcept
{
    return n != 0 && (n & (n - 1)) == 0;
}

void check_grid(double grid_min, double grid_max, std::size_t n, double hbar)
{
    if (!(grid_max > grid_min) || !std::isfinite(grid_min) || !std::isfinite(grid_max)) {
        throw Error(ErrorCode::InvalidArgument, "grid bounds must satisfy grid_min < grid_max");
    }
    if (n < 64 || !is_power_of_two(n)) {
        throw Error(ErrorCode::InvalidArgument, "n_points must be a power of two >= 64");
    }
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "hbar must be > 0");
    }
}

// Angular wavenumbers in FFT order.
RVector wavenumbers(std::size_t n, double length)
{
    RVector k(static_cast<Eigen::Index>(n));
    const double base = kTwoPi / length;
    const auto half = static_cast<long long>(n / 2);
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<long long>(j);
        k(static_cast<Eigen::Index>(j)) = base * static_cast<double>(jj < half ? jj : jj - static_cast<long long>(n));
    }
    return k;
}

double edge_probability(const CVector& psi, double dq)
{
    const auto n = psi.size();
    const auto edge = static_cast<Eigen::Index>(std::ceil(0.05 * static_cast<double>(n)));
    return (psi.head(edge).squaredNorm() + psi.tail(edge).squaredNorm()) * dq;
}

}  // namespace

GridState::GridState(double grid_min, double grid_max, double hbar, CVector psi)
    : grid_min_(grid_min), grid_max_(grid_max), hbar_(hbar), psi_(std::move(psi))
{
}

GridState with_amplitudes(const GridState& like, CVector psi)
{
    return GridState(like.grid_min_, like.grid_max_, like.hbar_, std::move(psi));
}

GridState GridState::from_function(double grid_min, double grid_max, std::size_t n_points, double hbar,
                                   const std::function<Complex(double)>& f)
{
    check_grid(grid_min, grid_max, n_points, hbar);
    CVector psi(static_cast<Eigen::Index>(n_points));
    const double dq = (grid_max - grid_min) / static_cast<double>(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        psi(static_cast<Eigen::Index>(j)) = f(grid_min + dq * static_cast<double>(j));
    }
    const double norm = std::sqrt(psi.squaredNorm() * dq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorCode::InvalidArgument, "wavefunction vanishes on the grid");
    }
    psi /= norm;
    return GridState(grid_min, grid_max, hbar, std::move(psi));
}

GridState GridState::from_amplitudes(double grid_min, double grid_max, double hbar, CVector amplitudes)
{
    check_grid(grid_min, grid_max, static_cast<std::size_t>(amplitudes.size()), hbar);
    GridState s(grid_min, grid_max, hbar, std::move(amplitudes));
    if (std::abs(s.norm() - 1.0) > 1e-10) {
        throw Error(ErrorCode::InvalidArgument, "grid state is not normalised (norm " + csv::format(s.norm()) + ")");
    }
    return s;
}

double GridState::norm() const
{
    return psi_.squaredNorm() * dq();
}

bool GridState::same_grid(const GridState& other) const noexcept
{
    return psi_.size() == other.psi_.size() && grid_min_ == other.grid_min_ && grid_max_ == other.grid_max_ &&
           hbar_ == other.hbar_;
}

Complex GridState::inner(const GridState& other) const
{
    if (!same_grid(other)) {
        throw Error(ErrorCode::GridMismatch, "states live on different grids");
    }
    return psi_.dot(other.psi_) * dq();
}

GridState evolve_exact(const GridState& state, const dynamics::SystemSpec& system, double t, double dt)
{
    system.validate();
    if (system.is_map()) {
        throw Error(ErrorCode::InvalidArgument, "use evolve_kicked_exact for kicked maps");
    }
    if (!(dt > 0.0) || !(t >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "need dt > 0 and t >= 0");
    }
    if (state.hbar() != system.hbar) {
        throw Error(ErrorCode::GridMismatch, "state and system disagree on hbar");
    }
    const double dq = state.dq();
    CVector psi = state.amplitudes();
    if (edge_probability(psi, dq) > 1e-6) {
        throw Error(ErrorCode::BoundaryLeak, "initial state touches the outer 5% of the grid");
    }
    if (t == 0.0) {
        return state;
    }
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t / dt - 1e-9)));
    const double h = t / static_cast<double>(steps);
    const auto n = psi.size();
    const double hbar = system.hbar;

    CVector half_v(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        half_v(j) = std::polar(1.0, -0.5 * h * system.potential(state.q(static_cast<std::size_t>(j))) / hbar);
    }
    const RVector k = wavenumbers(static_cast<std::size_t>(n), state.grid_max() - state.grid_min());
    CVector kinetic(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        kinetic(j) = std::polar(1.0, -h * hbar * k(j) * k(j) / (2.0 * system.mass)) / static_cast<double>(n);
    }

    Fft fft(psi);
    for (std::size_t s = 0; s < steps; ++s) {
        psi.array() *= half_v.array();
        fft.forward();
        psi.array() *= kinetic.array();
        fft.backward();
        psi.array() *= half_v.array();
        if (edge_probability(psi, dq) > 1e-6) {
            throw Error(ErrorCode::BoundaryLeak, "probability reached the outer 5% of the grid at t = " +
                                                     csv::format(h * static_cast<double>(s + 1)));
        }
    }
    if (!psi.allFinite()) {
        throw Error(ErrorCode::NonFiniteState, "split-step produced non-finite amplitudes");
    }
    return with_amplitudes(state, std::move(psi));
}

GridState evolve_kicked_exact(const GridState& state, const dynamics::SystemSpec& system, int n_kicks)
{
    system.validate();
    if (!system.is_map()) {
        throw Error(ErrorCode::InvalidArgument, "evolve_kicked_exact needs a kicked_rotor system");
    }
    if (n_kicks < 0) {
        throw Error(ErrorCode::InvalidArgument, "n_kicks must be >= 0");
    }
    if (std::abs(state.grid_min()) > 1e-12 || std::abs(state.grid_max() - kTwoPi) > 1e-12) {
        throw Error(ErrorCode::GridMismatch, "kicked evolution needs the grid [0, 2 pi)");
    }
    if (state.hbar() != system.hbar) {
        throw Error(ErrorCode::GridMismatch, "state and system disagree on hbar");
    }
    CVector psi = state.amplitudes();
    if (n_kicks == 0) {
        return state;
    }
    const auto n = psi.size();
    const double hbar = system.hbar;
    CVector kick(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        kick(j) = std::polar(1.0, -system.potential(state.q(static_cast<std::size_t>(j))) / hbar);
    }
    const RVector k = wavenumbers(static_cast<std::size_t>(n), kTwoPi);
    CVector free(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        free(j) = std::polar(1.0, -hbar * k(j) * k(j) / (2.0 * system.mass)) / static_cast<double>(n);
    }
    Fft fft(psi);
    for (int s = 0; s < n_kicks; ++s) {
        psi.array() *= kick.array();
        fft.forward();
        psi.array() *= free.array();
        fft.backward();
    }
    return with_amplitudes(state, std::move(psi));
}

double transition_probability_exact(const GridState& initial, const GridState& final,
                                    const dynamics::SystemSpec& system, double t, double dt)
{
    if (!initial.same_grid(final)) {
        throw Error(ErrorCode::GridMismatch, "initial and final states live on different grids");
    }
    if (system.is_map()) {
        const double n = std::round(t);
        if (std::abs(n - t) > 1e-9) {
            throw Error(ErrorCode::InvalidArgument, "kicked maps need an integer kick count");
        }
        return std::norm(final.inner(evolve_kicked_exact(initial, system, static_cast<int>(n))));
    }
    return std::norm(final.inner(evolve_exact(initial, system, t, dt)));
}

RMatrix grid_hamiltonian(const dynamics::SystemSpec& system, double grid_min, double grid_max, std::size_t n_points)
{
    system.validate();
    check_grid(grid_min, grid_max, n_points, system.hbar);
    const auto n = static_cast<Eigen::Index>(n_points);
    const double length = grid_max - grid_min;
    const double dq = length / static_cast<double>(n_points);
    const RVector k = wavenumbers(n_points, length);
    // T_jl = (1/N) sum_k e_k cos(k (j - l) dq) depends on j - l only.
    RVector row(n);
    for (Eigen::Index d = 0; d < n; ++d) {
        CompensatedSum<double> acc;
        for (Eigen::Index m = 0; m < n; ++m) {
            const double e = system.hbar * system.hbar * k(m) * k(m) / (2.0 * system.mass);
            acc.add(e * std::cos(k(m) * dq * static_cast<double>(d)));
        }
        row(d) = acc.value() / static_cast<double>(n);
    }
    RMatrix h(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < n; ++l) {
            h(j, l) = row(std::abs(j - l));
        }
        h(j, j) += system.potential(grid_min + dq * static_cast<double>(j));
    }
    return h;
}

Moments position_moments(const GridState& state)
{
    CompensatedSum<double> m1;
    CompensatedSum<double> m2;
    const double dq = state.dq();
    for (std::size_t j = 0; j < state.n_points(); ++j) {
        const double w = std::norm(state.amplitudes()(static_cast<Eigen::Index>(j))) * dq;
        const double q = state.q(j);
        m1.add(w * q);
        m2.add(w * q * q);
    }
    const double mean = m1.value() / state.norm();
    return {mean, m2.value() / state.norm() - mean * mean};
}

Moments momentum_moments(const GridState& state)
{
    CVector c = state.amplitudes();
    Fft fft(c);
    fft.forward();
    const RVector k = wavenumbers(state.n_points(), state.grid_max() - state.grid_min());
    const double total = c.squaredNorm();
    CompensatedSum<double> m1;
    CompensatedSum<double> m2;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        const double w = std::norm(c(j)) / total;
        const double p = state.hbar() * k(j);
        m1.add(w * p);
        m2.add(w * p * p);
    }
    return {m1.value(), m2.value() - m1.value() * m1.value()};
}

double region_probability(const GridState& state, Interval region)
{
    const bool circle = std::abs(state.grid_min()) < 1e-12 && std::abs(state.grid_max() - kTwoPi) < 1e-12;
    CompensatedSum<double> acc;
    for (std::size_t j = 0; j < state.n_points(); ++j) {
        const double q = state.q(j);
        const bool inside = circle ? semiclassics::on_circle_in(q, region) : (q >= region.lo && q <= region.hi);
        if (inside) {
            acc.add(std::norm(state.amplitudes()(static_cast<Eigen::Index>(j))));
        }
    }
    return acc.value() * state.dq();
}

double kicked_region_transfer_exact(const dynamics::SystemSpec& system, Interval region_a, Interval region_b,
                                    int n_kicks, Interval p_window, int points_per_region, std::size_t n_points)
{
    system.validate();
    check_grid(0.0, kTwoPi, n_points, system.hbar);
    const auto as = semiclassics::representative_points(region_a, points_per_region);
    const RVector k = wavenumbers(n_points, kTwoPi);
    CompensatedSum<double> total;
    for (const double a : as) {
        CVector c = CVector::Zero(static_cast<Eigen::Index>(n_points));
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            const double p = system.hbar * k(j);
            if (p >= p_window.lo - 1e-12 && p <= p_window.hi + 1e-12) {
                c(j) = std::polar(1.0, -k(j) * a);
            }
        }
        if (c.squaredNorm() == 0.0) {
            throw Error(ErrorCode::InvalidArgument, "momentum window holds no grid momenta");
        }
        // c holds Fourier coefficients of psi(q) ~ sum_k c_k e^{i k q}.
        CVector psi = c;
        Fft fft(psi);
        fft.backward();
        const double dq = kTwoPi / static_cast<double>(n_points);
        psi /= std::sqrt(psi.squaredNorm() * dq);
        const auto start = GridState::from_amplitudes(0.0, kTwoPi, system.hbar, std::move(psi));
        total.add(region_probability(evolve_kicked_exact(start, system, n_kicks), region_b));
    }
    return total.value() / static_cast<double>(as.size());
}

void write_grid_csv(std::ostream& out, const GridState& state)
{
    csv::Writer w(out);
    w.header({"q", "re_psi", "im_psi", "prob_density"});
    for (std::size_t j = 0; j < state.n_points(); ++j) {
        const Complex a = state.amplitudes()(static_cast<Eigen::Index>(j));
        w.row({csv::format(state.q(j)), csv::format(a.real()), csv::format(a.imag()), csv::format(std::norm(a))});
    }
}

}  // namespace cohertherm::oracle

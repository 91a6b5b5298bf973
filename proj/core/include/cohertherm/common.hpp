#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cohertherm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Every numerical failure the library reports. The CLI prints the name
/// verbatim, so keep these in sync with error_name().
enum class ErrorCode {
    InvalidArgument,
    NonFiniteState,
    CausticAtEndpoint,
    EmptyTrajectorySet,
    CausticContribution,
    BoundaryLeak,
    GridMismatch,
    DegenerateDenominator,
    FitDiverged,
    EmptyRegion,
    NotAState,
    AncillaTooSmall,
    LengthMismatch,
    DimensionMismatch,
    TargetNotNormalized,
    GridTooLarge,
    NotUnitary,
    NotHermitian,
    StabilityViolation,
    PositivityLoss,
    AsymmetricCouplings,
    CutoffTooSmall,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Closed interval [lo, hi] on the line or, for kicked maps, on the circle.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    double center() const noexcept { return 0.5 * (lo + hi); }
};

/// Neumaier-compensated accumulator. Works for double and std::complex<double>.
template <typename T>
class CompensatedSum {
public:
    void add(const T& x) noexcept
    {
        if constexpr (std::is_same_v<T, Complex>) {
            re_.add(x.real());
            im_.add(x.imag());
        } else {
            const T t = sum_ + x;
            if (std::abs(sum_) >= std::abs(x)) {
                comp_ += (sum_ - t) + x;
            } else {
                comp_ += (x - t) + sum_;
            }
            sum_ = t;
        }
    }

    T value() const noexcept
    {
        if constexpr (std::is_same_v<T, Complex>) {
            return {re_.value(), im_.value()};
        } else {
            return sum_ + comp_;
        }
    }

private:
    struct Empty {};
    using Part = std::conditional_t<std::is_same_v<T, Complex>, CompensatedSum<double>, Empty>;
    T sum_{};
    T comp_{};
    [[no_unique_address]] Part re_{};
    [[no_unique_address]] Part im_{};
};

}  // namespace cohertherm

#include "cohertherm/common.hpp"

namespace cohertherm {

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::CausticAtEndpoint: return "CausticAtEndpoint";
    case ErrorCode::EmptyTrajectorySet: return "EmptyTrajectorySet";
    case ErrorCode::CausticContribution: return "CausticContribution";
    case ErrorCode::BoundaryLeak: return "BoundaryLeak";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::NotAState: return "NotAState";
    case ErrorCode::AncillaTooSmall: return "AncillaTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TargetNotNormalized: return "TargetNotNormalized";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::PositivityLoss: return "PositivityLoss";
    case ErrorCode::AsymmetricCouplings: return "AsymmetricCouplings";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    }
    return "Unknown";
}

}  // namespace cohertherm

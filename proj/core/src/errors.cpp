#include "cosym/errors.hpp"

namespace cosym {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::PointOutsideDomain: return "PointOutsideDomain";
    case Errc::DegenerateMetric: return "DegenerateMetric";
    case Errc::JetOrderUnsupported: return "JetOrderUnsupported";
    case Errc::StencilOutsideDomain: return "StencilOutsideDomain";
    case Errc::InvalidExpression: return "InvalidExpression";
    case Errc::SlotOutOfRange: return "SlotOutOfRange";
    case Errc::VarianceMismatchWithoutMetric: return "VarianceMismatchWithoutMetric";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SymmetryViolation: return "SymmetryViolation";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InsufficientJetOrder: return "InsufficientJetOrder";
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::VarianceMaskMismatch: return "VarianceMaskMismatch";
    case Errc::RankDeficiencyAmbiguous: return "RankDeficiencyAmbiguous";
    case Errc::PreconditionD2: return "PreconditionD2";
    case Errc::IdentityNotSatisfied: return "IdentityNotSatisfied";
    case Errc::FiberDimensionJump: return "FiberDimensionJump";
    case Errc::SpecInvariantViolated: return "SpecInvariantViolated";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NotEquiaffine: return "NotEquiaffine";
    case Errc::LeftDomain: return "LeftDomain";
    case Errc::StepSizeUnderflow: return "StepSizeUnderflow";
    case Errc::StencilOutsideBox: return "StencilOutsideBox";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

} // namespace cosym

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cosym {

enum class Errc {
    PointOutsideDomain,
    DegenerateMetric,
    JetOrderUnsupported,
    StencilOutsideDomain,
    InvalidExpression,
    SlotOutOfRange,
    VarianceMismatchWithoutMetric,
    DimensionMismatch,
    SymmetryViolation,
    EmptyInput,
    InsufficientJetOrder,
    DimensionTooSmall,
    VarianceMaskMismatch,
    RankDeficiencyAmbiguous,
    PreconditionD2,
    IdentityNotSatisfied,
    FiberDimensionJump,
    SpecInvariantViolated,
    ShapeMismatch,
    NotEquiaffine,
    LeftDomain,
    StepSizeUnderflow,
    StencilOutsideBox,
    ConfigInvalid,
    IoFailure,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace cosym

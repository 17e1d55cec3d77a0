/**
 * @file error.hpp
 * @brief Error codes and the exception type thrown by hopfsr.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hopfsr {

enum class errc {
    boundary_chart,
    singular_field,
    no_oscillation,
    quadrature_failure,
    step_rejected,
    singular_approach,
    insufficient_events,
    ambiguous_zero,
    empty_level,
    not_closed,
    not_oscillating,
    infeasible_ratio,
    not_coprime,
    stencil_out_of_domain,
    invalid_argument,
};

constexpr std::string_view to_string(errc code) noexcept
{
    switch (code) {
    case errc::boundary_chart: return "BoundaryChart";
    case errc::singular_field: return "SingularField";
    case errc::no_oscillation: return "NoOscillation";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::step_rejected: return "StepRejected";
    case errc::singular_approach: return "SingularApproach";
    case errc::insufficient_events: return "InsufficientEvents";
    case errc::ambiguous_zero: return "AmbiguousZero";
    case errc::empty_level: return "EmptyLevel";
    case errc::not_closed: return "NotClosed";
    case errc::not_oscillating: return "NotOscillating";
    case errc::infeasible_ratio: return "InfeasibleRatio";
    case errc::not_coprime: return "NotCoprime";
    case errc::stencil_out_of_domain: return "StencilOutOfDomain";
    case errc::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {}

    [[nodiscard]] errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace hopfsr

#include "warpcheck/error.hpp"

namespace warpcheck {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConeViolation: return "CONE_VIOLATION";
    case ErrorCode::EmptyInput: return "EMPTY_INPUT";
    case ErrorCode::BadCurvature: return "BAD_CURVATURE";
    case ErrorCode::OutOfDomain: return "OUT_OF_DOMAIN";
    case ErrorCode::GeometryInvalid: return "GEOMETRY_INVALID";
    case ErrorCode::UnsupportedManifold: return "UNSUPPORTED_MANIFOLD";
    case ErrorCode::PotentialSign: return "POTENTIAL_SIGN";
    case ErrorCode::AssumptionViolated: return "ASSUMPTION_VIOLATED";
    case ErrorCode::StepRejected: return "STEP_REJECTED";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message, std::vector<std::size_t> nodes)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      nodes_(std::move(nodes)) {}

}  // namespace warpcheck

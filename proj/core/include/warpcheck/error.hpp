#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace warpcheck {

enum class ErrorCode {
  ConeViolation,
  EmptyInput,
  BadCurvature,
  OutOfDomain,
  GeometryInvalid,
  UnsupportedManifold,
  PotentialSign,
  AssumptionViolated,
  StepRejected,
  ConfigInvalid,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. Node-wise checks attach the
/// offending node indices.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<std::size_t> nodes = {});

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

 private:
  ErrorCode code_;
  std::vector<std::size_t> nodes_;
};

}  // namespace warpcheck

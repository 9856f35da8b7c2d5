#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace warpcheck {

inline constexpr double kDefaultAbsTol = 1e-8;

enum class Verdict { IdentityOk, InequalityOk, Violated, Inconclusive };

/// What a functional is expected to satisfy.
///   Identity:    value == 0
///   Nonnegative: value >= 0 (equality allowed)
///   Positive:    value > 0 (strict; inconclusive inside the error band)
enum class Claim { Identity, Nonnegative, Positive };

std::string_view to_string(Verdict verdict);
std::string_view to_string(Claim claim);

struct ReportInputs {
  std::optional<double> eps;
  std::optional<int> k;
  std::string manifold;
};

/// Named scalar result with its quadrature error estimate and verdict.
struct FunctionalReport {
  std::string name;
  double value = 0.0;
  double quadrature_error = 0.0;
  ReportInputs inputs;
  Claim claim = Claim::Identity;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::pair<std::string, double>> details;
  std::string note;

  /// Looks up a named detail; throws std::out_of_range if absent.
  double detail(std::string_view key) const;
};

/// Identity and Nonnegative claims use the dead band max(error, abs_tol);
/// Positive claims use the quadrature error alone.
Verdict judge(Claim claim, double value, double quadrature_error, double abs_tol = kDefaultAbsTol);

FunctionalReport make_report(std::string name, double value, double quadrature_error, Claim claim,
                             ReportInputs inputs, double abs_tol = kDefaultAbsTol);

}  // namespace warpcheck

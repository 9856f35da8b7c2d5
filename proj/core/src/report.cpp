#include "warpcheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace warpcheck {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::IdentityOk: return "identity_ok";
    case Verdict::InequalityOk: return "inequality_ok";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(Claim claim) {
  switch (claim) {
    case Claim::Identity: return "identity";
    case Claim::Nonnegative: return "nonnegative";
    case Claim::Positive: return "positive";
  }
  return "identity";
}

double FunctionalReport::detail(std::string_view key) const {
  for (const auto& [k, v] : details) {
    if (k == key) return v;
  }
  throw std::out_of_range("report '" + name + "' has no detail '" + std::string(key) + "'");
}

Verdict judge(Claim claim, double value, double quadrature_error, double abs_tol) {
  if (!std::isfinite(value)) return Verdict::Violated;
  const double band = std::max(quadrature_error, abs_tol);
  switch (claim) {
    case Claim::Identity:
      return std::abs(value) <= band ? Verdict::IdentityOk : Verdict::Violated;
    case Claim::Nonnegative:
      return value >= -band ? Verdict::InequalityOk : Verdict::Violated;
    case Claim::Positive:
      if (std::abs(value) <= quadrature_error) return Verdict::Inconclusive;
      return value > 0.0 ? Verdict::InequalityOk : Verdict::Violated;
  }
  return Verdict::Inconclusive;
}

FunctionalReport make_report(std::string name, double value, double quadrature_error, Claim claim,
                             ReportInputs inputs, double abs_tol) {
  FunctionalReport r;
  r.name = std::move(name);
  r.value = value;
  r.quadrature_error = quadrature_error;
  r.inputs = std::move(inputs);
  r.claim = claim;
  r.verdict = judge(claim, value, quadrature_error, abs_tol);
  return r;
}

}  // namespace warpcheck

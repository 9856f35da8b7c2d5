#include "warpcheck/symfunc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "warpcheck/error.hpp"

namespace warpcheck {

namespace {

double binomial(int n, int m) {
  if (m < 0 || m > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= m; ++i) c = c * static_cast<double>(n - m + i) / static_cast<double>(i);
  return c;
}

// Elementary symmetric sums e_0..e_upto by incremental product expansion,
// optionally skipping one entry.
std::vector<double> elementary_sums(std::span<const double> x, int upto, std::ptrdiff_t skip = -1) {
  std::vector<double> e(static_cast<std::size_t>(upto) + 1, 0.0);
  e[0] = 1.0;
  int seen = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == skip) continue;
    ++seen;
    for (int j = std::min(seen, upto); j >= 1; --j) e[j] += x[i] * e[j - 1];
  }
  return e;
}

}  // namespace

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::EmptyInput, "spectrum must have at least one entry");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("spectrum entries must be finite");
  }
}

Spectrum::Spectrum(std::initializer_list<double> values) : Spectrum(std::vector<double>(values)) {}

double Spectrum::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Spectrum::max() const { return *std::max_element(values_.begin(), values_.end()); }

double eval_pm(const Spectrum& x, int m) {
  if (m < 0) throw std::invalid_argument("eval_pm: order must be nonnegative");
  const int n = static_cast<int>(x.size());
  if (m == 0) return 1.0;
  if (m > n) return 0.0;
  return elementary_sums(x.values(), m)[m] / binomial(n, m);
}

std::vector<double> grad_pm(const Spectrum& x, int m) {
  const int n = static_cast<int>(x.size());
  if (m < 1 || m > n) throw std::invalid_argument("grad_pm: order must lie in [1, n]");
  const double scale = binomial(n, m);
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    grad[i] = elementary_sums(x.values(), m - 1, static_cast<std::ptrdiff_t>(i))[m - 1] / scale;
  }
  return grad;
}

ConeReport cone_membership(const Spectrum& x, int k) {
  const int n = static_cast<int>(x.size());
  if (k < 1 || k > n) throw std::invalid_argument("cone_membership: order must lie in [1, n]");
  ConeReport report;
  report.k = k;
  const auto e = elementary_sums(x.values(), k);
  report.p_values.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) {
    const double p = e[i] / binomial(n, i);
    report.p_values.push_back(p);
    if (!(p > 0.0) && !report.first_failing_order) report.first_failing_order = i;
  }
  report.member = !report.first_failing_order.has_value();
  return report;
}

double newton_maclaurin_gap(const Spectrum& x, int m) {
  const auto cone = cone_membership(x, m);
  if (!cone.member) {
    throw Error(ErrorCode::ConeViolation,
                "spectrum is outside the Garding cone of order " + std::to_string(m));
  }
  return eval_pm(x, 1) * eval_pm(x, m - 1) - eval_pm(x, m);
}

Spectrum shift_spectrum(const Spectrum& x, double eps) {
  std::vector<double> shifted(x.values().begin(), x.values().end());
  for (double& v : shifted) v -= eps;
  return Spectrum(std::move(shifted));
}

bool strict_shifted_k_convex(std::span<const Spectrum> samples, int k, double eps) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no curvature samples");
  bool has_positive_point = false;
  for (const auto& s : samples) {
    const Spectrum shifted = shift_spectrum(s, eps);
    if (!(eval_pm(shifted, k) > 0.0)) return false;
    if (shifted.min() > 0.0) has_positive_point = true;
  }
  return has_positive_point;
}

bool shifted_spectra_in_cone(std::span<const Spectrum> samples, int k, double eps) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no curvature samples");
  return std::all_of(samples.begin(), samples.end(), [&](const Spectrum& s) {
    return cone_membership(shift_spectrum(s, eps), k).member;
  });
}

}  // namespace warpcheck

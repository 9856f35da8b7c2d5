#pragma once

#include <optional>
#include <span>
#include <vector>

namespace warpcheck {

/// Ordered n-tuple of (possibly shifted) principal curvatures.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(std::vector<double> values);
  Spectrum(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const;
  double max() const;

 private:
  std::vector<double> values_;
};

struct ConeReport {
  int k = 0;
  bool member = false;
  std::optional<int> first_failing_order;
  std::vector<double> p_values;  // p_1 .. p_k
};

/// Normalized elementary symmetric polynomial: the m-th elementary symmetric
/// sum divided by C(n, m). p_0 = 1 and p_m = 0 for m > n.
double eval_pm(const Spectrum& x, int m);

/// Partial derivatives d p_m / d x_i. Requires 1 <= m <= n.
std::vector<double> grad_pm(const Spectrum& x, int m);

/// Garding cone test: member iff p_1, ..., p_k are all strictly positive.
ConeReport cone_membership(const Spectrum& x, int k);

/// p_1 p_{m-1} - p_m. Throws ConeViolation unless x lies in the m-th cone.
double newton_maclaurin_gap(const Spectrum& x, int m);

Spectrum shift_spectrum(const Spectrum& x, double eps);

/// Sufficient test for strict shifted k-convexity of a connected surface:
/// p_k(x - eps) > 0 at every sample and x - eps > 0 entrywise at one sample.
/// Throws EmptyInput on an empty list.
bool strict_shifted_k_convex(std::span<const Spectrum> samples, int k, double eps);

/// Direct definition: every shifted spectrum lies in the k-th cone.
bool shifted_spectra_in_cone(std::span<const Spectrum> samples, int k, double eps);

}  // namespace warpcheck

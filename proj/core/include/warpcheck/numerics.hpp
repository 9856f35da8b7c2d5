#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace warpcheck {

inline constexpr double kPi = 3.14159265358979323846;

/// Pairwise (cascade) summation with a fixed split tree, so the result does
/// not depend on thread count or call site.
double pairwise_sum(std::span<const double> values);

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(std::size_t count);

/// Adaptive Gauss-Kronrod integral of f over [a, b] to the given relative
/// tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-14);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; iterations must be independent.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Worker count used by parallel_for (default 1).
void set_thread_count(unsigned threads);
unsigned thread_count();

}  // namespace warpcheck

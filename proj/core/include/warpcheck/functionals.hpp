#pragma once

#include <string>
#include <vector>

#include "warpcheck/hypersurface.hpp"
#include "warpcheck/report.hpp"

namespace warpcheck {

/// Integral of (lambda' - eps u) - u (p_1 - eps); zero on closed surfaces.
FunctionalReport minkowski_residual(const Surface& s, double eps, double abs_tol = kDefaultAbsTol);

/// Integral of (lambda' - eps u) p_{m-1}(kappa - eps) - u p_m(kappa - eps).
/// Space forms only; 1 <= m <= n.
FunctionalReport shifted_minkowski_residual(const Surface& s, double eps, int m, double abs_tol = kDefaultAbsTol);

/// Integral of u minus (n+1) times the weighted volume, minus the horizon
/// flux lambda(0)^{n+1} |S^n| when the manifold has a horizon.
FunctionalReport divergence_residual(const Surface& s, double abs_tol = kDefaultAbsTol);

/// Node-wise gate (lambda' - eps u)(p_1 - eps) > 0. value is the minimum
/// product; details carry the two factors' minima separately.
FunctionalReport hk_assumption_check(const Surface& s, double eps);

/// Integral of (lambda' - eps u)/(p_1 - eps) minus (n+1) times the weighted
/// volume (plus the horizon term). Throws AssumptionViolated with the failing
/// nodes when the gate does not hold.
FunctionalReport hk_deficit(const Surface& s, double eps, double abs_tol = kDefaultAbsTol);

/// The eps = 0 deficit assembled on its own: integral of lambda'/p_1 minus
/// the same volume term.
FunctionalReport classical_hk_deficit(const Surface& s, double abs_tol = kDefaultAbsTol);

/// (integral of lambda')^2 - (n+1) (weighted volume + horizon term / (n+1))
/// times the integral of lambda' p_1. Throws PotentialSign if lambda' <= 0 on
/// the surface; the static-convex margin is attached as a detail.
FunctionalReport minkowski_second_deficit(const Surface& s, double abs_tol = kDefaultAbsTol);

/// (integral of (lambda' - eps u))^2 - (integral of u) times the integral of
/// (lambda' - eps u) p_1(kappa - eps).
FunctionalReport equiv_ineq_residual(const Surface& s, double eps, double abs_tol = kDefaultAbsTol);

/// Integral of a (p_1 - eps) times integral of a/(p_1 - eps) minus (integral
/// of a)^2, with a = lambda' - eps u. Requires the gate of hk_deficit.
FunctionalReport cauchy_schwarz_gap(const Surface& s, double eps, double abs_tol = kDefaultAbsTol);

/// Right-hand side families for the curvature equations.
///   constant: a
///   affine:   a + b1 x1 + b2 x2
///   power:    a x1^q   (x1 > 0)
struct ChiSpec {
  enum class Family { Constant, Affine, Power };
  Family family = Family::Constant;
  double a = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double q = 1.0;

  double operator()(double x1, double x2) const;
  double d1(double x1, double x2) const;
  double d2(double x1, double x2) const;
  /// Multiplies the family by a constant.
  ChiSpec scaled(double factor) const;
};

/// thm12: p_k(kappa + 1) = chi(lambda', -lambda' - u) in hyperbolic space.
/// thm14: p_k(kappa - eps) = chi(Phi, eps Phi - u) in any space form.
enum class CurvatureVariant { Thm12, Thm14 };

/// max over nodes |p_k(kappa - eps) - chi(args)|. The thm12 variant ignores
/// eps and uses -1. Pass Claim::Positive to certify a non-solution.
FunctionalReport curvature_equation_residual(const Surface& s, double eps, int k, const ChiSpec& chi,
                                             CurvatureVariant variant, Claim claim = Claim::Identity,
                                             double abs_tol = kDefaultAbsTol);

/// Radius of the centered geodesic sphere solving the curvature equation,
/// bracketed in [r_lo, r_hi]. Throws ConfigInvalid without a sign change.
double solve_sphere_radius(const WarpedProduct& m, double eps, int k, const ChiSpec& chi, CurvatureVariant variant,
                           double r_lo, double r_hi);

/// k times the shifted Minkowski integrand minus the contraction of dp_k with
/// the numerical Hessian of Phi; integrates a pointwise consequence of the
/// Hessian identity. Space forms only.
FunctionalReport integration_by_parts_residual(const Surface& s, double eps, int k,
                                               double abs_tol = kDefaultAbsTol);

/// Integral of dp_k(kappa - eps)^{ij} Hess_ij Phi, which vanishes because the
/// linearized operator is divergence free. Space forms only.
FunctionalReport divergence_free_residual(const Surface& s, double eps, int k, double abs_tol = kDefaultAbsTol);

/// Horizon flux lambda(0)^{n+1} |S^n|, or 0 without a horizon.
double horizon_term(const WarpedProduct& m);

}  // namespace warpcheck

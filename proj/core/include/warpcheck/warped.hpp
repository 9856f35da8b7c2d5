#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "warpcheck/report.hpp"

namespace warpcheck {

enum class ManifoldKind { Hyperbolic, Euclidean, Hemisphere, Custom };

/// lambda and its first three derivatives at one radius, plus the primitive
/// Phi with Phi' = lambda.
struct WarpSample {
  double r = 0.0;
  double lam = 0.0;
  double lam1 = 0.0;
  double lam2 = 0.0;
  double lam3 = 0.0;
  double phi = 0.0;
};

/// Closed-form callables for a custom warp function and its derivatives.
struct WarpFunctions {
  std::string name;
  std::function<double(double)> lam;
  std::function<double(double)> lam1;
  std::function<double(double)> lam2;
  std::function<double(double)> lam3;
  double r_max = std::numeric_limits<double>::infinity();
};

/// Built-in custom warps: "cosh", "sinh", "linear", "sin".
WarpFunctions named_warp(const std::string& name);

/// Warped product [0, r_max) x S^n with metric dr^2 + lambda(r)^2 g_{S^n}.
class WarpedProduct {
 public:
  WarpedProduct(ManifoldKind kind, int n, WarpFunctions warp, double rho_const,
                double fiber_ricci_const, bool has_horizon, int curvature = 0);

  ManifoldKind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  bool is_space_form() const noexcept { return kind_ != ManifoldKind::Custom; }
  /// Sectional curvature c of a space form (0 for custom warps).
  int curvature() const noexcept { return curvature_; }
  double r_max() const noexcept { return warp_.r_max; }
  double rho_const() const noexcept { return rho_const_; }
  double fiber_ricci_const() const noexcept { return fiber_ricci_const_; }
  bool has_horizon() const noexcept { return has_horizon_; }
  const WarpFunctions& warp() const noexcept { return warp_; }
  /// Volume of the unit fiber sphere: 2 pi (n = 1) or 4 pi (n = 2).
  double fiber_volume() const noexcept;
  /// Short tag such as "H^3" or "custom:cosh/n=2" echoed into reports.
  std::string tag() const;

  bool in_domain(double r) const noexcept { return r >= 0.0 && r < warp_.r_max; }

  double lam(double r) const { return warp_.lam(r); }
  double lam1(double r) const { return warp_.lam1(r); }
  double lam2(double r) const { return warp_.lam2(r); }

  /// Throws OutOfDomain if r is outside [0, r_max).
  WarpSample eval(double r) const;
  /// Same as eval without the domain check or the primitive (hot paths).
  WarpSample eval_unchecked(double r, bool with_phi = true) const;

  WarpedProduct with_rho(double rho) const;

 private:
  double primitive(double r) const;

  ManifoldKind kind_;
  int n_;
  WarpFunctions warp_;
  double rho_const_;
  double fiber_ricci_const_;
  bool has_horizon_;
  int curvature_;
};

/// Space form with c in {-1, 0, 1}; throws BadCurvature otherwise.
WarpedProduct make_space_form(int c, int n);

/// Horizon manifold with lambda = cosh r on [0, inf).
WarpedProduct make_horizon_example(int n);

/// Custom manifold from a named warp; the horizon flag follows condition (H)
/// for warps with lambda(0) > 0.
WarpedProduct make_custom(const std::string& warp_name, int n, double rho = 1.0);

WarpSample eval_warp(const WarpedProduct& m, double r);

/// lambda'(0) = 0, lambda''(0) > 0 and lambda' > 0 sampled on 10^4 interior
/// points of (0, min(r_max, r_scan)).
bool check_condition_H(const WarpedProduct& m, double r_scan = 10.0);

/// Coefficient of g_N in the sub-static criterion for a round fiber with
/// Ric_N = fiber_ricci_const * g_N. Nonnegative over the domain certifies a
/// sub-static manifold with potential lambda'. For n = 1 the Ricci term is
/// vacuous and only the bracket term is returned.
double substatic_scalar(const WarpedProduct& m, double r);

inline constexpr double kSubstaticTol = 1e-10;

struct SubstaticScan {
  FunctionalReport report;  // value = minimum of the scalar on the window
  std::vector<double> r;
  std::vector<double> scalar;
};

/// Samples substatic_scalar on a uniform grid of [r_lo, r_hi]. The window is
/// certified sub-static iff the minimum is >= -1e-10.
SubstaticScan substatic_scan(const WarpedProduct& m, double r_lo, double r_hi, int samples);

}  // namespace warpcheck

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "warpcheck/hypersurface.hpp"
#include "warpcheck/report.hpp"

namespace warpcheck {

/// Normal speed F of the flow d_t X = F nu.
///   UnitInward:     F = -1
///   MinusPotential: F = -lambda'
///   CustomShifted:  F = -(lambda' - eps u) xi(u - eps lambda'), xi(s) = xi_a + xi_b s
struct FlowSpeed {
  enum class Kind { UnitInward, MinusPotential, CustomShifted };
  Kind kind = Kind::UnitInward;
  double eps = 0.0;
  double xi_a = 1.0;
  double xi_b = 0.0;

  double operator()(const GeometrySample& g) const;
};

struct FlowState {
  double t = 0.0;
  std::shared_ptr<const Surface> surface;

  const RadialGraph& graph() const { return surface->graph(); }
  const std::vector<GeometrySample>& geom() const { return surface->samples(); }
};

FlowState make_flow_state(RadialGraph graph, double t = 0.0);

inline constexpr double kCurvatureGuard = 1e3;

/// d rho / dt = F v at every node.
std::vector<double> radial_velocity(const FlowState& state, const FlowSpeed& speed);

/// One classical RK4 step of the nodal system. Throws StepRejected when a
/// stage leaves the admissible graphs or max |kappa| exceeds the guard.
FlowState flow_step(const FlowState& state, const FlowSpeed& speed, double dt, double guard = kCurvatureGuard);

/// Central-difference checks of the evolution equations at fixed fiber
/// coordinates, with the advection by the tangential drift of the radial
/// parametrization added to each right-hand side. Reports, in order:
/// evolution_potential (lambda' - eps u), evolution_shape (|h|^2, the
/// contracted form of the shape-operator equation), evolution_mean_curvature
/// (p_1), evolution_area (area density), evolution_weighted_volume (total).
/// Each report also holds the residual at dt_probe / 2 and the observed order.
std::vector<FunctionalReport> verify_evolution(const FlowState& state, const FlowSpeed& speed, double dt_probe,
                                               double eps, double abs_tol = 1e-6);

/// Exponentially weighted Heintze-Karcher deficit along the unit normal flow
/// in hyperbolic space.
Estimate q_of_state(const FlowState& state);

struct FlowRecord {
  double t = 0.0;
  double q = 0.0;        // NaN outside hyperbolic space
  double q_error = 0.0;
  double area = 0.0;
  double weighted_volume = 0.0;
  double int_u = 0.0;
  double min_p1 = 0.0;
  double max_abs_kappa = 0.0;
  double min_rho = 0.0;
};

struct FlowTrace {
  std::vector<FlowRecord> series;
  std::vector<FlowState> snapshots;  // every snapshot_every steps, plus the last
  std::string stop_reason;           // "t_end" or the rejection message
  bool truncated = false;
  // Monitored bounds; only meaningful for the unit inward speed.
  bool q_monotone = true;
  bool area_bound = true;
  bool p1_bound = true;
  double tol_q = 0.0;
};

struct EvolveOptions {
  int snapshot_every = 0;  // 0 keeps only the initial and final states
  double guard = kCurvatureGuard;
};

FlowTrace evolve(const RadialGraph& initial, const FlowSpeed& speed, double t_end, double dt,
                 const EvolveOptions& options = {});

}  // namespace warpcheck

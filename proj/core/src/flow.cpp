#include "warpcheck/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warpcheck/error.hpp"
#include "warpcheck/functionals.hpp"
#include "warpcheck/numerics.hpp"

namespace warpcheck {

double FlowSpeed::operator()(const GeometrySample& g) const {
  switch (kind) {
    case Kind::UnitInward: return -1.0;
    case Kind::MinusPotential: return -g.warp.lam1;
    case Kind::CustomShifted: {
      const double s = g.u - eps * g.warp.lam1;
      return -(g.warp.lam1 - eps * g.u) * (xi_a + xi_b * s);
    }
  }
  return -1.0;
}

FlowState make_flow_state(RadialGraph graph, double t) {
  return FlowState{t, std::make_shared<const Surface>(std::move(graph), true)};
}

namespace {

std::vector<double> velocity(const std::vector<GeometrySample>& geom, const FlowSpeed& speed) {
  std::vector<double> out(geom.size());
  for (std::size_t i = 0; i < geom.size(); ++i) out[i] = speed(geom[i]) * geom[i].v;
  return out;
}

std::vector<GeometrySample> guarded_geometry(const RadialGraph& graph, double guard) {
  std::vector<GeometrySample> geom;
  try {
    geom = compute_geometry(graph);
  } catch (const Error& e) {
    throw Error(ErrorCode::StepRejected, e.what(), e.nodes());
  }
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < geom.size(); ++i) {
    if (!(geom[i].kappa.cwiseAbs().maxCoeff() <= guard)) bad.push_back(i);
  }
  if (!bad.empty()) throw Error(ErrorCode::StepRejected, "curvature exceeds the blow-up guard", bad);
  return geom;
}

RadialGraph shifted_graph(const RadialGraph& base, const std::vector<double>& k, double factor) {
  std::vector<double> rho = base.rho;
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += factor * k[i];
  try {
    return make_graph(base.manifold, base.grid, std::move(rho));
  } catch (const Error& e) {
    throw Error(ErrorCode::StepRejected, e.what(), e.nodes());
  }
}

// Classical RK4; dt may be negative for backward probes.
RadialGraph rk4(const RadialGraph& graph, const std::vector<GeometrySample>& geom, const FlowSpeed& speed, double dt,
                double guard) {
  const std::vector<double> k1 = velocity(geom, speed);
  const RadialGraph g2 = shifted_graph(graph, k1, 0.5 * dt);
  const std::vector<double> k2 = velocity(guarded_geometry(g2, guard), speed);
  const RadialGraph g3 = shifted_graph(graph, k2, 0.5 * dt);
  const std::vector<double> k3 = velocity(guarded_geometry(g3, guard), speed);
  const RadialGraph g4 = shifted_graph(graph, k3, dt);
  const std::vector<double> k4 = velocity(guarded_geometry(g4, guard), speed);
  std::vector<double> increment(k1.size());
  for (std::size_t i = 0; i < k1.size(); ++i) increment[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
  RadialGraph next = shifted_graph(graph, increment, dt);
  guarded_geometry(next, guard);
  return next;
}

}  // namespace

std::vector<double> radial_velocity(const FlowState& state, const FlowSpeed& speed) {
  return velocity(state.geom(), speed);
}

FlowState flow_step(const FlowState& state, const FlowSpeed& speed, double dt, double guard) {
  if (!(dt > 0.0)) throw Error(ErrorCode::ConfigInvalid, "time step must be positive");
  RadialGraph next = rk4(state.graph(), state.geom(), speed, dt, guard);
  try {
    return make_flow_state(std::move(next), state.t + dt);
  } catch (const Error& e) {
    throw Error(ErrorCode::StepRejected, e.what(), e.nodes());
  }
}

namespace {

// Scalar fields compared at fixed fiber coordinates.
struct ProbeFields {
  std::vector<double> potential;  // lambda' - eps u
  std::vector<double> shape;      // |h|^2
  std::vector<double> mean;       // p_1
  std::vector<double> density;    // sqrt(det g) / sqrt(det sigma)
  double volume = 0.0;
};

ProbeFields probe_fields(const RadialGraph& graph, const std::vector<GeometrySample>& geom, double eps) {
  ProbeFields f;
  const std::size_t count = geom.size();
  f.potential.resize(count);
  f.shape.resize(count);
  f.mean.resize(count);
  f.density.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const GeometrySample& g = geom[i];
    f.potential[i] = g.warp.lam1 - eps * g.u;
    f.shape[i] = g.kappa.squaredNorm();
    f.mean[i] = g.p1();
    f.density[i] = g.area_weight / graph.grid->nodes()[i].weight;
  }
  return f;
}

struct ExpectedRates {
  std::vector<double> potential, shape, mean, density;
  double volume = 0.0;
};

ExpectedRates expected_rates(const Surface& s, const FlowSpeed& speed, double eps) {
  const int n = s.n();
  const double nn = static_cast<double>(n);
  const double c = static_cast<double>(s.manifold().curvature());
  const std::size_t count = s.size();
  const SpectralGrid& grid = s.grid();

  std::vector<double> speed_field(count), drift(count), potential(count), shape(count), mean(count), lam1_f(count);
  for (std::size_t i = 0; i < count; ++i) {
    const GeometrySample& g = s[i];
    speed_field[i] = speed(g);
    drift[i] = speed_field[i] * g.v;
    potential[i] = g.warp.lam1 - eps * g.u;
    shape[i] = g.kappa.squaredNorm();
    mean[i] = g.p1();
    lam1_f[i] = g.warp.lam1 * speed_field[i];
  }
  const Partials dF = grid.differentiate(speed_field, true);
  const auto d_drift = grid.gradient(drift);
  const auto d_potential = grid.gradient(potential);
  const auto d_shape = grid.gradient(shape);
  const auto d_mean = grid.gradient(mean);
  const Partials d_rho = grid.differentiate(s.graph().rho, true);

  auto as_vec = [n](const std::array<double, 2>& a) {
    SmallVec v(n);
    for (int k = 0; k < n; ++k) v(k) = a[static_cast<std::size_t>(k)];
    return v;
  };

  ExpectedRates out;
  out.potential.resize(count);
  out.shape.resize(count);
  out.mean.resize(count);
  out.density.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const GeometrySample& g = s[i];
    const GridNode& node = grid.nodes()[i];
    const SmallMat g_inv = g.g.inverse();
    const auto gamma = induced_christoffel(g, node, n);
    const SmallMat hess_f = covariant_hessian(dF.d1[i], dF.d2[i], gamma, n);
    const SmallMat hess_rho = covariant_hessian(d_rho.d1[i], d_rho.d2[i], gamma, n);
    const SmallVec grad_f = as_vec(dF.d1[i]);
    // The radial parametrization drifts tangentially by psi grad(rho), psi = F v.
    const SmallVec rho_up = g_inv * g.grad_rho;
    const double psi = drift[i];
    auto advect = [&](const std::array<double, 2>& d) { return psi * rho_up.dot(as_vec(d)); };

    const double F = speed_field[i];
    const double lap_f = (g_inv * hess_f).trace();
    const double tr1 = g.kappa.sum();
    const double tr2 = g.kappa.squaredNorm();
    const double tr3 = g.kappa.array().cube().sum();
    const double h_dot_hess = (g_inv * g.h * g_inv * hess_f).trace();
    const double grad_f_dot_v = grad_f.dot(g_inv * (g.warp.lam * g.grad_rho));

    out.potential[i] = -c * g.u * F - eps * g.warp.lam1 * F + eps * grad_f_dot_v + advect(d_potential[i]);
    out.shape[i] = -2.0 * h_dot_hess - 2.0 * F * tr3 - 2.0 * c * F * tr1 + advect(d_shape[i]);
    out.mean[i] = -lap_f / nn - tr2 * F / nn - c * F + advect(d_mean[i]);
    const double div_drift = rho_up.dot(as_vec(d_drift[i])) + psi * (g_inv * hess_rho).trace();
    const double density = g.area_weight / node.weight;
    out.density[i] = nn * g.p1() * F * density + density * div_drift;
  }
  out.volume = surface_sum(s, lam1_f);
  return out;
}

double max_gap(const std::vector<double>& plus, const std::vector<double>& minus, double dt,
               const std::vector<double>& expected) {
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    worst = std::max(worst, std::abs((plus[i] - minus[i]) / (2.0 * dt) - expected[i]));
  }
  return worst;
}

struct Residuals {
  double potential, shape, mean, density, volume;
};

Residuals residuals_at(const FlowState& state, const FlowSpeed& speed, double dt, double eps,
                       const ExpectedRates& rates) {
  auto probe = [&](double step) {
    const RadialGraph moved = rk4(state.graph(), state.geom(), speed, step, std::numeric_limits<double>::infinity());
    const std::vector<GeometrySample> geom = compute_geometry(moved);
    ProbeFields f = probe_fields(moved, geom, eps);
    f.volume = weighted_volume_value(Surface(moved, false));
    return f;
  };
  const ProbeFields plus = probe(dt);
  const ProbeFields minus = probe(-dt);
  return {max_gap(plus.potential, minus.potential, dt, rates.potential),
          max_gap(plus.shape, minus.shape, dt, rates.shape),
          max_gap(plus.mean, minus.mean, dt, rates.mean),
          max_gap(plus.density, minus.density, dt, rates.density),
          std::abs((plus.volume - minus.volume) / (2.0 * dt) - rates.volume)};
}

}  // namespace

std::vector<FunctionalReport> verify_evolution(const FlowState& state, const FlowSpeed& speed, double dt_probe,
                                               double eps, double abs_tol) {
  if (!state.surface->manifold().is_space_form()) {
    throw Error(ErrorCode::UnsupportedManifold, "evolution equations are checked in space forms only");
  }
  if (!(dt_probe > 0.0)) throw Error(ErrorCode::ConfigInvalid, "probe step must be positive");
  const ExpectedRates rates = expected_rates(*state.surface, speed, eps);
  const Residuals full = residuals_at(state, speed, dt_probe, eps, rates);
  const Residuals half = residuals_at(state, speed, 0.5 * dt_probe, eps, rates);
  const ReportInputs inputs{eps, std::nullopt, state.surface->manifold().tag()};
  auto report = [&](const char* name, double a, double b) {
    FunctionalReport r = make_report(name, a, 0.0, Claim::Identity, inputs, abs_tol);
    const double order = (a > 0.0 && b > 0.0) ? std::log2(a / b) : std::numeric_limits<double>::quiet_NaN();
    r.details = {{"dt_probe", dt_probe}, {"residual_half_dt", b}, {"observed_order", order}};
    return r;
  };
  return {report("evolution_potential", full.potential, half.potential),
          report("evolution_shape", full.shape, half.shape),
          report("evolution_mean_curvature", full.mean, half.mean),
          report("evolution_area", full.density, half.density),
          report("evolution_weighted_volume", full.volume, half.volume)};
}

Estimate q_of_state(const FlowState& state) {
  const Surface& s = *state.surface;
  if (s.manifold().kind() != ManifoldKind::Hyperbolic) {
    throw Error(ErrorCode::UnsupportedManifold, "Q is defined along flows in hyperbolic space");
  }
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i].p1() > -1.0)) bad.push_back(i);
  }
  if (!bad.empty()) throw Error(ErrorCode::AssumptionViolated, "p_1 <= -1 on the surface", bad);
  const FunctionalReport deficit = hk_deficit(s, -1.0);
  const double weight = std::exp(-static_cast<double>(s.n() + 1) * state.t);
  return {weight * deficit.value, weight * deficit.quadrature_error};
}

namespace {

FlowRecord record_of(const FlowState& state) {
  const Surface& s = *state.surface;
  FlowRecord r;
  r.t = state.t;
  if (s.manifold().kind() == ManifoldKind::Hyperbolic) {
    const Estimate q = q_of_state(state);
    r.q = q.value;
    r.q_error = q.error;
  } else {
    r.q = std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> ones(s.size(), 1.0);
  std::vector<double> u(s.size());
  r.min_p1 = std::numeric_limits<double>::infinity();
  r.min_rho = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    u[i] = s[i].u;
    r.min_p1 = std::min(r.min_p1, s[i].p1());
    r.max_abs_kappa = std::max(r.max_abs_kappa, s[i].kappa.cwiseAbs().maxCoeff());
    r.min_rho = std::min(r.min_rho, s[i].r);
  }
  r.area = surface_sum(s, ones);
  r.int_u = surface_sum(s, u);
  r.weighted_volume = weighted_volume_value(s);
  return r;
}

}  // namespace

FlowTrace evolve(const RadialGraph& initial, const FlowSpeed& speed, double t_end, double dt,
                 const EvolveOptions& options) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw Error(ErrorCode::ConfigInvalid, "dt and t_end must be positive");
  FlowTrace trace;
  FlowState state = make_flow_state(initial);
  trace.series.push_back(record_of(state));
  trace.snapshots.push_back(state);
  int step = 0;
  trace.stop_reason = "t_end";
  while (state.t < t_end - 1e-12 * t_end) {
    const double h = std::min(dt, t_end - state.t);
    try {
      state = flow_step(state, speed, h, options.guard);
      trace.series.push_back(record_of(state));
    } catch (const Error& e) {
      trace.truncated = true;
      trace.stop_reason = std::string(to_string(e.code())) + ": " + e.what();
      break;
    }
    ++step;
    if (options.snapshot_every > 0 && step % options.snapshot_every == 0) trace.snapshots.push_back(state);
  }
  if (trace.snapshots.back().t != state.t) trace.snapshots.push_back(state);

  const FlowRecord& first = trace.series.front();
  const double n = static_cast<double>(initial.n());
  double worst_q_error = 0.0;
  for (const auto& r : trace.series) worst_q_error = std::max(worst_q_error, r.q_error);
  trace.tol_q = 10.0 * worst_q_error;
  if (speed.kind == FlowSpeed::Kind::UnitInward) {
    for (const auto& r : trace.series) {
      if (std::isfinite(first.q) && r.q > first.q + trace.tol_q) trace.q_monotone = false;
      if (!(r.area < std::exp(n * r.t) * first.area + 1e-8)) trace.area_bound = false;
      if (!(r.min_p1 > -1.0)) trace.p1_bound = false;
    }
  }
  return trace;
}

}  // namespace warpcheck

#include "warpcheck/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/legendre.hpp>

#include "shape.hpp"
#include "warpcheck/error.hpp"
#include "warpcheck/numerics.hpp"

namespace warpcheck {

namespace detail {

void principal_curvatures(const SmallMat& g, const SmallMat& h, SmallVec& kappa, SmallMat& frame) {
  const auto n = g.rows();
  if (n == 1) {
    if (!(g(0, 0) > 0.0) || !std::isfinite(g(0, 0))) {
      throw Error(ErrorCode::GeometryInvalid, "induced metric is not positive definite");
    }
    kappa.resize(1);
    frame.resize(1, 1);
    kappa(0) = h(0, 0) / g(0, 0);
    frame(0, 0) = 1.0 / std::sqrt(g(0, 0));
    return;
  }
  // Cholesky g = L L^T, then C = L^-1 h L^-T is symmetric.
  const double l00_sq = g(0, 0);
  if (!(l00_sq > 0.0) || !std::isfinite(l00_sq)) {
    throw Error(ErrorCode::GeometryInvalid, "induced metric is not positive definite");
  }
  const double l00 = std::sqrt(l00_sq);
  const double l10 = g(1, 0) / l00;
  const double l11_sq = g(1, 1) - l10 * l10;
  if (!(l11_sq > 0.0) || !std::isfinite(l11_sq)) {
    throw Error(ErrorCode::GeometryInvalid, "induced metric is not positive definite");
  }
  const double l11 = std::sqrt(l11_sq);
  // L^-1 = [[1/l00, 0], [-l10/(l00 l11), 1/l11]].
  Eigen::Matrix2d inv_l;
  inv_l << 1.0 / l00, 0.0, -l10 / (l00 * l11), 1.0 / l11;
  const Eigen::Matrix2d hs = 0.5 * (h + h.transpose());
  const Eigen::Matrix2d c = inv_l * hs * inv_l.transpose();
  const double a = c(0, 0);
  const double d = c(1, 1);
  const double b = 0.5 * (c(0, 1) + c(1, 0));
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), b);
  const double angle = 0.5 * std::atan2(2.0 * b, a - d);
  Eigen::Matrix2d y;
  // Column 1 belongs to the larger eigenvalue.
  y << -std::sin(angle), std::cos(angle), std::cos(angle), std::sin(angle);
  kappa.resize(2);
  kappa(0) = mean - radius;
  kappa(1) = mean + radius;
  frame = inv_l.transpose() * y;
}

}  // namespace detail

Spectrum GeometrySample::spectrum() const {
  return Spectrum(std::vector<double>(kappa.data(), kappa.data() + kappa.size()));
}

namespace {

double polar_cos(const GridNode& node, int n) { return n == 1 ? std::cos(node.theta) : node.cos_theta; }

// Monotone-in-distance form of the space-form law of cosines, zero at the
// target radius.
double sphere_equation(int c, double target, double offset, double cos_angle, double rho, double* slope) {
  switch (c) {
    case -1: {
      const double value = std::cosh(offset) * std::cosh(rho) - std::sinh(offset) * std::sinh(rho) * cos_angle;
      if (slope) *slope = std::cosh(offset) * std::sinh(rho) - std::sinh(offset) * std::cosh(rho) * cos_angle;
      return value - std::cosh(target);
    }
    case 0: {
      if (slope) *slope = 2.0 * rho - 2.0 * offset * cos_angle;
      return offset * offset + rho * rho - 2.0 * offset * rho * cos_angle - target * target;
    }
    default: {
      const double value = std::cos(offset) * std::cos(rho) + std::sin(offset) * std::sin(rho) * cos_angle;
      if (slope) *slope = std::cos(offset) * std::sin(rho) - std::sin(offset) * std::cos(rho) * cos_angle;
      return std::cos(target) - value;
    }
  }
}

double solve_sphere_node(int c, double radius, double offset, double cos_angle) {
  double lo = 0.0;
  double hi = radius + offset;
  if (sphere_equation(c, radius, offset, cos_angle, hi, nullptr) <= 0.0) return hi;
  const double sin_sq = std::max(0.0, 1.0 - cos_angle * cos_angle);
  double x = offset * cos_angle + std::sqrt(std::max(0.0, radius * radius - offset * offset * sin_sq));
  x = std::clamp(x, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    double slope = 0.0;
    const double f = sphere_equation(c, radius, offset, cos_angle, x, &slope);
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    double next = x - f / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-13 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15) break;
  }
  return x;
}

}  // namespace

RadialGraph make_graph(std::shared_ptr<const WarpedProduct> m, std::shared_ptr<const SpectralGrid> grid,
                       std::vector<double> rho) {
  if (!m || !grid) throw Error(ErrorCode::ConfigInvalid, "graph needs a manifold and a grid");
  if (m->n() != grid->n()) throw Error(ErrorCode::ConfigInvalid, "grid dimension differs from the fiber dimension");
  if (rho.size() != grid->size()) throw Error(ErrorCode::GeometryInvalid, "radial values do not match the grid");
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!std::isfinite(rho[i]) || !(rho[i] > 0.0) || !m->in_domain(rho[i])) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << bad.size() << " node(s) with radius outside (0, " << m->r_max() << "), first at node " << bad.front();
    throw Error(ErrorCode::GeometryInvalid, os.str(), bad);
  }
  return RadialGraph{std::move(grid), std::move(rho), std::move(m)};
}

RadialGraph build_sphere_graph(std::shared_ptr<const WarpedProduct> m, double radius, double center_offset,
                               const GridSpec& spec) {
  spec.validate();
  if (!m->is_space_form()) {
    throw Error(ErrorCode::UnsupportedManifold, "off-center spheres need a space form");
  }
  if (!(radius > 0.0) || center_offset < 0.0 || !(center_offset < radius)) {
    throw Error(ErrorCode::GeometryInvalid, "sphere must enclose the pole: need 0 <= offset < radius");
  }
  if (!m->in_domain(radius + center_offset)) {
    throw Error(ErrorCode::GeometryInvalid, "sphere leaves the radial domain");
  }
  auto grid = make_grid(spec);
  std::vector<double> rho(grid->size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho[i] = center_offset == 0.0
                 ? radius
                 : solve_sphere_node(m->curvature(), radius, center_offset, polar_cos(grid->nodes()[i], spec.n));
  }
  return make_graph(std::move(m), std::move(grid), std::move(rho));
}

RadialGraph build_perturbed_graph(std::shared_ptr<const WarpedProduct> m, double base_radius,
                                  std::span<const std::pair<int, double>> modes, const GridSpec& spec) {
  spec.validate();
  auto grid = make_grid(spec);
  std::vector<double> rho(grid->size(), base_radius);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const GridNode& node = grid->nodes()[i];
    for (const auto& [degree, amplitude] : modes) {
      if (degree < 0) throw Error(ErrorCode::ConfigInvalid, "mode degree must be nonnegative");
      rho[i] += spec.n == 1 ? amplitude * std::cos(static_cast<double>(degree) * node.theta)
                            : amplitude * boost::math::legendre_p(degree, node.cos_theta);
    }
  }
  return make_graph(std::move(m), std::move(grid), std::move(rho));
}

RadialGraph coarsen(const RadialGraph& graph) {
  const auto& coarse = graph.grid->coarse();
  if (!coarse) throw std::logic_error("graph grid has no coarse level");
  return RadialGraph{coarse, graph.grid->restrict_to_coarse(graph.rho), graph.manifold};
}

std::vector<GeometrySample> compute_geometry(const RadialGraph& graph) {
  const SpectralGrid& grid = *graph.grid;
  const WarpedProduct& m = *graph.manifold;
  const int n = grid.n();
  const Partials partials = grid.differentiate(graph.rho, true);
  std::vector<GeometrySample> out(grid.size());
  std::vector<char> invalid(grid.size(), 0);

  parallel_for(grid.size(), [&](std::size_t i) {
    const GridNode& node = grid.nodes()[i];
    GeometrySample& s = out[i];
    s.r = graph.rho[i];
    s.warp = m.eval_unchecked(s.r);
    const double lam = s.warp.lam;
    const double lam1 = s.warp.lam1;

    s.grad_rho.resize(n);
    s.hess_rho.resize(n, n);
    SmallMat sigma = SmallMat::Identity(n, n);
    SmallMat hess_sigma(n, n);
    double grad_sq = 0.0;
    if (n == 1) {
      s.grad_rho(0) = partials.d1[i][0];
      s.hess_rho(0, 0) = partials.d2[i][0];
      hess_sigma(0, 0) = s.hess_rho(0, 0);
      grad_sq = s.grad_rho(0) * s.grad_rho(0);
    } else {
      const double sn = node.sin_theta;
      const double cs = node.cos_theta;
      s.grad_rho << partials.d1[i][0], partials.d1[i][1];
      s.hess_rho << partials.d2[i][0], partials.d2[i][1], partials.d2[i][1], partials.d2[i][2];
      sigma(1, 1) = sn * sn;
      // Round-sphere Christoffels: Gamma^theta_phiphi = -sc, Gamma^phi_thetaphi = c/s.
      hess_sigma(0, 0) = s.hess_rho(0, 0);
      hess_sigma(0, 1) = s.hess_rho(0, 1) - (cs / sn) * s.grad_rho(1);
      hess_sigma(1, 0) = hess_sigma(0, 1);
      hess_sigma(1, 1) = s.hess_rho(1, 1) + sn * cs * s.grad_rho(0);
      grad_sq = s.grad_rho(0) * s.grad_rho(0) + s.grad_rho(1) * s.grad_rho(1) / (sn * sn);
    }
    s.v = std::sqrt(1.0 + grad_sq / (lam * lam));
    s.normal_radial = 1.0 / s.v;
    s.u = lam / s.v;
    s.g = s.grad_rho * s.grad_rho.transpose() + lam * lam * sigma;
    s.h = (lam * lam1 * sigma + (2.0 * lam1 / lam) * (s.grad_rho * s.grad_rho.transpose()) - hess_sigma) / s.v;
    try {
      detail::principal_curvatures(s.g, s.h, s.kappa, s.frame);
    } catch (const Error&) {
      invalid[i] = 1;
      return;
    }
    s.sqrt_det_g = std::sqrt(s.g.determinant());
    s.area_weight = s.sqrt_det_g / detail::sqrt_det_sigma(node, n) * node.weight;
    if (!std::isfinite(s.area_weight) || !s.kappa.allFinite()) invalid[i] = 1;
  });

  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < invalid.size(); ++i) {
    if (invalid[i]) bad.push_back(i);
  }
  if (!bad.empty()) {
    throw Error(ErrorCode::GeometryInvalid,
                "degenerate geometry at " + std::to_string(bad.size()) + " node(s), first " + std::to_string(bad[0]),
                bad);
  }
  return out;
}

Surface::Surface(RadialGraph graph, bool with_coarse) : graph_(std::move(graph)) {
  samples_ = compute_geometry(graph_);
  if (with_coarse && graph_.grid->coarse()) {
    coarse_ = std::make_shared<const Surface>(coarsen(graph_), false);
  }
}

double surface_sum(const Surface& s, std::span<const double> f) {
  std::vector<double> terms(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) terms[i] = f[i] * s[i].area_weight;
  return pairwise_sum(terms);
}

Estimate integrate_surface(const Surface& s, std::span<const double> f) {
  Estimate e;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) abs_sum += std::abs(f[i] * s[i].area_weight);
  e.value = surface_sum(s, f);
  e.error = roundoff_floor(abs_sum);
  if (s.coarse()) {
    const std::vector<double> coarse_f = s.grid().restrict_to_coarse(f);
    e.error += std::abs(e.value - surface_sum(*s.coarse(), coarse_f));
  }
  return e;
}

namespace {

double volume_sum(const RadialGraph& graph) {
  const WarpedProduct& m = *graph.manifold;
  const SpectralGrid& grid = *graph.grid;
  // lambda' lambda^n has the primitive lambda^{n+1} / (n+1).
  const double n1 = static_cast<double>(m.n() + 1);
  const double base = std::pow(m.lam(0.0), n1);
  std::vector<double> terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    terms[i] = (std::pow(m.lam(graph.rho[i]), n1) - base) / n1 * grid.nodes()[i].weight;
  }
  return pairwise_sum(terms);
}

}  // namespace

Estimate weighted_volume(const Surface& s) {
  Estimate e;
  e.value = volume_sum(s.graph());
  double abs_sum = std::abs(e.value);
  e.error = roundoff_floor(abs_sum);
  if (s.coarse()) e.error += std::abs(e.value - volume_sum(s.coarse()->graph()));
  return e;
}

double weighted_volume_value(const Surface& s) { return volume_sum(s.graph()); }

std::array<SmallMat, 2> induced_christoffel(const GeometrySample& sample, const GridNode& node, int n) {
  const double lam = sample.warp.lam;
  const double lam1 = sample.warp.lam1;
  // dg[k](i, j) = d_k g_ij.
  std::array<SmallMat, 2> dg;
  for (int k = 0; k < n; ++k) {
    dg[k] = SmallMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double sigma_ij = (i == j) ? (i == 1 ? node.sin_theta * node.sin_theta : 1.0) : 0.0;
        dg[k](i, j) = sample.hess_rho(i, k) * sample.grad_rho(j) + sample.grad_rho(i) * sample.hess_rho(j, k) +
                      2.0 * lam * lam1 * sample.grad_rho(k) * sigma_ij;
      }
    }
  }
  if (n == 2) dg[0](1, 1) += lam * lam * 2.0 * node.sin_theta * node.cos_theta;
  const SmallMat g_inv = sample.g.inverse();
  std::array<SmallMat, 2> gamma;
  for (int k = 0; k < n; ++k) {
    gamma[k] = SmallMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += g_inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * acc;
      }
    }
  }
  return gamma;
}

SmallMat covariant_hessian(const std::array<double, 2>& d1, const std::array<double, 3>& d2,
                           const std::array<SmallMat, 2>& gamma, int n) {
  SmallMat hess(n, n);
  if (n == 1) {
    hess(0, 0) = d2[0] - gamma[0](0, 0) * d1[0];
    return hess;
  }
  hess << d2[0], d2[1], d2[1], d2[2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) hess(i, j) -= gamma[0](i, j) * d1[0] + gamma[1](i, j) * d1[1];
  }
  return hess;
}

std::vector<SmallMat> surface_hessian(const Surface& s, std::span<const double> f) {
  const Partials p = s.grid().differentiate(f, true);
  std::vector<SmallMat> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto gamma = induced_christoffel(s[i], s.grid().nodes()[i], s.n());
    out[i] = covariant_hessian(p.d1[i], p.d2[i], gamma, s.n());
  }
  return out;
}

double covector_norm(const SmallMat& g, const SmallVec& w) {
  return std::sqrt(std::max(0.0, w.dot(g.ldlt().solve(w))));
}

double tensor_norm(const SmallMat& g, const SmallMat& t) {
  const SmallMat g_inv = g.inverse();
  const SmallMat a = g_inv * t;
  const SmallMat b = g_inv * t.transpose();
  return std::sqrt(std::max(0.0, (a * b.transpose()).trace()));
}

namespace {

struct PotentialMaxima {
  double gradient_phi = 0.0;
  double hessian_phi = 0.0;
  double gradient_u = 0.0;
};

PotentialMaxima potential_maxima(const Surface& s) {
  const int n = s.n();
  std::vector<double> phi(s.size());
  std::vector<double> u(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    phi[i] = s[i].warp.phi;
    u[i] = s[i].u;
  }
  const Partials dphi = s.grid().differentiate(phi, true);
  const auto du = s.grid().gradient(u);
  PotentialMaxima out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const GeometrySample& g = s[i];
    // <V, e_j> = lambda rho_j since V = lambda d_r and e_j = rho_j d_r + d_j.
    const SmallVec v_tangent = g.warp.lam * g.grad_rho;
    SmallVec grad_phi(n);
    SmallVec grad_u(n);
    for (int k = 0; k < n; ++k) {
      grad_phi(k) = dphi.d1[i][static_cast<std::size_t>(k)];
      grad_u(k) = du[i][static_cast<std::size_t>(k)];
    }
    out.gradient_phi = std::max(out.gradient_phi, covector_norm(g.g, grad_phi - v_tangent));
    const auto gamma = induced_christoffel(g, s.grid().nodes()[i], n);
    const SmallMat hess = covariant_hessian(dphi.d1[i], dphi.d2[i], gamma, n);
    const SmallMat expected = g.warp.lam1 * g.g - g.u * g.h;
    out.hessian_phi = std::max(out.hessian_phi, tensor_norm(g.g, hess - expected));
    const SmallVec expected_grad_u = g.h * g.g.ldlt().solve(v_tangent);
    out.gradient_u = std::max(out.gradient_u, covector_norm(g.g, grad_u - expected_grad_u));
  }
  return out;
}

}  // namespace

Lemma23Residuals lemma23_residuals(const Surface& s, double abs_tol) {
  const PotentialMaxima fine = potential_maxima(s);
  PotentialMaxima coarse;
  if (s.coarse()) coarse = potential_maxima(*s.coarse());
  const ReportInputs inputs{std::nullopt, std::nullopt, s.manifold().tag()};
  auto report = [&](const char* name, double value, double coarse_value) {
    const double err = s.coarse() ? std::abs(value - coarse_value) : 0.0;
    return make_report(name, value, err, Claim::Identity, inputs, abs_tol);
  };
  return {report("lemma23_gradient_phi", fine.gradient_phi, coarse.gradient_phi),
          report("lemma23_hessian_phi", fine.hessian_phi, coarse.hessian_phi),
          report("lemma23_gradient_u", fine.gradient_u, coarse.gradient_u)};
}

double static_convex_margin(const Surface& s) {
  double margin = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const GeometrySample& g = s[i];
    if (!(g.warp.lam1 > 0.0)) {
      bad.push_back(i);
      continue;
    }
    const double threshold = g.warp.lam2 * g.u / (g.warp.lam * g.warp.lam1);
    margin = std::min(margin, g.kappa(0) - threshold);
  }
  if (!bad.empty()) throw Error(ErrorCode::PotentialSign, "lambda' <= 0 on the surface", bad);
  return margin;
}

double umbilic_spread(const Surface& s) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& g : s.samples()) {
    lo = std::min(lo, g.kappa.minCoeff());
    hi = std::max(hi, g.kappa.maxCoeff());
  }
  return hi - lo;
}

}  // namespace warpcheck

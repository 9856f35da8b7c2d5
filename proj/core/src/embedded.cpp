#include <cmath>

#include <Eigen/SVD>

#include "shape.hpp"
#include "warpcheck/error.hpp"
#include "warpcheck/hypersurface.hpp"
#include "warpcheck/numerics.hpp"

namespace warpcheck {

namespace {

// Ambient model: Minkowski R^{1,n+1} (hyperboloid), R^{n+1}, or R^{n+2}
// (unit sphere). Index 0 is the time-like / polar slot for the curved models.
struct Model {
  int curvature;
  int dim;

  double sign(int a) const { return (curvature == -1 && a == 0) ? -1.0 : 1.0; }

  double dot(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) acc += sign(a) * x(a) * y(a);
    return acc;
  }
};

Eigen::VectorXd fiber_direction(const GridNode& node, int n) {
  Eigen::VectorXd w(n + 1);
  if (n == 1) {
    w << std::cos(node.theta), std::sin(node.theta);
  } else {
    w << node.sin_theta * std::cos(node.phi), node.sin_theta * std::sin(node.phi), node.cos_theta;
  }
  return w;
}

Eigen::VectorXd embed(const Model& model, double r, const Eigen::VectorXd& w) {
  Eigen::VectorXd x(model.dim);
  switch (model.curvature) {
    case -1: x << std::cosh(r), std::sinh(r) * w; break;
    case 0: x = r * w; break;
    default: x << std::cos(r), std::sin(r) * w; break;
  }
  return x;
}

Eigen::VectorXd radial_direction(const Model& model, double r, const Eigen::VectorXd& w) {
  Eigen::VectorXd x(model.dim);
  switch (model.curvature) {
    case -1: x << std::sinh(r), std::cosh(r) * w; break;
    case 0: x = w; break;
    default: x << -std::sin(r), std::cos(r) * w; break;
  }
  return x;
}

// lambda d_r written in the ambient coordinates.
Eigen::VectorXd conformal_field(const Model& model, const Eigen::VectorXd& x) {
  if (model.curvature == 0) return x;
  Eigen::VectorXd v = x(0) * x;
  v(0) -= 1.0;
  return v;
}

// Differentiates each ambient component over the grid.
std::vector<std::vector<std::array<double, 2>>> component_gradients(const SpectralGrid& grid,
                                                                    const std::vector<Eigen::VectorXd>& field,
                                                                    int dim) {
  std::vector<std::vector<std::array<double, 2>>> out(static_cast<std::size_t>(dim));
  std::vector<double> component(grid.size());
  for (int a = 0; a < dim; ++a) {
    for (std::size_t i = 0; i < grid.size(); ++i) component[i] = field[i](a);
    out[static_cast<std::size_t>(a)] = grid.gradient(component);
  }
  return out;
}

}  // namespace

std::vector<GeometrySample> compute_geometry_embedded(const RadialGraph& graph) {
  const WarpedProduct& m = *graph.manifold;
  if (!m.is_space_form()) {
    throw Error(ErrorCode::UnsupportedManifold, "embedded backend supports space forms only");
  }
  const SpectralGrid& grid = *graph.grid;
  const int n = grid.n();
  const Model model{m.curvature(), m.curvature() == 0 ? n + 1 : n + 2};
  const std::size_t count = grid.size();

  std::vector<Eigen::VectorXd> position(count);
  for (std::size_t i = 0; i < count; ++i) {
    position[i] = embed(model, graph.rho[i], fiber_direction(grid.nodes()[i], n));
  }
  const auto dx = component_gradients(grid, position, model.dim);

  std::vector<std::array<Eigen::VectorXd, 2>> tangent(count);
  std::vector<Eigen::VectorXd> normal(count);
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < count; ++i) {
    for (int k = 0; k < n; ++k) {
      tangent[i][static_cast<std::size_t>(k)].resize(model.dim);
      for (int a = 0; a < model.dim; ++a) {
        tangent[i][static_cast<std::size_t>(k)](a) = dx[static_cast<std::size_t>(a)][i][static_cast<std::size_t>(k)];
      }
    }
    // Rows are the constraint covectors <., X> (curved models) and <., d_k X>.
    const int rows = n + (model.curvature == 0 ? 0 : 1);
    Eigen::MatrixXd constraints(rows, model.dim);
    int row = 0;
    auto lower = [&](const Eigen::VectorXd& y) {
      Eigen::RowVectorXd c(model.dim);
      for (int a = 0; a < model.dim; ++a) c(a) = model.sign(a) * y(a);
      return c;
    };
    if (model.curvature != 0) constraints.row(row++) = lower(position[i]);
    for (int k = 0; k < n; ++k) constraints.row(row++) = lower(tangent[i][static_cast<std::size_t>(k)]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
    Eigen::VectorXd nu = svd.matrixV().col(model.dim - 1);
    const double norm_sq = model.dot(nu, nu);
    if (!(norm_sq > 0.0)) {
      bad.push_back(i);
      normal[i] = Eigen::VectorXd::Zero(model.dim);
      continue;
    }
    nu /= std::sqrt(norm_sq);
    const Eigen::VectorXd radial = radial_direction(model, graph.rho[i], fiber_direction(grid.nodes()[i], n));
    if (model.dot(nu, radial) < 0.0) nu = -nu;
    normal[i] = nu;
  }
  if (!bad.empty()) throw Error(ErrorCode::GeometryInvalid, "embedded normal is not space-like", bad);

  const auto dnu = component_gradients(grid, normal, model.dim);
  const Partials partials = grid.differentiate(graph.rho, true);

  std::vector<GeometrySample> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const GridNode& node = grid.nodes()[i];
    GeometrySample& s = out[i];
    s.r = graph.rho[i];
    s.warp = m.eval_unchecked(s.r);
    s.grad_rho.resize(n);
    s.hess_rho.resize(n, n);
    if (n == 1) {
      s.grad_rho(0) = partials.d1[i][0];
      s.hess_rho(0, 0) = partials.d2[i][0];
    } else {
      s.grad_rho << partials.d1[i][0], partials.d1[i][1];
      s.hess_rho << partials.d2[i][0], partials.d2[i][1], partials.d2[i][1], partials.d2[i][2];
    }
    s.g.resize(n, n);
    s.h.resize(n, n);
    for (int a = 0; a < n; ++a) {
      Eigen::VectorXd dn(model.dim);
      for (int c = 0; c < model.dim; ++c) dn(c) = dnu[static_cast<std::size_t>(c)][i][static_cast<std::size_t>(a)];
      for (int b = 0; b < n; ++b) {
        s.g(a, b) = model.dot(tangent[i][static_cast<std::size_t>(a)], tangent[i][static_cast<std::size_t>(b)]);
        s.h(a, b) = model.dot(dn, tangent[i][static_cast<std::size_t>(b)]);
      }
    }
    s.h = 0.5 * (s.h + s.h.transpose()).eval();
    detail::principal_curvatures(s.g, s.h, s.kappa, s.frame);
    s.u = model.dot(conformal_field(model, position[i]), normal[i]);
    s.normal_radial =
        model.dot(radial_direction(model, s.r, fiber_direction(node, n)), normal[i]);
    s.v = 1.0 / s.normal_radial;
    s.sqrt_det_g = std::sqrt(s.g.determinant());
    s.area_weight = s.sqrt_det_g / detail::sqrt_det_sigma(node, n) * node.weight;
  }
  return out;
}

}  // namespace warpcheck

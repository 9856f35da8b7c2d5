#pragma once

#include <array>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "warpcheck/grid.hpp"
#include "warpcheck/numerics.hpp"
#include "warpcheck/report.hpp"
#include "warpcheck/symfunc.hpp"
#include "warpcheck/warped.hpp"

namespace warpcheck {

/// Small dense types with a fixed 2x2 capacity: tensors on a hypersurface of
/// dimension n <= 2 without heap traffic.
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;

/// Star-shaped closed hypersurface {r = rho(theta)} over the fiber sphere.
struct RadialGraph {
  std::shared_ptr<const SpectralGrid> grid;
  std::vector<double> rho;
  std::shared_ptr<const WarpedProduct> manifold;

  const GridSpec& spec() const { return grid->spec(); }
  int n() const { return grid->n(); }
};

/// Extrinsic data at one node, in the coordinates of the fiber grid
/// (polar/azimuth for n = 2).
struct GeometrySample {
  double r = 0.0;
  SmallVec grad_rho;   // coordinate partials of rho
  SmallMat hess_rho;   // coordinate second partials of rho
  SmallMat g;          // induced metric
  SmallMat h;          // second fundamental form, outward normal
  SmallVec kappa;      // principal curvatures, ascending
  SmallMat frame;      // columns: g-orthonormal principal directions
  double u = 0.0;      // support function <lambda d_r, nu>
  WarpSample warp;
  double v = 1.0;      // sqrt(1 + lambda^-2 |D rho|^2)
  double normal_radial = 1.0;  // <d_r, nu> = 1/v
  double area_weight = 0.0;    // quadrature weight of the area measure
  double sqrt_det_g = 0.0;

  Spectrum spectrum() const;
  double p1() const { return kappa.mean(); }
};

RadialGraph build_sphere_graph(std::shared_ptr<const WarpedProduct> m, double radius, double center_offset,
                               const GridSpec& grid);

/// rho = base_radius + sum of amplitude * cos(degree * theta) (n = 1) or
/// amplitude * P_degree(cos theta) (n = 2).
RadialGraph build_perturbed_graph(std::shared_ptr<const WarpedProduct> m, double base_radius,
                                  std::span<const std::pair<int, double>> modes, const GridSpec& grid);

/// Graph with prescribed nodal radii; validates the domain.
RadialGraph make_graph(std::shared_ptr<const WarpedProduct> m, std::shared_ptr<const SpectralGrid> grid,
                       std::vector<double> rho);

/// Interpolates the graph onto the half-resolution grid.
RadialGraph coarsen(const RadialGraph& graph);

std::vector<GeometrySample> compute_geometry(const RadialGraph& graph);

/// Independent backend for space forms: embeds the graph in the hyperboloid,
/// Euclidean space or the round sphere and differentiates the embedded normal.
/// Throws UnsupportedManifold for custom warps.
std::vector<GeometrySample> compute_geometry_embedded(const RadialGraph& graph);

/// Graph, its geometry, and the same pair at half resolution for error
/// estimates.
class Surface {
 public:
  explicit Surface(RadialGraph graph, bool with_coarse = true);

  const RadialGraph& graph() const noexcept { return graph_; }
  const WarpedProduct& manifold() const noexcept { return *graph_.manifold; }
  const SpectralGrid& grid() const noexcept { return *graph_.grid; }
  const std::vector<GeometrySample>& samples() const noexcept { return samples_; }
  const GeometrySample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }
  int n() const noexcept { return graph_.n(); }
  /// Half-resolution counterpart, or nullptr.
  const Surface* coarse() const noexcept { return coarse_.get(); }

 private:
  RadialGraph graph_;
  std::vector<GeometrySample> samples_;
  std::shared_ptr<const Surface> coarse_;
};

/// Value with an error estimate |full - half resolution| plus a round-off
/// floor.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Summation round-off bound attached to every quadrature estimate.
inline double roundoff_floor(double abs_sum) { return 64.0 * 2.220446049250313e-16 * abs_sum; }

/// Sum of f * area_weight with no error estimate.
double surface_sum(const Surface& s, std::span<const double> f);

/// Integral of a nodal field; the error compares with the field interpolated
/// to the coarse grid.
Estimate integrate_surface(const Surface& s, std::span<const double> f);

/// Integral of a pointwise integrand evaluated at both resolutions.
template <class Integrand>
Estimate integrate_surface_with(const Surface& s, Integrand&& integrand);

/// Integral of lambda' over the region between the graph and r = 0.
Estimate weighted_volume(const Surface& s);
double weighted_volume_value(const Surface& s);

/// Maximum-norm residuals of grad Phi = <V, e_i>, the Hessian identity
/// Hess Phi = lambda' g - u h, and grad u = h(V^T), measured with g.
struct Lemma23Residuals {
  FunctionalReport gradient_phi;
  FunctionalReport hessian_phi;
  FunctionalReport gradient_u;
};
Lemma23Residuals lemma23_residuals(const Surface& s, double abs_tol = kDefaultAbsTol);

/// min over nodes of (kappa_min - lambda'' u / (lambda lambda')); throws
/// PotentialSign if lambda' <= 0 at a node.
double static_convex_margin(const Surface& s);

/// max kappa - min kappa over all nodes and directions.
double umbilic_spread(const Surface& s);

// Intrinsic calculus on the graph.

/// Christoffel symbols of the induced metric: result[k](i, j) = Gamma^k_ij.
std::array<SmallMat, 2> induced_christoffel(const GeometrySample& sample, const GridNode& node, int n);

/// Covariant Hessian of a scalar from its coordinate partials.
SmallMat covariant_hessian(const std::array<double, 2>& d1, const std::array<double, 3>& d2,
                           const std::array<SmallMat, 2>& gamma, int n);

/// Covariant Hessians of a nodal scalar field.
std::vector<SmallMat> surface_hessian(const Surface& s, std::span<const double> f);

/// |w|_g for a covector and |T|_g for a (0,2) tensor.
double covector_norm(const SmallMat& g, const SmallVec& w);
double tensor_norm(const SmallMat& g, const SmallMat& t);

// Implementation of the template above.
template <class Integrand>
Estimate integrate_surface_with(const Surface& s, Integrand&& integrand) {
  auto evaluate = [&](const Surface& level, double& abs_sum) {
    std::vector<double> terms(level.size());
    abs_sum = 0.0;
    for (std::size_t i = 0; i < level.size(); ++i) {
      terms[i] = integrand(level, i) * level[i].area_weight;
      abs_sum += std::abs(terms[i]);
    }
    return pairwise_sum(terms);
  };
  double abs_sum = 0.0;
  double coarse_abs = 0.0;
  Estimate e;
  e.value = evaluate(s, abs_sum);
  e.error = roundoff_floor(abs_sum);
  if (s.coarse()) e.error += std::abs(e.value - evaluate(*s.coarse(), coarse_abs));
  return e;
}

}  // namespace warpcheck

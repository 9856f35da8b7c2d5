#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace warpcheck {

/// Quadrature grid on S^n.
///   n = 1: n_theta equally spaced angles on the circle.
///   n = 2: n_mu Gauss-Legendre nodes in mu = cos(polar angle) times n_phi
///          uniform azimuth nodes; no node sits on a pole.
struct GridSpec {
  int n = 1;
  int n_theta = 0;
  int n_mu = 0;
  int n_phi = 0;

  static GridSpec circle(int n_theta);
  static GridSpec sphere(int n_mu, int n_phi);

  /// User-facing invariants: n_theta >= 16, n_mu >= 8, n_phi >= 16, and the
  /// periodic counts divisible by 4 so the half-resolution grid exists.
  void validate() const;
  std::size_t size() const noexcept;
  GridSpec half() const;

  bool operator==(const GridSpec&) const = default;
};

/// Coordinates of one node. For n = 2, theta is the polar angle and phi the
/// azimuth; for n = 1 only theta is used and sin_theta is 1.
struct GridNode {
  double theta = 0.0;
  double phi = 0.0;
  double sin_theta = 1.0;
  double cos_theta = 0.0;
  double weight = 0.0;  // quadrature weight for the round measure on S^n
};

/// First and second coordinate partials of a nodal field. d2 holds
/// (00, 01, 11); for n = 1 only index 0 is meaningful.
struct Partials {
  std::vector<std::array<double, 2>> d1;
  std::vector<std::array<double, 3>> d2;
};

/// Pseudo-spectral differentiation and fine-to-coarse transfer on a GridSpec.
///
/// n = 1 uses Fourier differentiation on the periodic circle. For n = 2 the
/// azimuth is Fourier; along each great circle through the poles the field is
/// split into the part even under the antipodal-meridian reflection (a smooth
/// function of mu) and the odd part (sin(theta) times a smooth function of mu),
/// and both are differentiated as Lagrange interpolants at the Gauss nodes.
class SpectralGrid {
 public:
  explicit SpectralGrid(GridSpec spec, bool with_coarse = true);

  const GridSpec& spec() const noexcept { return spec_; }
  int n() const noexcept { return spec_.n; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<GridNode>& nodes() const noexcept { return nodes_; }
  /// Node index for (mu index, phi index); n = 1 uses index(0, j).
  std::size_t index(int i_mu, int j_phi) const noexcept;

  /// Half-resolution grid, or nullptr when built without one.
  const std::shared_ptr<const SpectralGrid>& coarse() const noexcept { return coarse_; }

  Partials differentiate(std::span<const double> f, bool second = true) const;
  /// First partials only.
  std::vector<std::array<double, 2>> gradient(std::span<const double> f) const;

  /// Spectral interpolation of a nodal field onto coarse().
  std::vector<double> restrict_to_coarse(std::span<const double> f) const;

 private:
  void build_nodes();

  GridSpec spec_;
  std::vector<GridNode> nodes_;
  std::vector<double> mu_;
  std::vector<double> bary_;            // barycentric weights of the mu nodes
  Eigen::MatrixXd mu_d1_, mu_d2_;       // Lagrange differentiation in mu
  Eigen::MatrixXd fourier_d1_, fourier_d2_;
  Eigen::MatrixXd mu_to_coarse_;        // Lagrange interpolation onto coarse mu nodes
  std::shared_ptr<const SpectralGrid> coarse_;
};

std::shared_ptr<const SpectralGrid> make_grid(const GridSpec& spec);

}  // namespace warpcheck

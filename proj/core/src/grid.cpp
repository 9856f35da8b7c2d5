#include "warpcheck/grid.hpp"

#include <cmath>
#include <string>

#include "warpcheck/error.hpp"
#include "warpcheck/numerics.hpp"

namespace warpcheck {

namespace {

// Fourier differentiation on an even number of equispaced periodic nodes.
void fourier_matrices(int count, Eigen::MatrixXd& d1, Eigen::MatrixXd& d2) {
  const double h = 2.0 * kPi / static_cast<double>(count);
  d1 = Eigen::MatrixXd::Zero(count, count);
  d2 = Eigen::MatrixXd::Zero(count, count);
  for (int j = 0; j < count; ++j) {
    for (int k = 0; k < count; ++k) {
      if (j == k) {
        d2(j, k) = -kPi * kPi / (3.0 * h * h) - 1.0 / 6.0;
        continue;
      }
      const double sign = ((j - k) % 2 == 0) ? 1.0 : -1.0;
      const double half_angle = 0.5 * static_cast<double>(j - k) * h;
      d1(j, k) = 0.5 * sign / std::tan(half_angle);
      const double s = std::sin(half_angle);
      d2(j, k) = -0.5 * sign / (s * s);
    }
  }
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j) w[j] *= (x[j] - x[k]);
    }
    w[j] = 1.0 / w[j];
  }
  // Rescale to unit max magnitude; barycentric formulas are scale invariant.
  double big = 0.0;
  for (double v : w) big = std::max(big, std::abs(v));
  for (double& v : w) v /= big;
  return w;
}

Eigen::MatrixXd lagrange_derivative(const std::vector<double>& x, const std::vector<double>& w) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (w[j] / w[i]) / (x[i] - x[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

Eigen::MatrixXd lagrange_interpolation(const std::vector<double>& x, const std::vector<double>& w,
                                       const std::vector<double>& targets) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(targets.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, n);
  for (int i = 0; i < m; ++i) {
    int exact = -1;
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      const double diff = targets[i] - x[j];
      if (diff == 0.0) {
        exact = j;
        break;
      }
      p(i, j) = w[j] / diff;
      denom += p(i, j);
    }
    if (exact >= 0) {
      p.row(i).setZero();
      p(i, exact) = 1.0;
    } else {
      p.row(i) /= denom;
    }
  }
  return p;
}

}  // namespace

GridSpec GridSpec::circle(int n_theta) { return GridSpec{1, n_theta, 0, 0}; }
GridSpec GridSpec::sphere(int n_mu, int n_phi) { return GridSpec{2, 0, n_mu, n_phi}; }

void GridSpec::validate() const {
  if (n == 1) {
    if (n_theta < 16 || n_theta % 4 != 0) {
      throw Error(ErrorCode::ConfigInvalid, "n_theta must be >= 16 and divisible by 4, got " + std::to_string(n_theta));
    }
    return;
  }
  if (n == 2) {
    if (n_mu < 8) throw Error(ErrorCode::ConfigInvalid, "n_mu must be >= 8, got " + std::to_string(n_mu));
    if (n_phi < 16 || n_phi % 4 != 0) {
      throw Error(ErrorCode::ConfigInvalid, "n_phi must be >= 16 and divisible by 4, got " + std::to_string(n_phi));
    }
    return;
  }
  throw Error(ErrorCode::ConfigInvalid, "grid dimension must be 1 or 2");
}

std::size_t GridSpec::size() const noexcept {
  return n == 1 ? static_cast<std::size_t>(n_theta) : static_cast<std::size_t>(n_mu) * static_cast<std::size_t>(n_phi);
}

GridSpec GridSpec::half() const {
  return n == 1 ? circle(n_theta / 2) : sphere(n_mu / 2, n_phi / 2);
}

SpectralGrid::SpectralGrid(GridSpec spec, bool with_coarse) : spec_(spec) {
  build_nodes();
  if (with_coarse) {
    coarse_ = std::make_shared<const SpectralGrid>(spec_.half(), false);
    if (spec_.n == 2) mu_to_coarse_ = lagrange_interpolation(mu_, bary_, coarse_->mu_);
  }
}

void SpectralGrid::build_nodes() {
  if (spec_.n == 1) {
    const int count = spec_.n_theta;
    nodes_.resize(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
      GridNode& node = nodes_[static_cast<std::size_t>(j)];
      node.theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(count);
      node.weight = 2.0 * kPi / static_cast<double>(count);
    }
    fourier_matrices(count, fourier_d1_, fourier_d2_);
    return;
  }
  const GaussLegendre rule = gauss_legendre(static_cast<std::size_t>(spec_.n_mu));
  mu_ = rule.nodes;
  bary_ = barycentric_weights(mu_);
  mu_d1_ = lagrange_derivative(mu_, bary_);
  mu_d2_ = mu_d1_ * mu_d1_;
  fourier_matrices(spec_.n_phi, fourier_d1_, fourier_d2_);
  nodes_.resize(spec_.size());
  const double dphi = 2.0 * kPi / static_cast<double>(spec_.n_phi);
  for (int i = 0; i < spec_.n_mu; ++i) {
    const double mu = mu_[static_cast<std::size_t>(i)];
    for (int j = 0; j < spec_.n_phi; ++j) {
      GridNode& node = nodes_[index(i, j)];
      node.theta = std::acos(mu);
      node.phi = dphi * static_cast<double>(j);
      node.cos_theta = mu;
      node.sin_theta = std::sqrt((1.0 - mu) * (1.0 + mu));
      node.weight = rule.weights[static_cast<std::size_t>(i)] * dphi;
    }
  }
}

std::size_t SpectralGrid::index(int i_mu, int j_phi) const noexcept {
  if (spec_.n == 1) return static_cast<std::size_t>(j_phi);
  return static_cast<std::size_t>(i_mu) * static_cast<std::size_t>(spec_.n_phi) + static_cast<std::size_t>(j_phi);
}

Partials SpectralGrid::differentiate(std::span<const double> f, bool second) const {
  Partials out;
  out.d1.assign(size(), {0.0, 0.0});
  out.d2.assign(size(), {0.0, 0.0, 0.0});

  if (spec_.n == 1) {
    const Eigen::Map<const Eigen::VectorXd> raw(f.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::VectorXd values = raw.array() - raw.mean();
    const Eigen::VectorXd first = fourier_d1_ * values;
    for (std::size_t j = 0; j < size(); ++j) out.d1[j][0] = first(static_cast<Eigen::Index>(j));
    if (second) {
      const Eigen::VectorXd sec = fourier_d2_ * values;
      for (std::size_t j = 0; j < size(); ++j) out.d2[j][0] = sec(static_cast<Eigen::Index>(j));
    }
    return out;
  }

  const int n_mu = spec_.n_mu;
  const int n_phi = spec_.n_phi;
  const int half_phi = n_phi / 2;

  // Azimuthal derivatives ring by ring.
  std::vector<double> f_phi(size());
  for (int i = 0; i < n_mu; ++i) {
    const Eigen::Map<const Eigen::VectorXd> raw(f.data() + index(i, 0), n_phi);
    const Eigen::VectorXd ring = raw.array() - raw.mean();
    const Eigen::VectorXd first = fourier_d1_ * ring;
    for (int j = 0; j < n_phi; ++j) {
      out.d1[index(i, j)][1] = first(j);
      f_phi[index(i, j)] = first(j);
    }
    if (second) {
      const Eigen::VectorXd sec = fourier_d2_ * ring;
      for (int j = 0; j < n_phi; ++j) out.d2[index(i, j)][2] = sec(j);
    }
  }

  // Polar derivatives along each great circle (meridian j joined with j + n_phi/2).
  Eigen::VectorXd even(n_mu), odd(n_mu), even_phi(n_mu), odd_phi(n_mu);
  for (int j = 0; j < half_phi; ++j) {
    const int jb = j + half_phi;
    for (int i = 0; i < n_mu; ++i) {
      const double s = nodes_[index(i, j)].sin_theta;
      const double a = f[index(i, j)];
      const double b = f[index(i, jb)];
      even(i) = 0.5 * (a + b);
      odd(i) = 0.5 * (a - b) / s;
      const double pa = f_phi[index(i, j)];
      const double pb = f_phi[index(i, jb)];
      even_phi(i) = 0.5 * (pa + pb);
      odd_phi(i) = 0.5 * (pa - pb) / s;
    }
    const Eigen::VectorXd e1 = mu_d1_ * even;
    const Eigen::VectorXd o1 = mu_d1_ * odd;
    const Eigen::VectorXd ep1 = mu_d1_ * even_phi;
    const Eigen::VectorXd op1 = mu_d1_ * odd_phi;
    Eigen::VectorXd e2, o2;
    if (second) {
      e2 = mu_d2_ * even;
      o2 = mu_d2_ * odd;
    }
    for (int i = 0; i < n_mu; ++i) {
      const double s = nodes_[index(i, j)].sin_theta;
      const double c = nodes_[index(i, j)].cos_theta;
      for (int side = 0; side < 2; ++side) {
        const double sign = side == 0 ? 1.0 : -1.0;
        const std::size_t k = index(i, side == 0 ? j : jb);
        // f = E(mu) + sign * sin(theta) * O(mu), mu = cos(theta).
        out.d1[k][0] = -s * e1(i) + sign * (c * odd(i) - s * s * o1(i));
        // The azimuthal derivative field changes sign with the reflection:
        // on the far meridian it is E_phi - sin(theta) O_phi in the same split.
        out.d2[k][1] = -s * ep1(i) + sign * (c * odd_phi(i) - s * s * op1(i));
        if (second) {
          out.d2[k][0] = -c * e1(i) + s * s * e2(i) +
                         sign * (-s * odd(i) - 3.0 * s * c * o1(i) + s * s * s * o2(i));
        }
      }
    }
  }
  if (!second) {
    for (auto& d : out.d2) d = {0.0, 0.0, 0.0};
  }
  return out;
}

std::vector<std::array<double, 2>> SpectralGrid::gradient(std::span<const double> f) const {
  return differentiate(f, false).d1;
}

std::vector<double> SpectralGrid::restrict_to_coarse(std::span<const double> f) const {
  if (!coarse_) throw std::logic_error("grid has no coarse level");
  const SpectralGrid& c = *coarse_;
  std::vector<double> out(c.size());
  if (spec_.n == 1) {
    for (std::size_t j = 0; j < c.size(); ++j) out[j] = f[2 * j];
    return out;
  }
  const int n_mu = spec_.n_mu;
  const int half_phi = spec_.n_phi / 2;
  const int coarse_half_phi = c.spec_.n_phi / 2;
  Eigen::VectorXd even(n_mu), odd(n_mu);
  for (int jc = 0; jc < coarse_half_phi; ++jc) {
    const int j = 2 * jc;
    for (int i = 0; i < n_mu; ++i) {
      const double s = nodes_[index(i, j)].sin_theta;
      const double a = f[index(i, j)];
      const double b = f[index(i, j + half_phi)];
      even(i) = 0.5 * (a + b);
      odd(i) = 0.5 * (a - b) / s;
    }
    const Eigen::VectorXd ce = mu_to_coarse_ * even;
    const Eigen::VectorXd co = mu_to_coarse_ * odd;
    for (int i = 0; i < c.spec_.n_mu; ++i) {
      const double s = c.nodes_[c.index(i, jc)].sin_theta;
      out[c.index(i, jc)] = ce(i) + s * co(i);
      out[c.index(i, jc + coarse_half_phi)] = ce(i) - s * co(i);
    }
  }
  return out;
}

std::shared_ptr<const SpectralGrid> make_grid(const GridSpec& spec) {
  return std::make_shared<const SpectralGrid>(spec, true);
}

}  // namespace warpcheck

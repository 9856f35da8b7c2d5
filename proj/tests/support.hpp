#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "warpcheck/hypersurface.hpp"
#include "warpcheck/warped.hpp"

namespace testing_support {

using namespace warpcheck;

inline std::shared_ptr<const WarpedProduct> space_form(int c, int n) {
  return std::make_shared<const WarpedProduct>(make_space_form(c, n));
}

inline std::shared_ptr<const WarpedProduct> horizon(int n) {
  return std::make_shared<const WarpedProduct>(make_horizon_example(n));
}

inline GridSpec default_grid(int n) { return n == 1 ? GridSpec::circle(512) : GridSpec::sphere(32, 64); }

inline Surface sphere(std::shared_ptr<const WarpedProduct> m, double radius, double offset = 0.0) {
  const GridSpec g = default_grid(m->n());
  return Surface(build_sphere_graph(std::move(m), radius, offset, g));
}

inline Surface perturbed(std::shared_ptr<const WarpedProduct> m, double base, std::vector<std::pair<int, double>> modes,
                         GridSpec grid = {}) {
  if (grid.n_theta == 0 && grid.n_mu == 0) grid = default_grid(m->n());
  return Surface(build_perturbed_graph(std::move(m), base, modes, grid));
}

inline double max_kappa_deviation(const Surface& s, double expected) {
  double d = 0.0;
  for (const auto& g : s.samples())
    for (int a = 0; a < s.n(); ++a) d = std::max(d, std::abs(g.kappa[a] - expected));
  return d;
}

inline double sphere_volume(int n) { return n == 1 ? 2.0 * M_PI : 4.0 * M_PI; }

}  // namespace testing_support

#include <gtest/gtest.h>

#include <cmath>

#include "warpcheck/error.hpp"
#include "warpcheck/grid.hpp"
#include "warpcheck/numerics.hpp"

using namespace warpcheck;

namespace {

// f = exp(x + z/2) on the unit sphere, with analytic coordinate partials.
struct Probe {
  double f, t, p, tt, tp, pp;
};

Probe probe(double th, double ph) {
  const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
  const double f = std::exp(st * cp + 0.5 * ct);
  const double a = ct * cp - 0.5 * st;  // d(x + z/2)/dtheta
  const double b = -st * sp;            // d(x + z/2)/dphi
  return {f, f * a, f * b, f * (a * a - st * cp - 0.5 * ct), f * (a * b - ct * sp), f * (b * b - st * cp)};
}

}  // namespace

TEST(GridSpec, Validation) {
  EXPECT_NO_THROW(GridSpec::circle(16).validate());
  EXPECT_NO_THROW(GridSpec::sphere(8, 16).validate());
  for (const auto& bad : {GridSpec::circle(12), GridSpec::circle(18), GridSpec::sphere(6, 16), GridSpec::sphere(8, 18)}) {
    try {
      bad.validate();
      FAIL() << "expected ConfigInvalid";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
    }
  }
  EXPECT_EQ(GridSpec::sphere(32, 64).half(), GridSpec::sphere(16, 32));
  EXPECT_EQ(GridSpec::sphere(32, 64).size(), 2048u);
}

TEST(GaussLegendre, ExactForPolynomials) {
  const auto gl = gauss_legendre(8);
  double s0 = 0.0, s14 = 0.0, s15 = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    s0 += gl.weights[i];
    s14 += gl.weights[i] * std::pow(gl.nodes[i], 14);
    s15 += gl.weights[i] * std::pow(gl.nodes[i], 15);
  }
  EXPECT_NEAR(s0, 2.0, 1e-14);
  EXPECT_NEAR(s14, 2.0 / 15.0, 1e-14);
  EXPECT_NEAR(s15, 0.0, 1e-14);
}

TEST(PairwiseSum, Deterministic) {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  const double a = pairwise_sum(v);
  EXPECT_EQ(a, pairwise_sum(v));
  EXPECT_NEAR(a, 7.486469861549346, 1e-13);
}

TEST(SpectralGrid, SphereQuadrature) {
  SpectralGrid g(GridSpec::sphere(16, 32));
  double area = 0.0, z2 = 0.0, fx = 0.0;
  for (const auto& n : g.nodes()) {
    area += n.weight;
    z2 += n.weight * n.cos_theta * n.cos_theta;
    fx += n.weight * std::exp(n.sin_theta * std::cos(n.phi));
  }
  EXPECT_NEAR(area, 4 * M_PI, 1e-13);
  EXPECT_NEAR(z2, 4 * M_PI / 3, 1e-13);
  // integral of e^x over S^2 is 2 pi (e - 1/e)
  EXPECT_NEAR(fx, 2 * M_PI * (std::exp(1.0) - std::exp(-1.0)), 1e-12);
}

TEST(SpectralGrid, CircleDerivatives) {
  SpectralGrid g(GridSpec::circle(64));
  std::vector<double> f;
  for (const auto& n : g.nodes()) f.push_back(std::exp(std::cos(n.theta)));
  const auto d = g.differentiate(f);
  double err1 = 0.0, err2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double th = g.nodes()[i].theta;
    err1 = std::max(err1, std::abs(d.d1[i][0] + std::sin(th) * f[i]));
    err2 = std::max(err2, std::abs(d.d2[i][0] - (std::sin(th) * std::sin(th) - std::cos(th)) * f[i]));
  }
  EXPECT_LT(err1, 1e-12);
  EXPECT_LT(err2, 1e-11);
}

TEST(SpectralGrid, SphereDerivativesIncludingNearPoles) {
  SpectralGrid g(GridSpec::sphere(24, 48));
  std::vector<double> f;
  for (const auto& n : g.nodes()) f.push_back(probe(n.theta, n.phi).f);
  const auto d = g.differentiate(f);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& n = g.nodes()[i];
    const Probe e = probe(n.theta, n.phi);
    err = std::max({err, std::abs(d.d1[i][0] - e.t), std::abs(d.d1[i][1] - e.p), std::abs(d.d2[i][0] - e.tt),
                    std::abs(d.d2[i][1] - e.tp), std::abs(d.d2[i][2] - e.pp)});
  }
  EXPECT_LT(err, 1e-9);
}

TEST(SpectralGrid, ConvergesUnderRefinement) {
  double previous = 1.0;
  for (int nmu : {8, 12, 16}) {
    SpectralGrid g(GridSpec::sphere(nmu, 2 * nmu));
    std::vector<double> f;
    for (const auto& n : g.nodes()) f.push_back(probe(n.theta, n.phi).f);
    const auto d = g.differentiate(f);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto& n = g.nodes()[i];
      err = std::max(err, std::abs(d.d2[i][0] - probe(n.theta, n.phi).tt));
    }
    EXPECT_LT(err, previous / 4);
    previous = err;
  }
}

TEST(SpectralGrid, RestrictionInterpolates) {
  for (const auto spec : {GridSpec::circle(64), GridSpec::sphere(24, 48)}) {
    SpectralGrid g(spec);
    std::vector<double> f;
    for (const auto& n : g.nodes()) f.push_back(probe(n.theta, spec.n == 1 ? 0.3 : n.phi).f);
    const auto coarse = g.restrict_to_coarse(f);
    ASSERT_TRUE(g.coarse());
    ASSERT_EQ(coarse.size(), g.coarse()->size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      const auto& n = g.coarse()->nodes()[i];
      EXPECT_NEAR(coarse[i], probe(n.theta, spec.n == 1 ? 0.3 : n.phi).f, 1e-10);
    }
  }
}

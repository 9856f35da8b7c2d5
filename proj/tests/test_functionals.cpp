#include <gtest/gtest.h>

#include <cmath>
#include <tuple>

#include "support.hpp"
#include "warpcheck/error.hpp"
#include "warpcheck/functionals.hpp"

using namespace warpcheck;
using namespace testing_support;

namespace {

double coth(double x) { return 1.0 / std::tanh(x); }

double band(const FunctionalReport& r, double tol = kDefaultAbsTol) { return std::max(r.quadrature_error, tol); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

const std::vector<double> kEpsSweep{-1.0, -0.5, 0.0, 0.5, 1.0};

// Plain bisection, kept independent of the library root finder.
double bisect(auto&& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Verdicts, Judge) {
  EXPECT_EQ(judge(Claim::Identity, 1e-9, 0.0), Verdict::IdentityOk);
  EXPECT_EQ(judge(Claim::Identity, 1e-7, 0.0), Verdict::Violated);
  EXPECT_EQ(judge(Claim::Identity, 1e-7, 2e-7), Verdict::IdentityOk);
  EXPECT_EQ(judge(Claim::Positive, 1e-3, 1e-6), Verdict::InequalityOk);
  EXPECT_EQ(judge(Claim::Positive, 1e-7, 1e-6), Verdict::Inconclusive);
  EXPECT_EQ(judge(Claim::Positive, -1e-3, 1e-6), Verdict::Violated);
  EXPECT_EQ(judge(Claim::Nonnegative, -1e-9, 0.0), Verdict::InequalityOk);
  EXPECT_EQ(judge(Claim::Nonnegative, -1e-3, 1e-6), Verdict::Violated);
}

TEST(Minkowski, SpheresVanish) {
  for (const auto& s : {sphere(space_form(-1, 2), 1.0), sphere(space_form(-1, 2), 1.0, 0.3), sphere(space_form(1, 1), 0.7),
                        sphere(space_form(0, 2), 2.0)})
    for (double eps : kEpsSweep) {
      const auto r = minkowski_residual(s, eps);
      EXPECT_LE(std::abs(r.value), 1e-9);
      EXPECT_EQ(r.verdict, Verdict::IdentityOk);
    }
}

TEST(Minkowski, PerturbedGraphs) {
  for (const auto& s : {perturbed(space_form(-1, 2), 1.5, {{2, 0.1}, {3, 0.05}}), perturbed(space_form(-1, 1), 1.0, {{2, 0.1}}),
                        perturbed(horizon(2), 1.0, {{2, 0.05}})}) {
    const auto r = minkowski_residual(s, -1.0);
    EXPECT_LE(std::abs(r.value), band(r));
    EXPECT_EQ(r.inputs.eps, -1.0);
  }
}

TEST(Minkowski, SecondOrderUnderRefinement) {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const auto s = perturbed(space_form(-1, 1), 1.2, {{3, 0.15}, {4, 0.05}}, GridSpec::circle(n));
    const double v = std::abs(minkowski_residual(s, 0.5).value);
    if (n > 16 && prev > 1e-11) EXPECT_LE(v, prev / 4) << n;
    prev = v;
  }
}

TEST(ShiftedMinkowski, FirstOrderIsMinkowski) {
  const auto s = perturbed(space_form(-1, 2), 1.5, {{2, 0.1}});
  for (double eps : {-1.0, 0.3})
    EXPECT_NEAR(shifted_minkowski_residual(s, eps, 1).value, minkowski_residual(s, eps).value, 1e-12);
}

TEST(ShiftedMinkowski, SpheresAndPerturbed) {
  EXPECT_LE(std::abs(shifted_minkowski_residual(sphere(space_form(-1, 2), 1.0), 1.0, 2).value), 1e-9);
  const auto p = perturbed(space_form(-1, 2), 1.5, {{2, 0.1}, {3, 0.05}});
  for (double eps : {-1.0, 0.0, 1.0}) {
    const auto r = shifted_minkowski_residual(p, eps, 2);
    EXPECT_LE(std::abs(r.value), band(r)) << eps;
  }
}

TEST(ShiftedMinkowski, CustomWarpUnsupported) {
  const auto s = perturbed(horizon(2), 1.0, {});
  EXPECT_EQ(code_of([&] { shifted_minkowski_residual(s, 0.0, 2); }), ErrorCode::UnsupportedManifold);
  EXPECT_EQ(code_of([&] { integration_by_parts_residual(s, 0.0, 1); }), ErrorCode::UnsupportedManifold);
}

TEST(Divergence, WithAndWithoutHorizon) {
  for (const auto& s : {perturbed(space_form(-1, 2), 1.5, {{2, 0.1}}), perturbed(horizon(2), 1.0, {{2, 0.05}}),
                        perturbed(horizon(1), 0.7, {{2, 0.05}})}) {
    const auto r = divergence_residual(s);
    EXPECT_EQ(r.verdict, Verdict::IdentityOk);
  }
  EXPECT_DOUBLE_EQ(horizon_term(make_horizon_example(2)), 4 * M_PI);
  EXPECT_EQ(horizon_term(make_space_form(-1, 2)), 0.0);
}

TEST(HkAssumption, ExponentialBound) {
  const auto s = perturbed(space_form(-1, 2), 1.5, {{2, 0.1}, {3, 0.05}});
  double max_r = 0.0;
  for (const auto& g : s.samples()) max_r = std::max(max_r, g.r);
  for (double eps : kEpsSweep) {
    const auto r = hk_assumption_check(s, eps);
    EXPECT_GE(r.detail("min_potential_term"), std::exp(-max_r) - 1e-10);
    EXPECT_GE(r.detail("exp_bound_margin"), -1e-10);
  }
}

TEST(HkAssumption, SphereClosedForms) {
  const auto s = sphere(space_form(-1, 2), 1.0);
  EXPECT_NEAR(hk_assumption_check(s, -1.0).value, std::exp(1.0) * (coth(1.0) + 1.0), 1e-9);
  // On any centered sphere the product is sinh r (coth r - eps)^2, so eps = 2 at radius 2 passes.
  const auto big = sphere(space_form(-1, 2), 2.0);
  const double expected = std::sinh(2.0) * std::pow(coth(2.0) - 2.0, 2);
  const auto r = hk_assumption_check(big, 2.0);
  EXPECT_NEAR(r.value, expected, 1e-9);
  EXPECT_LT(r.detail("min_potential_term"), 0.0);
  EXPECT_LT(r.detail("min_p1_shift"), 0.0);
}

TEST(HkAssumption, DetectsMisalignedFactors) {
  const auto s = perturbed(space_form(-1, 2), 2.0, {{6, 0.05}});
  const auto r = hk_assumption_check(s, 1.0373);
  EXPECT_LT(r.value, 0.0);
  EXPECT_EQ(r.verdict, Verdict::Violated);
  try {
    hk_deficit(s, 1.0373);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AssumptionViolated);
    EXPECT_FALSE(e.nodes().empty());
  }
}

TEST(HkDeficit, UmbilicEquality) {
  for (const auto& s : {sphere(space_form(-1, 2), 1.0), sphere(space_form(-1, 2), 1.0, 0.3), sphere(space_form(-1, 1), 0.8, 0.2),
                        sphere(space_form(0, 2), 1.0, 0.4)})
    for (double eps : kEpsSweep) {
      if (hk_assumption_check(s, eps).value <= 0.0) continue;
      const auto r = hk_deficit(s, eps);
      EXPECT_LE(std::abs(r.value), band(r)) << s.manifold().tag() << " eps=" << eps;
      EXPECT_EQ(r.verdict, Verdict::InequalityOk);
    }
}

TEST(HkDeficit, HorizonSliceEquality) {
  const double r0 = 0.8;
  const auto s = perturbed(horizon(2), r0, {});
  for (double eps : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    if (!(std::sinh(r0) - eps * std::cosh(r0) > 0.0)) continue;  // lambda' - eps lambda > 0
    const auto r = hk_deficit(s, eps);
    EXPECT_LE(std::abs(r.value), 1e-8) << eps;
  }
}

TEST(HkDeficit, StrictOnNonUmbilicStaticConvex) {
  const auto s = perturbed(space_form(-1, 2), 1.0, {{2, 0.05}, {3, 0.02}});
  ASSERT_GT(static_convex_margin(s), 0.0);
  for (double eps : kEpsSweep) {
    const auto r = hk_deficit(s, eps);
    EXPECT_GT(r.value, 3 * r.quadrature_error) << eps;
    EXPECT_EQ(r.verdict, Verdict::InequalityOk);
  }
  const auto p = perturbed(space_form(-1, 1), 1.5, {{2, 0.1}});
  EXPECT_GT(hk_deficit(p, -1.0).value, 3 * hk_deficit(p, -1.0).quadrature_error);
}

TEST(HkDeficit, ZeroExactlyWhenUmbilic) {
  const std::vector<Surface> corpus = [] {
    std::vector<Surface> c;
    c.push_back(sphere(space_form(-1, 2), 1.0));
    c.push_back(sphere(space_form(-1, 2), 1.2, 0.4));
    c.push_back(perturbed(space_form(-1, 2), 1.0, {{2, 0.05}}));
    c.push_back(perturbed(space_form(-1, 1), 1.5, {{2, 0.1}, {3, 0.05}}));
    c.push_back(perturbed(horizon(2), 0.8, {}));
    return c;
  }();
  for (const auto& s : corpus) {
    const auto r = hk_deficit(s, 0.0);
    const bool zero = std::abs(r.value) <= band(r);
    EXPECT_EQ(zero, umbilic_spread(s) <= 1e-5) << s.manifold().tag();
  }
}

TEST(HkDeficit, ClassicalFormAgrees) {
  for (const auto& s : {perturbed(space_form(-1, 2), 1.0, {{2, 0.05}}), perturbed(horizon(2), 1.0, {{2, 0.05}}),
                        sphere(space_form(1, 2), 0.7, 0.2)})
    EXPECT_NEAR(hk_deficit(s, 0.0).value, classical_hk_deficit(s).value, 1e-12);
}

TEST(HkDeficit, HypothesesDowngrade) {
  // horizon graphs are not static-convex
  const auto s = perturbed(horizon(2), 1.0, {{2, 0.05}});
  const auto r = hk_deficit(s, 0.5);
  EXPECT_LT(r.detail("static_convex_margin"), 0.0);
  EXPECT_NE(r.verdict, Verdict::Violated);
}

TEST(SecondMinkowski, EqualityCases) {
  const auto s = sphere(space_form(-1, 2), 1.0);
  EXPECT_LE(std::abs(minkowski_second_deficit(s).value), 1e-8);
  const auto slice = perturbed(horizon(2), 0.8, {});
  EXPECT_LE(std::abs(minkowski_second_deficit(slice).value), 1e-8);
  for (double eps : kEpsSweep) EXPECT_LE(std::abs(equiv_ineq_residual(s, eps).value), 1e-8);
}

TEST(SecondMinkowski, AlgebraicAgreement) {
  for (const auto& s : {perturbed(space_form(-1, 2), 1.0, {{2, 0.05}}), perturbed(space_form(-1, 1), 1.5, {{2, 0.1}}),
                        sphere(space_form(-1, 2), 1.0, 0.3), perturbed(space_form(1, 2), 0.7, {{2, 0.05}})}) {
    const auto second = minkowski_second_deficit(s);
    EXPECT_GE(second.value, -second.quadrature_error);
    for (double eps : {-1.0, 0.0, 0.5, 1.0}) EXPECT_NEAR(equiv_ineq_residual(s, eps).value, second.value, 1e-9) << eps;
  }
}

TEST(SecondMinkowski, CauchySchwarzChain) {
  const auto sph = sphere(space_form(-1, 2), 1.0, 0.3);
  for (double eps : {-1.0, 0.5}) {
    const auto r = cauchy_schwarz_gap(sph, eps);
    EXPECT_LE(std::abs(r.value), 1e-8);
    EXPECT_LE(r.detail("p1_spread"), 1e-6);
  }
  const auto p = perturbed(space_form(-1, 2), 1.0, {{2, 0.05}});
  const auto r = cauchy_schwarz_gap(p, 0.5);
  EXPECT_GT(r.value, 3 * r.quadrature_error);
  EXPECT_GT(r.detail("p1_spread"), 1e-6);
}

TEST(CurvatureEquation, Thm12ConstantOnSphere) {
  const double r0 = 1.1;
  const auto s = sphere(space_form(-1, 2), r0);
  ChiSpec chi;
  chi.a = std::pow(coth(r0) + 1, 2);
  const auto r = curvature_equation_residual(s, 0.0, 2, chi, CurvatureVariant::Thm12);
  EXPECT_LE(r.value, 1e-8);
  EXPECT_EQ(r.verdict, Verdict::IdentityOk);
  EXPECT_EQ(r.inputs.eps, -1.0);
}

TEST(CurvatureEquation, Thm14RootAgainstScalarOracle) {
  ChiSpec chi;  // chi(a, b) = b
  chi.family = ChiSpec::Family::Affine;
  chi.a = 0.0;
  chi.b2 = 1.0;
  const auto m = make_space_form(-1, 2);
  // k = 1: (coth r - 1) = e^{-r} means sinh r = 1
  const double r1 = solve_sphere_radius(m, 1.0, 1, chi, CurvatureVariant::Thm14, 0.2, 3.0);
  EXPECT_NEAR(r1, std::asinh(1.0), 1e-12);
  // k = 2: sinh^2 r = e^{-r}
  const double r2 = solve_sphere_radius(m, 1.0, 2, chi, CurvatureVariant::Thm14, 0.2, 3.0);
  EXPECT_NEAR(r2, bisect([](double r) { return std::sinh(r) * std::sinh(r) - std::exp(-r); }, 0.2, 3.0), 1e-12);
  for (auto [k, radius] : {std::pair{1, r1}, std::pair{2, r2}}) {
    const auto r = curvature_equation_residual(sphere(space_form(-1, 2), radius), 1.0, k, chi, CurvatureVariant::Thm14);
    EXPECT_LE(r.value, 1e-8) << k;
  }
  EXPECT_EQ(code_of([&] { solve_sphere_radius(m, 1.0, 1, chi, CurvatureVariant::Thm14, 1.0, 3.0); }),
            ErrorCode::ConfigInvalid);
}

TEST(CurvatureEquation, FamiliesOnRootFoundSpheres) {
  const auto m = make_space_form(-1, 2);
  ChiSpec constant;
  constant.a = 2.0;
  ChiSpec affine;
  affine.family = ChiSpec::Family::Affine;
  affine.a = 2.0;
  affine.b1 = -0.5;
  ChiSpec power;
  power.family = ChiSpec::Family::Power;
  power.a = 3.0;
  power.q = -1.0;
  // (coth r - 1/2)^2 against each right-hand side has a single crossing in these brackets.
  for (const auto& [chi, lo, hi] : {std::tuple{constant, 0.3, 1.0}, std::tuple{affine, 1.0, 3.0}, std::tuple{power, 0.3, 1.0}}) {
    const double r = solve_sphere_radius(m, 0.5, 2, chi, CurvatureVariant::Thm14, lo, hi);
    EXPECT_LE(curvature_equation_residual(sphere(space_form(-1, 2), r), 0.5, 2, chi, CurvatureVariant::Thm14).value, 1e-8);
    const auto off = curvature_equation_residual(sphere(space_form(-1, 2), r, 0.3), 0.5, 2, chi, CurvatureVariant::Thm14,
                                                 Claim::Positive);
    if (off.detail("max_d1_chi") < 0.0) {
      EXPECT_GE(off.value, 10 * off.quadrature_error);
      EXPECT_EQ(off.verdict, Verdict::InequalityOk);
    }
  }
}

TEST(CurvatureEquation, LinearInChi) {
  const auto s = sphere(space_form(-1, 2), 1.0, 0.3);
  ChiSpec chi;
  chi.family = ChiSpec::Family::Affine;
  chi.a = 0.0;
  chi.b1 = 0.25;
  chi.b2 = -0.5;
  // p_k is constant on the umbilic sphere while chi varies, so the residual is set by chi alone when p_k is zeroed.
  const double eps = 1.0 / std::tanh(1.0);
  const double base = curvature_equation_residual(s, eps, 1, chi, CurvatureVariant::Thm14).value;
  const double scaled = curvature_equation_residual(s, eps, 1, chi.scaled(3.0), CurvatureVariant::Thm14).value;
  EXPECT_GT(base, 0.0);
  EXPECT_NEAR(scaled, 3.0 * base, 1e-8 * base);
}

TEST(CurvatureEquation, Unsupported) {
  const auto slice = perturbed(horizon(2), 1.0, {});
  EXPECT_EQ(code_of([&] { curvature_equation_residual(slice, 0.0, 1, ChiSpec{}, CurvatureVariant::Thm14); }),
            ErrorCode::UnsupportedManifold);
  const auto e = sphere(space_form(0, 2), 1.0);
  EXPECT_EQ(code_of([&] { curvature_equation_residual(e, 0.0, 1, ChiSpec{}, CurvatureVariant::Thm12); }),
            ErrorCode::UnsupportedManifold);
}

TEST(IntegrationByParts, FirstOrderMatchesMinkowski) {
  const auto s = perturbed(space_form(-1, 2), 1.5, {{2, 0.1}});
  EXPECT_NEAR(integration_by_parts_residual(s, 0.3, 1).value, minkowski_residual(s, 0.3).value, 1e-9);
}

TEST(IntegrationByParts, Residuals) {
  EXPECT_LE(std::abs(integration_by_parts_residual(sphere(space_form(-1, 2), 1.0), 0.0, 2).value), 1e-8);
  for (const auto& s : {perturbed(space_form(-1, 2), 1.5, {{2, 0.1}, {3, 0.05}}), sphere(space_form(1, 2), 0.8, 0.3),
                        perturbed(space_form(0, 1), 1.0, {{3, 0.1}})}) {
    for (int k = 1; k <= s.n(); ++k) {
      const auto r = integration_by_parts_residual(s, 1.0, k);
      EXPECT_LE(std::abs(r.value), band(r)) << s.manifold().tag() << " k=" << k;
      const auto d = divergence_free_residual(s, 1.0, k);
      EXPECT_LE(std::abs(d.value), band(d)) << s.manifold().tag() << " k=" << k;
    }
  }
}

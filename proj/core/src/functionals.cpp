#include "warpcheck/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "warpcheck/error.hpp"
#include "warpcheck/numerics.hpp"
#include "warpcheck/symfunc.hpp"

namespace warpcheck {

namespace {

// A functional evaluated on one resolution level, with the magnitude that
// bounds its summation round-off.
struct Level {
  double value = 0.0;
  double scale = 0.0;
};

Level integral(const Surface& s, const std::function<double(const GeometrySample&, std::size_t)>& f) {
  std::vector<double> terms(s.size());
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    terms[i] = f(s[i], i) * s[i].area_weight;
    abs_sum += std::abs(terms[i]);
  }
  return {pairwise_sum(terms), abs_sum};
}

Level product(const Level& a, const Level& b) {
  return {a.value * b.value, a.scale * std::abs(b.value) + std::abs(a.value) * b.scale};
}

Level difference(const Level& a, const Level& b) { return {a.value - b.value, a.scale + b.scale}; }

Level volume_level(const Surface& s) {
  const double v = weighted_volume_value(s);
  return {v, std::abs(v)};
}

Estimate two_level(const Surface& s, const std::function<Level(const Surface&)>& f) {
  const Level fine = f(s);
  Estimate e{fine.value, roundoff_floor(fine.scale)};
  if (s.coarse()) e.error += std::abs(fine.value - f(*s.coarse()).value);
  return e;
}

ReportInputs inputs_of(const Surface& s, std::optional<double> eps, std::optional<int> k) {
  return {eps, k, s.manifold().tag()};
}

void require_space_form(const Surface& s, const char* what) {
  if (!s.manifold().is_space_form()) {
    throw Error(ErrorCode::UnsupportedManifold, std::string(what) + " needs a space form");
  }
}

void require_order(const Surface& s, int m) {
  if (m < 1 || m > s.n()) {
    throw Error(ErrorCode::ConfigInvalid, "order must lie in [1, n], got " + std::to_string(m));
  }
}

double shifted_p(const GeometrySample& g, double eps, int m) { return eval_pm(shift_spectrum(g.spectrum(), eps), m); }

double potential_term(const GeometrySample& g, double eps) { return g.warp.lam1 - eps * g.u; }

// Volume side of the Heintze-Karcher inequalities: (n+1) Vol_w + horizon flux.
Level enclosed_term(const Surface& s) {
  const double n1 = static_cast<double>(s.n() + 1);
  const Level vol = volume_level(s);
  const double flux = horizon_term(s.manifold());
  return {n1 * vol.value + flux, n1 * vol.scale + std::abs(flux)};
}

std::vector<std::size_t> gate_failures(const Surface& s, double eps) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(potential_term(s[i], eps) * (s[i].p1() - eps) > 0.0)) bad.push_back(i);
  }
  return bad;
}

void require_positive_potential(const Surface& s) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i].warp.lam1 > 0.0)) bad.push_back(i);
  }
  if (!bad.empty()) throw Error(ErrorCode::PotentialSign, "lambda' <= 0 on the surface", bad);
}

// dp_k^{ij} Hess_ij Phi at each node, in the principal frame.
std::vector<double> linearized_contraction(const Surface& s, double eps, int k) {
  std::vector<double> phi(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) phi[i] = s[i].warp.phi;
  const std::vector<SmallMat> hess = surface_hessian(s, phi);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::vector<double> dp = grad_pm(shift_spectrum(s[i].spectrum(), eps), k);
    double acc = 0.0;
    for (int a = 0; a < s.n(); ++a) {
      const SmallVec w = s[i].frame.col(a);
      acc += dp[static_cast<std::size_t>(a)] * w.dot(hess[i] * w);
    }
    out[i] = acc;
  }
  return out;
}

double static_margin_or_nan(const Surface& s) {
  try {
    return static_convex_margin(s);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// Outside the hypotheses of the inequality a negative value is no
// counterexample; the verdict drops to inconclusive and the reason is noted.
void apply_hypotheses(FunctionalReport& r, bool met, const std::string& reason) {
  if (met) return;
  r.note = r.note.empty() ? reason : r.note + "; " + reason;
  if (r.verdict == Verdict::Violated) r.verdict = Verdict::Inconclusive;
}

}  // namespace

double horizon_term(const WarpedProduct& m) {
  if (!m.has_horizon()) return 0.0;
  return std::pow(m.lam(0.0), m.n() + 1) * m.fiber_volume();
}

FunctionalReport minkowski_residual(const Surface& s, double eps, double abs_tol) {
  const Estimate e = two_level(s, [eps](const Surface& lvl) {
    return integral(lvl, [eps](const GeometrySample& g, std::size_t) {
      return potential_term(g, eps) - g.u * (g.p1() - eps);
    });
  });
  return make_report("minkowski_residual", e.value, e.error, Claim::Identity, inputs_of(s, eps, 1), abs_tol);
}

FunctionalReport shifted_minkowski_residual(const Surface& s, double eps, int m, double abs_tol) {
  require_space_form(s, "shifted Minkowski formula");
  require_order(s, m);
  const Estimate e = two_level(s, [eps, m](const Surface& lvl) {
    return integral(lvl, [eps, m](const GeometrySample& g, std::size_t) {
      return potential_term(g, eps) * shifted_p(g, eps, m - 1) - g.u * shifted_p(g, eps, m);
    });
  });
  return make_report("shifted_minkowski_residual", e.value, e.error, Claim::Identity, inputs_of(s, eps, m), abs_tol);
}

FunctionalReport divergence_residual(const Surface& s, double abs_tol) {
  const Estimate e = two_level(s, [](const Surface& lvl) {
    const Level flux = integral(lvl, [](const GeometrySample& g, std::size_t) { return g.u; });
    return difference(flux, enclosed_term(lvl));
  });
  FunctionalReport r =
      make_report("divergence_residual", e.value, e.error, Claim::Identity, inputs_of(s, std::nullopt, std::nullopt),
                  abs_tol);
  r.details = {{"horizon_term", horizon_term(s.manifold())}};
  return r;
}

FunctionalReport hk_assumption_check(const Surface& s, double eps) {
  auto minima = [eps](const Surface& lvl) {
    double prod = std::numeric_limits<double>::infinity();
    double pot = prod;
    double shift = prod;
    double exp_margin = prod;
    for (const auto& g : lvl.samples()) {
      const double a = potential_term(g, eps);
      const double b = g.p1() - eps;
      prod = std::min(prod, a * b);
      pot = std::min(pot, a);
      shift = std::min(shift, b);
      exp_margin = std::min(exp_margin, a - std::exp(-g.r));
    }
    return std::array<double, 4>{prod, pot, shift, exp_margin};
  };
  const auto fine = minima(s);
  double err = 0.0;
  if (s.coarse()) err = std::abs(fine[0] - minima(*s.coarse())[0]);
  FunctionalReport r = make_report("hk_assumption", fine[0], err, Claim::Positive, inputs_of(s, eps, std::nullopt));
  r.details = {{"min_potential_term", fine[1]}, {"min_p1_shift", fine[2]}};
  if (s.manifold().kind() == ManifoldKind::Hyperbolic && std::abs(eps) <= 1.0) {
    r.details.emplace_back("exp_bound_margin", fine[3]);
  }
  return r;
}

FunctionalReport hk_deficit(const Surface& s, double eps, double abs_tol) {
  const std::vector<std::size_t> bad = gate_failures(s, eps);
  if (!bad.empty()) {
    throw Error(ErrorCode::AssumptionViolated,
                "(lambda' - eps u)(p_1 - eps) > 0 fails at " + std::to_string(bad.size()) + " node(s)", bad);
  }
  const Estimate e = two_level(s, [eps](const Surface& lvl) {
    const Level lhs = integral(lvl, [eps](const GeometrySample& g, std::size_t) {
      return potential_term(g, eps) / (g.p1() - eps);
    });
    return difference(lhs, enclosed_term(lvl));
  });
  FunctionalReport r = make_report("hk_deficit", e.value, e.error, Claim::Nonnegative, inputs_of(s, eps, std::nullopt),
                                   abs_tol);
  r.details = {{"horizon_term", horizon_term(s.manifold())},
               {"umbilic_spread", umbilic_spread(s)},
               {"static_convex_margin", static_margin_or_nan(s)}};
  if (s.manifold().has_horizon()) r.note = "horizon: volume side includes lambda(0)^{n+1}|S^n|";
  const double margin = r.detail("static_convex_margin");
  const bool hyperbolic_unit = s.manifold().kind() == ManifoldKind::Hyperbolic && std::abs(eps) == 1.0;
  apply_hypotheses(r, margin >= 0.0 || eps == 0.0 || hyperbolic_unit, "hypotheses not met: surface not static-convex");
  return r;
}

FunctionalReport classical_hk_deficit(const Surface& s, double abs_tol) {
  auto level = [](const Surface& lvl) {
    std::vector<double> terms(lvl.size());
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < lvl.size(); ++i) {
      const GeometrySample& g = lvl[i];
      terms[i] = g.warp.lam1 * g.area_weight / g.kappa.mean();
      abs_sum += std::abs(terms[i]);
    }
    const double vol = weighted_volume_value(lvl);
    const double n1 = static_cast<double>(lvl.n() + 1);
    const double rhs = n1 * vol + horizon_term(lvl.manifold());
    return Level{pairwise_sum(terms) - rhs, abs_sum + std::abs(rhs)};
  };
  const Estimate e = two_level(s, level);
  return make_report("classical_hk_deficit", e.value, e.error, Claim::Nonnegative, inputs_of(s, 0.0, std::nullopt),
                     abs_tol);
}

FunctionalReport minkowski_second_deficit(const Surface& s, double abs_tol) {
  require_positive_potential(s);
  const Estimate e = two_level(s, [](const Surface& lvl) {
    const Level potential = integral(lvl, [](const GeometrySample& g, std::size_t) { return g.warp.lam1; });
    const Level weighted_mean = integral(lvl, [](const GeometrySample& g, std::size_t) { return g.warp.lam1 * g.p1(); });
    return difference(product(potential, potential), product(enclosed_term(lvl), weighted_mean));
  });
  FunctionalReport r = make_report("minkowski_second_deficit", e.value, e.error, Claim::Nonnegative,
                                   inputs_of(s, std::nullopt, std::nullopt), abs_tol);
  r.details = {{"static_convex_margin", static_convex_margin(s)}, {"horizon_term", horizon_term(s.manifold())}};
  apply_hypotheses(r, r.detail("static_convex_margin") >= 0.0, "hypotheses not met: surface not static-convex");
  return r;
}

FunctionalReport equiv_ineq_residual(const Surface& s, double eps, double abs_tol) {
  require_positive_potential(s);
  const Estimate e = two_level(s, [eps](const Surface& lvl) {
    const Level a = integral(lvl, [eps](const GeometrySample& g, std::size_t) { return potential_term(g, eps); });
    const Level flux = integral(lvl, [](const GeometrySample& g, std::size_t) { return g.u; });
    const Level weighted = integral(lvl, [eps](const GeometrySample& g, std::size_t) {
      return potential_term(g, eps) * (g.p1() - eps);
    });
    return difference(product(a, a), product(flux, weighted));
  });
  FunctionalReport r = make_report("equiv_ineq_residual", e.value, e.error, Claim::Nonnegative,
                                   inputs_of(s, eps, std::nullopt), abs_tol);
  r.details = {{"static_convex_margin", static_convex_margin(s)}};
  apply_hypotheses(r, r.detail("static_convex_margin") >= 0.0, "hypotheses not met: surface not static-convex");
  return r;
}

FunctionalReport cauchy_schwarz_gap(const Surface& s, double eps, double abs_tol) {
  const std::vector<std::size_t> bad = gate_failures(s, eps);
  if (!bad.empty()) {
    throw Error(ErrorCode::AssumptionViolated,
                "(lambda' - eps u)(p_1 - eps) > 0 fails at " + std::to_string(bad.size()) + " node(s)", bad);
  }
  const Estimate e = two_level(s, [eps](const Surface& lvl) {
    const Level a = integral(lvl, [eps](const GeometrySample& g, std::size_t) { return potential_term(g, eps); });
    const Level up = integral(lvl, [eps](const GeometrySample& g, std::size_t) {
      return potential_term(g, eps) * (g.p1() - eps);
    });
    const Level down = integral(lvl, [eps](const GeometrySample& g, std::size_t) {
      return potential_term(g, eps) / (g.p1() - eps);
    });
    return difference(product(up, down), product(a, a));
  });
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& g : s.samples()) {
    lo = std::min(lo, g.p1());
    hi = std::max(hi, g.p1());
  }
  FunctionalReport r = make_report("cauchy_schwarz_gap", e.value, e.error, Claim::Nonnegative,
                                   inputs_of(s, eps, std::nullopt), abs_tol);
  r.details = {{"p1_spread", hi - lo}};
  return r;
}

double ChiSpec::operator()(double x1, double x2) const {
  switch (family) {
    case Family::Constant: return a;
    case Family::Affine: return a + b1 * x1 + b2 * x2;
    case Family::Power: return a * std::pow(x1, q);
  }
  return a;
}

double ChiSpec::d1(double x1, double) const {
  switch (family) {
    case Family::Constant: return 0.0;
    case Family::Affine: return b1;
    case Family::Power: return a * q * std::pow(x1, q - 1.0);
  }
  return 0.0;
}

double ChiSpec::d2(double, double) const { return family == Family::Affine ? b2 : 0.0; }

ChiSpec ChiSpec::scaled(double factor) const {
  ChiSpec out = *this;
  out.a *= factor;
  out.b1 *= factor;
  out.b2 *= factor;
  return out;
}

namespace {

std::pair<double, double> chi_arguments(CurvatureVariant variant, double eps, const WarpSample& w, double u) {
  if (variant == CurvatureVariant::Thm12) return {w.lam1, -w.lam1 - u};
  return {w.phi, eps * w.phi - u};
}

void check_variant(const WarpedProduct& m, CurvatureVariant variant) {
  if (!m.is_space_form()) throw Error(ErrorCode::UnsupportedManifold, "curvature equations need a space form");
  if (variant == CurvatureVariant::Thm12 && m.kind() != ManifoldKind::Hyperbolic) {
    throw Error(ErrorCode::UnsupportedManifold, "the thm12 variant lives in hyperbolic space");
  }
}

}  // namespace

FunctionalReport curvature_equation_residual(const Surface& s, double eps, int k, const ChiSpec& chi,
                                             CurvatureVariant variant, Claim claim, double abs_tol) {
  check_variant(s.manifold(), variant);
  require_order(s, k);
  const double shift = variant == CurvatureVariant::Thm12 ? -1.0 : eps;
  struct Extremes {
    double residual = 0.0;
    double max_d1 = -std::numeric_limits<double>::infinity();
    double min_d2 = std::numeric_limits<double>::infinity();
  };
  auto scan = [&](const Surface& lvl) {
    Extremes x;
    for (const auto& g : lvl.samples()) {
      const auto [x1, x2] = chi_arguments(variant, shift, g.warp, g.u);
      x.residual = std::max(x.residual, std::abs(shifted_p(g, shift, k) - chi(x1, x2)));
      x.max_d1 = std::max(x.max_d1, chi.d1(x1, x2));
      x.min_d2 = std::min(x.min_d2, chi.d2(x1, x2));
    }
    return x;
  };
  const Extremes fine = scan(s);
  double err = 0.0;
  if (s.coarse()) err = std::abs(fine.residual - scan(*s.coarse()).residual);
  FunctionalReport r = make_report(variant == CurvatureVariant::Thm12 ? "curvature_eq_thm12" : "curvature_eq_thm14",
                                   fine.residual, err, claim, inputs_of(s, shift, k), abs_tol);
  r.details = {{"max_d1_chi", fine.max_d1}, {"min_d2_chi", fine.min_d2}, {"umbilic_spread", umbilic_spread(s)}};
  return r;
}

double solve_sphere_radius(const WarpedProduct& m, double eps, int k, const ChiSpec& chi, CurvatureVariant variant,
                           double r_lo, double r_hi) {
  check_variant(m, variant);
  const double shift = variant == CurvatureVariant::Thm12 ? -1.0 : eps;
  auto f = [&](double r) {
    const WarpSample w = m.eval(r);
    const auto [x1, x2] = chi_arguments(variant, shift, w, w.lam);
    return std::pow(w.lam1 / w.lam - shift, k) - chi(x1, x2);
  };
  const double f_lo = f(r_lo);
  const double f_hi = f(r_hi);
  if (f_lo == 0.0) return r_lo;
  if (f_hi == 0.0) return r_hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "no sign change of the sphere equation on the radius bracket");
  }
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, r_lo, r_hi, f_lo, f_hi,
                                                        boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (a + b);
}

FunctionalReport integration_by_parts_residual(const Surface& s, double eps, int k, double abs_tol) {
  require_space_form(s, "integration by parts");
  require_order(s, k);
  const double kk = static_cast<double>(k);
  const Estimate e = two_level(s, [eps, k, kk](const Surface& lvl) {
    const std::vector<double> contraction = linearized_contraction(lvl, eps, k);
    return integral(lvl, [&](const GeometrySample& g, std::size_t i) {
      const double lhs = kk * (potential_term(g, eps) * shifted_p(g, eps, k - 1) - g.u * shifted_p(g, eps, k));
      return lhs - contraction[i];
    });
  });
  FunctionalReport r = make_report("integration_by_parts_residual", e.value, e.error, Claim::Identity,
                                   inputs_of(s, eps, k), abs_tol);
  return r;
}

FunctionalReport divergence_free_residual(const Surface& s, double eps, int k, double abs_tol) {
  require_space_form(s, "divergence-free check");
  require_order(s, k);
  const Estimate e = two_level(s, [eps, k](const Surface& lvl) {
    const std::vector<double> contraction = linearized_contraction(lvl, eps, k);
    return integral(lvl, [&](const GeometrySample&, std::size_t i) { return contraction[i]; });
  });
  return make_report("divergence_free_residual", e.value, e.error, Claim::Identity, inputs_of(s, eps, k), abs_tol);
}

}  // namespace warpcheck

#include "warpcheck/warped.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "warpcheck/error.hpp"
#include "warpcheck/numerics.hpp"

namespace warpcheck {

namespace {

void check_dimension(int n) {
  if (n != 1 && n != 2) {
    throw Error(ErrorCode::ConfigInvalid, "fiber dimension must be 1 or 2, got " + std::to_string(n));
  }
}

}  // namespace

WarpFunctions named_warp(const std::string& name) {
  const double inf = std::numeric_limits<double>::infinity();
  if (name == "cosh") {
    return {name, [](double r) { return std::cosh(r); }, [](double r) { return std::sinh(r); },
            [](double r) { return std::cosh(r); }, [](double r) { return std::sinh(r); }, inf};
  }
  if (name == "sinh") {
    return {name, [](double r) { return std::sinh(r); }, [](double r) { return std::cosh(r); },
            [](double r) { return std::sinh(r); }, [](double r) { return std::cosh(r); }, inf};
  }
  if (name == "linear") {
    return {name, [](double r) { return r; }, [](double) { return 1.0; }, [](double) { return 0.0; },
            [](double) { return 0.0; }, inf};
  }
  if (name == "sin") {
    return {name, [](double r) { return std::sin(r); }, [](double r) { return std::cos(r); },
            [](double r) { return -std::sin(r); }, [](double r) { return -std::cos(r); }, kPi / 2.0};
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown warp '" + name + "'");
}

WarpedProduct::WarpedProduct(ManifoldKind kind, int n, WarpFunctions warp, double rho_const,
                             double fiber_ricci_const, bool has_horizon, int curvature)
    : kind_(kind),
      n_(n),
      warp_(std::move(warp)),
      rho_const_(rho_const),
      fiber_ricci_const_(fiber_ricci_const),
      has_horizon_(has_horizon),
      curvature_(curvature) {
  check_dimension(n);
}

double WarpedProduct::fiber_volume() const noexcept { return n_ == 1 ? 2.0 * kPi : 4.0 * kPi; }

std::string WarpedProduct::tag() const {
  std::ostringstream os;
  switch (kind_) {
    case ManifoldKind::Hyperbolic: os << "H^" << n_ + 1; break;
    case ManifoldKind::Euclidean: os << "R^" << n_ + 1; break;
    case ManifoldKind::Hemisphere: os << "S^" << n_ + 1 << "_+"; break;
    case ManifoldKind::Custom: os << "custom:" << warp_.name << "/n=" << n_; break;
  }
  return os.str();
}

double WarpedProduct::primitive(double r) const {
  switch (kind_) {
    case ManifoldKind::Hyperbolic: return std::cosh(r);
    case ManifoldKind::Euclidean: return 0.5 * r * r;
    case ManifoldKind::Hemisphere: return -std::cos(r);
    case ManifoldKind::Custom: return integrate(warp_.lam, 0.0, r, 1e-14);
  }
  return 0.0;
}

WarpSample WarpedProduct::eval_unchecked(double r, bool with_phi) const {
  WarpSample s;
  s.r = r;
  s.lam = warp_.lam(r);
  s.lam1 = warp_.lam1(r);
  s.lam2 = warp_.lam2(r);
  s.lam3 = warp_.lam3(r);
  s.phi = with_phi ? primitive(r) : 0.0;
  return s;
}

WarpSample WarpedProduct::eval(double r) const {
  if (!in_domain(r)) {
    std::ostringstream os;
    os << "radius " << r << " outside [0, " << warp_.r_max << ")";
    throw Error(ErrorCode::OutOfDomain, os.str());
  }
  return eval_unchecked(r);
}

WarpedProduct WarpedProduct::with_rho(double rho) const {
  WarpedProduct copy = *this;
  copy.rho_const_ = rho;
  return copy;
}

WarpedProduct make_space_form(int c, int n) {
  check_dimension(n);
  const double ricci = static_cast<double>(n - 1);
  switch (c) {
    case -1: return {ManifoldKind::Hyperbolic, n, named_warp("sinh"), 1.0, ricci, false, -1};
    case 0: return {ManifoldKind::Euclidean, n, named_warp("linear"), 1.0, ricci, false, 0};
    case 1: return {ManifoldKind::Hemisphere, n, named_warp("sin"), 1.0, ricci, false, 1};
    default: break;
  }
  throw Error(ErrorCode::BadCurvature, "space-form curvature must be -1, 0 or 1, got " + std::to_string(c));
}

WarpedProduct make_horizon_example(int n) {
  check_dimension(n);
  return {ManifoldKind::Custom, n, named_warp("cosh"), 1.0, static_cast<double>(n - 1), true};
}

WarpedProduct make_custom(const std::string& warp_name, int n, double rho) {
  check_dimension(n);
  WarpFunctions warp = named_warp(warp_name);
  WarpedProduct probe(ManifoldKind::Custom, n, warp, rho, static_cast<double>(n - 1), false);
  const bool horizon = warp.lam(0.0) > 0.0 && check_condition_H(probe);
  return {ManifoldKind::Custom, n, std::move(warp), rho, static_cast<double>(n - 1), horizon};
}

WarpSample eval_warp(const WarpedProduct& m, double r) { return m.eval(r); }

bool check_condition_H(const WarpedProduct& m, double r_scan) {
  const auto& w = m.warp();
  if (std::abs(w.lam1(0.0)) > 1e-14) return false;
  if (!(w.lam2(0.0) > 0.0)) return false;
  const double upper = std::min(m.r_max(), r_scan);
  constexpr int kSamples = 10000;
  for (int i = 1; i <= kSamples; ++i) {
    // Interior points only: upper is excluded.
    const double r = upper * static_cast<double>(i) / static_cast<double>(kSamples + 1);
    if (!(w.lam1(r) > 0.0)) return false;
  }
  return true;
}

double substatic_scalar(const WarpedProduct& m, double r) {
  const WarpSample s = m.eval(r);
  const double n = static_cast<double>(m.n());
  const double rho = m.rho_const();
  const double bracket = s.lam * s.lam * s.lam3 + (n - 2.0) * s.lam * s.lam1 * s.lam2 +
                         (n - 1.0) * s.lam1 * (rho - s.lam1 * s.lam1);
  if (m.n() == 1) return bracket;
  return s.lam1 * (m.fiber_ricci_const() - (n - 1.0) * rho) + bracket;
}

SubstaticScan substatic_scan(const WarpedProduct& m, double r_lo, double r_hi, int samples) {
  if (samples < 2) throw Error(ErrorCode::ConfigInvalid, "substatic_scan needs at least 2 samples");
  if (!m.in_domain(r_lo) || !m.in_domain(r_hi) || r_hi < r_lo) {
    throw Error(ErrorCode::OutOfDomain, "scan window outside the radial domain");
  }
  SubstaticScan scan;
  scan.r.resize(static_cast<std::size_t>(samples));
  scan.scalar.resize(static_cast<std::size_t>(samples));
  double lowest = std::numeric_limits<double>::infinity();
  double arg_lowest = r_lo;
  for (int i = 0; i < samples; ++i) {
    const double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double value = substatic_scalar(m, r);
    scan.r[static_cast<std::size_t>(i)] = r;
    scan.scalar[static_cast<std::size_t>(i)] = value;
    if (value < lowest) {
      lowest = value;
      arg_lowest = r;
    }
  }
  scan.report = make_report("substatic_min", lowest, 0.0, Claim::Nonnegative, {std::nullopt, std::nullopt, m.tag()},
                            kSubstaticTol);
  scan.report.details = {{"r_lo", r_lo}, {"r_hi", r_hi}, {"argmin_r", arg_lowest}, {"rho", m.rho_const()}};
  if (m.n() == 1) scan.report.note = "n=1: Ricci term vacuous, bracket term only";
  return scan;
}

}  // namespace warpcheck

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "warpcheck/error.hpp"
#include "warpcheck/flow.hpp"
#include "warpcheck/functionals.hpp"
#include "warpcheck/grid.hpp"
#include "warpcheck/hypersurface.hpp"
#include "warpcheck/numerics.hpp"
#include "warpcheck/report.hpp"
#include "warpcheck/warped.hpp"

namespace warpcheck::cli {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, "config field '" + field + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const Json& require(const Json& j, const std::string& path, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) bad_field(join(path, key), "missing");
  return j.at(key);
}

double as_number(const Json& v, const std::string& field) {
  if (!v.is_number()) bad_field(field, "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) bad_field(field, "not finite");
  return x;
}

int as_int(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) bad_field(field, "expected an integer");
  return v.get<int>();
}

std::string as_string(const Json& v, const std::string& field) {
  if (!v.is_string()) bad_field(field, "expected a string");
  return v.get<std::string>();
}

double number(const Json& j, const std::string& path, const std::string& key) {
  return as_number(require(j, path, key), join(path, key));
}

double number_or(const Json& j, const std::string& path, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_number(j.at(key), join(path, key));
}

int int_or(const Json& j, const std::string& path, const std::string& key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_int(j.at(key), join(path, key));
}

std::string string_or(const Json& j, const std::string& path, const std::string& key, std::string fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_string(j.at(key), join(path, key));
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json number_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// ---------------------------------------------------------------- config

std::shared_ptr<const WarpedProduct> parse_manifold(const Json& root) {
  const Json& m = require(root, "", "manifold");
  if (!m.is_object()) bad_field("manifold", "expected an object");
  const std::string kind = as_string(require(m, "manifold", "kind"), "manifold.kind");
  const int n = as_int(require(m, "manifold", "n"), "manifold.n");
  if (n != 1 && n != 2) bad_field("manifold.n", "must be 1 or 2");
  if (kind == "space_form") {
    const int c = as_int(require(m, "manifold", "c"), "manifold.c");
    if (c < -1 || c > 1) bad_field("manifold.c", "must be -1, 0 or 1");
    auto w = make_space_form(c, n);
    if (m.contains("rho")) w = w.with_rho(number(m, "manifold", "rho"));
    return std::make_shared<const WarpedProduct>(std::move(w));
  }
  if (kind == "custom") {
    const std::string warp = as_string(require(m, "manifold", "warp"), "manifold.warp");
    if (warp != "cosh" && warp != "sinh" && warp != "linear" && warp != "sin")
      bad_field("manifold.warp", "unknown warp '" + warp + "'");
    return std::make_shared<const WarpedProduct>(make_custom(warp, n, number_or(m, "manifold", "rho", 1.0)));
  }
  bad_field("manifold.kind", "expected 'space_form' or 'custom'");
}

GridSpec parse_grid(const Json& surface, int n) {
  const Json empty = Json::object();
  const Json& g = surface.contains("grid") ? surface.at("grid") : empty;
  if (!g.is_object()) bad_field("surface.grid", "expected an object");
  GridSpec spec = n == 1 ? GridSpec::circle(int_or(g, "surface.grid", "n_theta", 512))
                         : GridSpec::sphere(int_or(g, "surface.grid", "n_mu", 32), int_or(g, "surface.grid", "n_phi", 64));
  try {
    spec.validate();
  } catch (const Error& e) {
    bad_field("surface.grid", e.what());
  }
  return spec;
}

RadialGraph parse_surface(const Json& root, std::shared_ptr<const WarpedProduct> m,
                          std::optional<double> radius_override = std::nullopt) {
  const Json& s = require(root, "", "surface");
  if (!s.is_object()) bad_field("surface", "expected an object");
  const std::string type = as_string(require(s, "surface", "type"), "surface.type");
  const GridSpec grid = parse_grid(s, m->n());
  const double radius = radius_override ? *radius_override : number(s, "surface", "radius");
  if (type == "sphere") {
    return build_sphere_graph(std::move(m), radius, number_or(s, "surface", "offset", 0.0), grid);
  }
  if (type == "perturbed") {
    std::vector<std::pair<int, double>> modes;
    if (s.contains("modes")) {
      const Json& list = s.at("modes");
      if (!list.is_array()) bad_field("surface.modes", "expected [[degree, amplitude], ...]");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string field = "surface.modes[" + std::to_string(i) + "]";
        const Json& pair = list[i];
        if (!pair.is_array() || pair.size() != 2) bad_field(field, "expected [degree, amplitude]");
        const int deg = as_int(pair[0], field + "[0]");
        if (deg < 0) bad_field(field + "[0]", "degree must be nonnegative");
        modes.emplace_back(deg, as_number(pair[1], field + "[1]"));
      }
    }
    return build_perturbed_graph(std::move(m), radius, modes, grid);
  }
  bad_field("surface.type", "expected 'sphere' or 'perturbed'");
}

std::vector<double> parse_eps_list(const Json& root, std::vector<double> fallback, bool required) {
  if (!root.contains("eps_list")) {
    if (required) bad_field("eps_list", "missing");
    return fallback;
  }
  const Json& list = root.at("eps_list");
  if (!list.is_array()) bad_field("eps_list", "expected an array of numbers");
  if (list.empty()) bad_field("eps_list", "must be nonempty");
  std::vector<double> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(as_number(list[i], "eps_list[" + std::to_string(i) + "]"));
  return out;
}

double parse_tolerance(const Json& root) {
  if (root.contains("tolerance")) {
    const Json& t = root.at("tolerance");
    if (!t.is_object()) bad_field("tolerance", "expected an object");
    if (t.contains("abs_tol")) {
      const double tol = as_number(t.at("abs_tol"), "tolerance.abs_tol");
      if (tol <= 0.0) bad_field("tolerance.abs_tol", "must be positive");
      return tol;
    }
  }
  if (const char* env = std::getenv("WARPCHECK_TOL")) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(tol > 0.0) || !std::isfinite(tol))
      throw Error(ErrorCode::ConfigInvalid, std::string("WARPCHECK_TOL: not a positive number: ") + env);
    return tol;
  }
  return kDefaultAbsTol;
}

ChiSpec parse_chi(const Json& root) {
  const Json& c = require(root, "", "chi");
  if (!c.is_object()) bad_field("chi", "expected an object");
  ChiSpec chi;
  const std::string family = as_string(require(c, "chi", "family"), "chi.family");
  if (family == "constant") {
    chi.family = ChiSpec::Family::Constant;
  } else if (family == "affine") {
    chi.family = ChiSpec::Family::Affine;
  } else if (family == "power") {
    chi.family = ChiSpec::Family::Power;
  } else {
    bad_field("chi.family", "expected 'constant', 'affine' or 'power'");
  }
  chi.a = number_or(c, "chi", "a", chi.a);
  chi.b1 = number_or(c, "chi", "b1", chi.b1);
  chi.b2 = number_or(c, "chi", "b2", chi.b2);
  chi.q = number_or(c, "chi", "q", chi.q);
  return chi;
}

int parse_k(const Json& root, int n, int fallback) {
  const int k = root.contains("k") ? as_int(root.at("k"), "k") : fallback;
  if (k < 1 || k > n) bad_field("k", "must satisfy 1 <= k <= n");
  return k;
}

// ---------------------------------------------------------------- rows

struct ErrorRow {
  std::string name;
  ErrorCode code;
  std::string message;
  std::vector<std::size_t> nodes;
  std::optional<double> eps;
};

struct Row {
  std::optional<FunctionalReport> report;
  std::optional<ErrorRow> error;
};

struct Outcome {
  std::vector<Row> rows;
  Json series = Json::object();
  Json extra = Json::object();  // task-specific payload echoed into report.json
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

void add(Outcome& out, FunctionalReport r) { out.rows.push_back({std::move(r), std::nullopt}); }

void add_error(Outcome& out, std::string name, const Error& e, std::optional<double> eps = std::nullopt) {
  out.rows.push_back({std::nullopt, ErrorRow{std::move(name), e.code(), e.what(), e.nodes(), eps}});
}

Json series_json(const std::vector<std::pair<double, double>>& xy) {
  Json arr = Json::array();
  for (const auto& [x, y] : xy) arr.push_back(Json::array({number_json(x), number_json(y)}));
  return arr;
}

// ---------------------------------------------------------------- tasks

void add_lemma23(Outcome& out, const Surface& s, double tol) {
  auto l = lemma23_residuals(s, tol);
  add(out, std::move(l.gradient_phi));
  add(out, std::move(l.hessian_phi));
  add(out, std::move(l.gradient_u));
}

std::string geometry_csv(const Surface& s) {
  std::ostringstream os;
  const int n = s.n();
  os << "index,theta,phi,r";
  for (int i = 1; i <= n; ++i) os << ",kappa_" << i;
  os << ",u,lam1,weight\n";
  const auto& nodes = s.grid().nodes();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& g = s[i];
    os << i << ',' << fmt(nodes[i].theta) << ',' << fmt(n == 2 ? nodes[i].phi : 0.0) << ',' << fmt(g.r);
    for (int a = 0; a < n; ++a) os << ',' << fmt(g.kappa[a]);
    os << ',' << fmt(g.u) << ',' << fmt(g.warp.lam1) << ',' << fmt(g.area_weight) << '\n';
  }
  return os.str();
}

Outcome task_geometry(const Json& root, double tol) {
  auto m = parse_manifold(root);
  Surface s(parse_surface(root, m));
  Outcome out;
  const ReportInputs inputs{std::nullopt, std::nullopt, m->tag()};

  add_lemma23(out, s, tol);
  add(out, divergence_residual(s, tol));

  std::vector<double> ones(s.size(), 1.0);
  const Estimate area = integrate_surface(s, ones);
  auto area_report = make_report("area", area.value, area.error, Claim::Positive, inputs, tol);
  area_report.details.emplace_back("umbilic_spread", umbilic_spread(s));
  add(out, std::move(area_report));
  const Estimate vol = weighted_volume(s);
  add(out, make_report("weighted_volume", vol.value, vol.error, Claim::Positive, inputs, tol));

  if (m->is_space_form()) {
    const auto embedded = compute_geometry_embedded(s.graph());
    double dk = 0.0;
    double du = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int a = 0; a < s.n(); ++a) dk = std::max(dk, std::abs(embedded[i].kappa[a] - s[i].kappa[a]));
      du = std::max(du, std::abs(embedded[i].u - s[i].u));
    }
    const double band = s.n() == 1 ? 1e-6 : 1e-4;
    auto r = make_report("backend_agreement", std::max(dk, du), 0.0, Claim::Identity, inputs, band);
    r.details.emplace_back("max_kappa_difference", dk);
    r.details.emplace_back("max_u_difference", du);
    r.details.emplace_back("band", band);
    add(out, std::move(r));
  }
  out.files.emplace_back("geometry.csv", geometry_csv(s));
  return out;
}

Outcome task_identities(const Json& root, double tol) {
  auto m = parse_manifold(root);
  Surface s(parse_surface(root, m));
  const auto eps_list = parse_eps_list(root, {-1.0, 0.0, 1.0}, false);
  Outcome out;
  for (double eps : eps_list) {
    add(out, minkowski_residual(s, eps, tol));
    if (!m->is_space_form()) continue;
    for (int k = 1; k <= s.n(); ++k) add(out, shifted_minkowski_residual(s, eps, k, tol));
    for (int k = 1; k <= s.n(); ++k) add(out, integration_by_parts_residual(s, eps, k, tol));
    for (int k = 1; k <= s.n(); ++k) add(out, divergence_free_residual(s, eps, k, tol));
  }
  add(out, divergence_residual(s, tol));
  add_lemma23(out, s, tol);
  return out;
}

Outcome task_hk_sweep(const Json& root, double tol) {
  auto m = parse_manifold(root);
  Surface s(parse_surface(root, m));
  const auto eps_list = parse_eps_list(root, {}, true);

  // Each entry only reads the shared surface.
  std::vector<std::optional<FunctionalReport>> results(eps_list.size());
  std::vector<std::optional<Error>> failures(eps_list.size());
  std::vector<std::exception_ptr> fatal(eps_list.size());
  parallel_for(eps_list.size(), [&](std::size_t i) {
    try {
      results[i] = hk_deficit(s, eps_list[i], tol);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::AssumptionViolated) {
        failures[i] = e;
      } else {
        fatal[i] = std::current_exception();
      }
    } catch (...) {
      fatal[i] = std::current_exception();
    }
  });
  for (const auto& f : fatal)
    if (f) std::rethrow_exception(f);

  Outcome out;
  std::vector<std::pair<double, double>> curve;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (results[i]) {
      curve.emplace_back(eps_list[i], results[i]->value);
      add(out, std::move(*results[i]));
    } else {
      add_error(out, "hk_deficit", *failures[i], eps_list[i]);
    }
  }
  out.series["deficit_vs_eps"] = series_json(curve);
  return out;
}

Outcome task_theorem_b(const Json& root, double tol) {
  auto m = parse_manifold(root);
  Surface s(parse_surface(root, m));
  const auto eps_list = parse_eps_list(root, {0.0}, false);
  Outcome out;

  std::optional<FunctionalReport> second;
  try {
    second = minkowski_second_deficit(s, tol);
    add(out, *second);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PotentialSign) throw;
    add_error(out, "minkowski_second_deficit", e);
  }
  for (double eps : eps_list) {
    auto equiv = equiv_ineq_residual(s, eps, tol);
    add(out, equiv);
    if (second) {
      constexpr double kAgreementBand = 1e-9;
      auto r = make_report("expansion_agreement", equiv.value - second->value,
                           equiv.quadrature_error + second->quadrature_error, Claim::Identity,
                           ReportInputs{eps, std::nullopt, m->tag()}, kAgreementBand);
      add(out, std::move(r));
    }
    try {
      add(out, cauchy_schwarz_gap(s, eps, tol));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AssumptionViolated) throw;
      add_error(out, "cauchy_schwarz_gap", e, eps);
    }
  }
  return out;
}

Outcome task_curvature_eq(const Json& root, double tol) {
  auto m = parse_manifold(root);
  const ChiSpec chi = parse_chi(root);
  const std::string variant_name = string_or(root, "", "variant", "thm14");
  CurvatureVariant variant;
  if (variant_name == "thm12") {
    variant = CurvatureVariant::Thm12;
  } else if (variant_name == "thm14") {
    variant = CurvatureVariant::Thm14;
  } else {
    bad_field("variant", "expected 'thm12' or 'thm14'");
  }
  const int k = parse_k(root, m->n(), 1);
  const double eps = parse_eps_list(root, {0.0}, false).front();
  const std::string expect = string_or(root, "", "expect", "solution");
  if (expect != "solution" && expect != "non_solution") bad_field("expect", "expected 'solution' or 'non_solution'");

  std::optional<double> radius;
  if (root.contains("solve_radius")) {
    const Json& sr = root.at("solve_radius");
    if (!sr.is_object()) bad_field("solve_radius", "expected an object");
    radius = solve_sphere_radius(*m, eps, k, chi, variant, number(sr, "solve_radius", "r_lo"),
                                 number(sr, "solve_radius", "r_hi"));
  }
  Surface s(parse_surface(root, m, radius));
  const Claim claim = expect == "solution" ? Claim::Identity : Claim::Positive;
  auto r = curvature_equation_residual(s, eps, k, chi, variant, claim, tol);
  if (radius) r.details.emplace_back("radius", *radius);
  Outcome out;
  add(out, std::move(r));
  return out;
}

FlowSpeed parse_speed(const Json& f) {
  FlowSpeed speed;
  const std::string kind = string_or(f, "flow", "speed", "unit_inward");
  if (kind == "unit_inward") {
    speed.kind = FlowSpeed::Kind::UnitInward;
  } else if (kind == "minus_potential") {
    speed.kind = FlowSpeed::Kind::MinusPotential;
  } else if (kind == "custom_shifted") {
    speed.kind = FlowSpeed::Kind::CustomShifted;
    speed.eps = number_or(f, "flow", "eps", 0.0);
    if (f.contains("xi")) {
      const Json& xi = f.at("xi");
      if (!xi.is_object()) bad_field("flow.xi", "expected an object");
      speed.xi_a = number_or(xi, "flow.xi", "a", speed.xi_a);
      speed.xi_b = number_or(xi, "flow.xi", "b", speed.xi_b);
    }
  } else {
    bad_field("flow.speed", "expected 'unit_inward', 'minus_potential' or 'custom_shifted'");
  }
  return speed;
}

std::string trace_csv(const FlowTrace& trace) {
  std::ostringstream os;
  os << "t,Q,area,weighted_volume,int_u,min_p1,max_abs_kappa,min_rho\n";
  for (const auto& rec : trace.series) {
    os << fmt(rec.t) << ',' << fmt(rec.q) << ',' << fmt(rec.area) << ',' << fmt(rec.weighted_volume) << ','
       << fmt(rec.int_u) << ',' << fmt(rec.min_p1) << ',' << fmt(rec.max_abs_kappa) << ',' << fmt(rec.min_rho)
       << '\n';
  }
  return os.str();
}

Outcome task_flow(const Json& root, double tol) {
  auto m = parse_manifold(root);
  const RadialGraph initial = parse_surface(root, m);
  const Json& f = require(root, "", "flow");
  if (!f.is_object()) bad_field("flow", "expected an object");
  const FlowSpeed speed = parse_speed(f);
  const double t_end = number(f, "flow", "t_end");
  const double dt = number(f, "flow", "dt");
  if (!(t_end > 0.0)) bad_field("flow.t_end", "must be positive");
  if (!(dt > 0.0)) bad_field("flow.dt", "must be positive");
  EvolveOptions options;
  options.snapshot_every = int_or(f, "flow", "snapshot_every", 0);
  if (options.snapshot_every < 0) bad_field("flow.snapshot_every", "must be nonnegative");
  const double probe = number_or(f, "flow", "verify_probe", 0.0);
  if (probe < 0.0) bad_field("flow.verify_probe", "must be nonnegative");
  const double verify_tol = number_or(f, "flow", "verify_tol", 1e-6);
  if (!(verify_tol > 0.0)) bad_field("flow.verify_tol", "must be positive");

  Outcome out;
  const ReportInputs inputs{std::nullopt, std::nullopt, m->tag()};

  if (probe > 0.0) {
    if (!m->is_space_form()) bad_field("flow.verify_probe", "evolution checks need a space form");
    const FlowState state = make_flow_state(initial);
    for (auto& r : verify_evolution(state, speed, probe, speed.eps, verify_tol)) add(out, std::move(r));
  }

  const FlowTrace trace = evolve(initial, speed, t_end, dt, options);
  const auto& first = trace.series.front();
  const int n = m->n();
  const double horizon = horizon_term(*m);

  double div_max = 0.0;
  for (const auto& rec : trace.series)
    div_max = std::max(div_max, std::abs(rec.int_u - (n + 1) * rec.weighted_volume - horizon));
  auto div = make_report("flow_divergence_identity", div_max, 0.0, Claim::Identity, inputs, tol);
  div.note = "max over the trace";
  add(out, std::move(div));

  if (speed.kind == FlowSpeed::Kind::UnitInward) {
    double p1_margin = std::numeric_limits<double>::infinity();
    double area_margin = std::numeric_limits<double>::infinity();
    for (const auto& rec : trace.series) {
      p1_margin = std::min(p1_margin, rec.min_p1 + 1.0);
      if (rec.t > 0.0) area_margin = std::min(area_margin, std::exp(n * rec.t) * first.area - rec.area);
    }
    if (m->kind() == ManifoldKind::Hyperbolic) {
      add(out, make_report("flow_p1_bound", p1_margin, 0.0, Claim::Positive, inputs, tol));
      if (trace.series.size() > 1)
        add(out, make_report("flow_area_bound", area_margin, 0.0, Claim::Positive, inputs, tol));
      double q_margin = std::numeric_limits<double>::infinity();
      for (const auto& rec : trace.series) q_margin = std::min(q_margin, first.q + trace.tol_q - rec.q);
      auto q = make_report("flow_q_monotone", q_margin, 0.0, Claim::Nonnegative, inputs, tol);
      q.details.emplace_back("tol_q", trace.tol_q);
      q.details.emplace_back("q_initial", first.q);
      q.details.emplace_back("q_final", trace.series.back().q);
      add(out, std::move(q));
    }
  }

  std::vector<std::pair<double, double>> q_curve;
  for (const auto& rec : trace.series)
    if (std::isfinite(rec.q)) q_curve.emplace_back(rec.t, rec.q);
  out.series["q_vs_t"] = series_json(q_curve);

  Json summary = Json::object();
  summary["stop_reason"] = trace.stop_reason;
  summary["truncated"] = trace.truncated;
  summary["steps"] = trace.series.size() - 1;
  summary["t_final"] = trace.series.back().t;
  out.extra["flow"] = summary;
  if (options.snapshot_every > 0) {
    Json snaps = Json::array();
    for (const auto& st : trace.snapshots) {
      Json rho = Json::array();
      for (double r : st.graph().rho) rho.push_back(r);
      snaps.push_back(Json{{"t", st.t}, {"rho", rho}});
    }
    out.extra["snapshots"] = snaps;
  }
  out.files.emplace_back("trace.csv", trace_csv(trace));
  return out;
}

Outcome task_substatic(const Json& root, double /*tol*/) {
  auto m = parse_manifold(root);
  const Json& sc = require(root, "", "scan");
  if (!sc.is_object()) bad_field("scan", "expected an object");
  const int samples = int_or(sc, "scan", "samples", 301);
  if (samples < 2) bad_field("scan.samples", "must be at least 2");
  const double lo = number(sc, "scan", "r_lo");
  const double hi = number(sc, "scan", "r_hi");
  if (!(hi > lo)) bad_field("scan.r_hi", "must exceed r_lo");
  const SubstaticScan scan = substatic_scan(*m, lo, hi, samples);
  Outcome out;
  add(out, scan.report);
  std::vector<std::pair<double, double>> curve;
  for (std::size_t i = 0; i < scan.r.size(); ++i) curve.emplace_back(scan.r[i], scan.scalar[i]);
  out.series["substatic"] = series_json(curve);
  return out;
}

Outcome dispatch(const std::string& task, const Json& root, double tol) {
  if (task == "geometry") return task_geometry(root, tol);
  if (task == "identities") return task_identities(root, tol);
  if (task == "hk-sweep") return task_hk_sweep(root, tol);
  if (task == "theoremB") return task_theorem_b(root, tol);
  if (task == "curvature-eq") return task_curvature_eq(root, tol);
  if (task == "flow") return task_flow(root, tol);
  if (task == "substatic-scan") return task_substatic(root, tol);
  bad_field("task", "unknown task '" + task + "'");
}

// ---------------------------------------------------------------- output

Json report_json(const FunctionalReport& r) {
  Json j;
  j["name"] = r.name;
  j["value"] = number_json(r.value);
  j["quadrature_error"] = number_json(r.quadrature_error);
  j["claim"] = std::string(to_string(r.claim));
  j["verdict"] = std::string(to_string(r.verdict));
  Json in = Json::object();
  if (r.inputs.eps) in["eps"] = *r.inputs.eps;
  if (r.inputs.k) in["k"] = *r.inputs.k;
  in["manifold"] = r.inputs.manifold;
  j["inputs"] = in;
  Json details = Json::object();
  for (const auto& [key, value] : r.details) details[key] = number_json(value);
  j["details"] = details;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json error_json(const ErrorRow& e) {
  Json j;
  j["name"] = e.name;
  j["code"] = std::string(to_string(e.code));
  j["message"] = e.message;
  if (e.eps) j["eps"] = *e.eps;
  j["nodes"] = e.nodes;
  return j;
}

std::string summary_csv(const Outcome& out) {
  std::ostringstream os;
  os << "name,eps,k,value,error,verdict\n";
  for (const auto& row : out.rows) {
    if (row.report) {
      const auto& r = *row.report;
      os << r.name << ',' << (r.inputs.eps ? fmt(*r.inputs.eps) : "") << ','
         << (r.inputs.k ? std::to_string(*r.inputs.k) : "") << ',' << fmt(r.value) << ','
         << fmt(r.quadrature_error) << ',' << to_string(r.verdict) << '\n';
    } else {
      const auto& e = *row.error;
      os << e.name << ',' << (e.eps ? fmt(*e.eps) : "") << ",,,," << to_string(e.code) << '\n';
    }
  }
  return os.str();
}

int exit_code(const Outcome& out) {
  std::vector<Verdict> verdicts;
  bool any_error = false;
  for (const auto& row : out.rows) {
    if (row.report) verdicts.push_back(row.report->verdict);
    any_error |= row.error.has_value();
  }
  return exit_code_for(verdicts, any_error);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  os << contents;
  if (!os) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

Json read_json(const std::filesystem::path& path, ErrorCode code) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw Error(code, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int run(const Json& config, const RunOptions& options) {
  if (!config.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
  const std::string task = as_string(require(config, "", "task"), "task");
  const double tol = parse_tolerance(config);
  set_thread_count(std::max(1u, options.threads));

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + options.out_dir.string() + "': " + ec.message());

  const Outcome out = dispatch(task, config, tol);

  Json envelope;
  envelope["task"] = task;
  envelope["abs_tol"] = tol;
  envelope["config"] = config;
  Json reports = Json::array();
  Json errors = Json::array();
  for (const auto& row : out.rows) {
    if (row.report) reports.push_back(report_json(*row.report));
    if (row.error) errors.push_back(error_json(*row.error));
  }
  envelope["reports"] = reports;
  envelope["errors"] = errors;
  envelope["series"] = out.series;
  for (const auto& [key, value] : out.extra.items()) envelope[key] = value;
  const int code = exit_code(out);
  envelope["exit_code"] = code;

  write_file(options.out_dir / "report.json", envelope.dump(2) + "\n");
  write_file(options.out_dir / "summary.csv", summary_csv(out));
  for (const auto& [name, contents] : out.files) write_file(options.out_dir / name, contents);

  if (options.verbose) {
    for (const auto& row : out.rows) {
      if (row.report)
        std::cerr << row.report->name << ": " << fmt(row.report->value) << " +- " << fmt(row.report->quadrature_error)
                  << " [" << to_string(row.report->verdict) << "]\n";
      else
        std::cerr << row.error->name << ": " << to_string(row.error->code) << " " << row.error->message << '\n';
    }
  }
  return code;
}

int exit_code_for(const std::vector<Verdict>& verdicts, bool any_error) {
  if (any_error) return kErrors;
  if (std::find(verdicts.begin(), verdicts.end(), Verdict::Violated) != verdicts.end()) return kViolated;
  if (std::find(verdicts.begin(), verdicts.end(), Verdict::Inconclusive) != verdicts.end()) return kInconclusive;
  return kAllOk;
}

std::string plot_series(const Json& report, const std::string& series) {
  if (!report.is_object() || !report.contains("series") || !report.at("series").contains(series))
    throw Error(ErrorCode::Io, "report has no series '" + series + "'");
  std::ostringstream os;
  os << "series,x,y\n";
  for (const auto& point : report.at("series").at(series)) {
    if (!point.is_array() || point.size() != 2) throw Error(ErrorCode::Io, "malformed point in series '" + series + "'");
    const auto value = [](const Json& v) {
      return v.is_number() ? fmt(v.get<double>()) : std::string("nan");
    };
    os << series << ',' << value(point[0]) << ',' << value(point[1]) << '\n';
  }
  return os.str();
}

int main_entry(int argc, char** argv) {
  CLI::App app{"warpcheck: numerical checks for hypersurfaces in warped product manifolds"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  std::string out_dir = ".";
  auto* run_cmd = app.add_subcommand("run", "Run one JSON config");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--threads", options.threads, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--verbose", options.verbose, "Print each verdict to stderr");

  std::string report_path;
  std::string series;
  std::string plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "Emit a series from report.json as long-format CSV");
  plot_cmd->add_option("report", report_path, "report.json")->required();
  plot_cmd->add_option("--series", series, "q_vs_t, deficit_vs_eps or substatic")->required();
  plot_cmd->add_option("--out", plot_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kAllOk : kErrors;
  }

  try {
    if (run_cmd->parsed()) {
      options.out_dir = out_dir;
      return run(read_json(config_path, ErrorCode::ConfigInvalid), options);
    }
    const std::string csv = plot_series(read_json(report_path, ErrorCode::Io), series);
    if (plot_out.empty()) {
      std::cout << csv;
    } else {
      write_file(plot_out, csv);
    }
    return kAllOk;
  } catch (const std::exception& e) {
    std::cerr << "warpcheck: " << e.what() << '\n';
    return kErrors;
  }
}

}  // namespace warpcheck::cli

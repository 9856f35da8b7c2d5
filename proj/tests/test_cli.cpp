#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cli.hpp"
#include "json.hpp"
#include "warpcheck/error.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using warpcheck::Error;
using warpcheck::ErrorCode;

namespace {

const fs::path kConfigs = WARPCHECK_CONFIG_DIR;
const fs::path kGolden = WARPCHECK_GOLDEN_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json load(const fs::path& p) { return Json::parse(slurp(p)); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "warpcheck_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> config_names() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(kConfigs))
    if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

bool values_match(const std::string& a, const std::string& b) {
  if (a == b) return true;
  char* ea = nullptr;
  char* eb = nullptr;
  const double x = std::strtod(a.c_str(), &ea);
  const double y = std::strtod(b.c_str(), &eb);
  if (ea == a.c_str() || eb == b.c_str()) return false;
  return std::abs(x - y) <= 1e-9 * std::max(std::abs(x), std::abs(y)) + 1e-300;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

Json minimal_identities() {
  return Json::parse(R"({
    "task": "identities",
    "manifold": {"kind": "space_form", "c": -1, "n": 1},
    "surface": {"type": "sphere", "radius": 1.0, "grid": {"n_theta": 64}},
    "eps_list": [0.0]
  })");
}

}  // namespace

class ShippedConfig : public ::testing::TestWithParam<std::string> {};

TEST_P(ShippedConfig, MatchesGoldenAndIsDeterministic) {
  const std::string name = GetParam();
  const Json cfg = load(kConfigs / (name + ".json"));
  const fs::path a = scratch(name + "_a");
  const fs::path b = scratch(name + "_b");
  const int code_a = warpcheck::cli::run(cfg, {a, 1, false});
  const int code_b = warpcheck::cli::run(cfg, {b, 2, false});
  EXPECT_EQ(code_a, code_b);

  for (const auto& e : fs::directory_iterator(a)) {
    const auto file = e.path().filename();
    ASSERT_TRUE(fs::exists(b / file)) << file;
    EXPECT_EQ(slurp(a / file), slurp(b / file)) << name << "/" << file << " differs between runs";
  }

  const Json golden = load(kGolden / "exit_codes.json");
  ASSERT_TRUE(golden.contains(name)) << "no golden exit code for " << name;
  EXPECT_EQ(code_a, golden.at(name).get<int>());
  EXPECT_EQ(load(a / "report.json").at("exit_code").get<int>(), code_a);

  const auto got = csv_rows(slurp(a / "summary.csv"));
  const auto want = csv_rows(slurp(kGolden / (name + ".csv")));
  ASSERT_EQ(got.size(), want.size()) << name;
  for (std::size_t i = 0; i < got.size(); ++i) {
    ASSERT_EQ(got[i].size(), 6u) << name << " row " << i;
    ASSERT_EQ(want[i].size(), 6u) << name << " row " << i;
    EXPECT_EQ(got[i][0], want[i][0]) << name << " row " << i;
    EXPECT_EQ(got[i][1], want[i][1]) << name << " row " << i;
    EXPECT_EQ(got[i][2], want[i][2]) << name << " row " << i;
    EXPECT_EQ(got[i][5], want[i][5]) << name << " row " << i;
    for (int c : {3, 4}) EXPECT_TRUE(values_match(got[i][c], want[i][c])) << name << " row " << i << ": " << got[i][c] << " vs " << want[i][c];
  }
}

INSTANTIATE_TEST_SUITE_P(Configs, ShippedConfig, ::testing::ValuesIn(config_names()),
                         [](const auto& info) { return info.param; });

TEST(Cli, ExitCodesOfShippedConfigs) {
  const Json golden = load(kGolden / "exit_codes.json");
  int violations = 0;
  for (const auto& [name, code] : golden.items()) {
    if (code.get<int>() == 1) ++violations;
    EXPECT_TRUE(fs::exists(kConfigs / (name + ".json"))) << name;
  }
  EXPECT_EQ(violations, 1);
  EXPECT_EQ(golden.at("hk_sweep_gate_violation").get<int>(), 1);
}

TEST(Cli, ConfigErrorsNameTheField) {
  const fs::path out = scratch("bad");
  Json cfg = minimal_identities();
  cfg["surface"]["grid"]["n_theta"] = 30;
  EXPECT_EQ(code_of([&] { warpcheck::cli::run(cfg, {out, 1, false}); }), ErrorCode::ConfigInvalid);

  cfg = minimal_identities();
  cfg["manifold"]["c"] = "minus one";
  const std::string msg = message_of([&] { warpcheck::cli::run(cfg, {out, 1, false}); });
  EXPECT_NE(msg.find("CONFIG_INVALID"), std::string::npos) << msg;
  EXPECT_NE(msg.find("manifold.c"), std::string::npos) << msg;

  cfg = minimal_identities();
  cfg.erase("surface");
  EXPECT_NE(message_of([&] { warpcheck::cli::run(cfg, {out, 1, false}); }).find("surface"), std::string::npos);

  cfg = minimal_identities();
  cfg["task"] = "nonsense";
  EXPECT_EQ(code_of([&] { warpcheck::cli::run(cfg, {out, 1, false}); }), ErrorCode::ConfigInvalid);

  cfg = minimal_identities();
  cfg["manifold"]["c"] = 3;
  EXPECT_NE(message_of([&] { warpcheck::cli::run(cfg, {out, 1, false}); }).find("manifold.c"), std::string::npos);
}

TEST(Cli, ToleranceOverride) {
  const fs::path out = scratch("tol");
  Json cfg = minimal_identities();
  ::setenv("WARPCHECK_TOL", "1e-3", 1);
  warpcheck::cli::run(cfg, {out, 1, false});
  EXPECT_DOUBLE_EQ(load(out / "report.json").at("abs_tol").get<double>(), 1e-3);
  cfg["tolerance"] = {{"abs_tol", 2e-7}};
  warpcheck::cli::run(cfg, {out, 1, false});
  EXPECT_DOUBLE_EQ(load(out / "report.json").at("abs_tol").get<double>(), 2e-7);
  ::setenv("WARPCHECK_TOL", "garbage", 1);
  EXPECT_EQ(code_of([&] { warpcheck::cli::run(minimal_identities(), {out, 1, false}); }), ErrorCode::ConfigInvalid);
  ::unsetenv("WARPCHECK_TOL");
}

TEST(Cli, PlotSeries) {
  const Json report = Json::parse(R"({"series": {"q_vs_t": [[0, 1.5], [0.25, 1.0]]}})");
  EXPECT_EQ(warpcheck::cli::plot_series(report, "q_vs_t"), "series,x,y\nq_vs_t,0,1.5\nq_vs_t,0.25,1\n");
  EXPECT_EQ(code_of([&] { warpcheck::cli::plot_series(report, "missing"); }), ErrorCode::Io);
}

TEST(Cli, BinaryExitCodes) {
  const std::string exe = WARPCHECK_EXE;
  const fs::path out = scratch("binary");
  const auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("run " + (kConfigs / "substatic_cosh.json").string() + " --out " + out.string()), 0);
  EXPECT_EQ(status("run " + (kConfigs / "hk_sweep_gate_violation.json").string() + " --out " + out.string()), 1);
  EXPECT_EQ(status("run " + (out / "does_not_exist.json").string() + " --out " + out.string()), 1);
  EXPECT_EQ(status("plot " + (out / "report.json").string() + " --series deficit_vs_eps"), 0);
  EXPECT_NE(status("frobnicate"), 0);
}

TEST(Cli, ExitCodePrecedence) {
  using warpcheck::Verdict;
  using namespace warpcheck::cli;
  EXPECT_EQ(exit_code_for({}, false), kAllOk);
  EXPECT_EQ(exit_code_for({Verdict::IdentityOk, Verdict::InequalityOk}, false), kAllOk);
  EXPECT_EQ(exit_code_for({Verdict::Inconclusive, Verdict::IdentityOk}, false), kInconclusive);
  EXPECT_EQ(exit_code_for({Verdict::Inconclusive, Verdict::Violated}, false), kViolated);
  EXPECT_EQ(exit_code_for({Verdict::Violated}, true), kErrors);
}

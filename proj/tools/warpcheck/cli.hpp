#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpcheck/report.hpp"

namespace warpcheck::cli {

enum ExitCode : int { kAllOk = 0, kErrors = 1, kViolated = 2, kInconclusive = 3 };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  bool verbose = false;
};

/// Errors dominate, then violations, then inconclusive verdicts.
int exit_code_for(const std::vector<Verdict>& verdicts, bool any_error);

/// Runs one config and writes report.json and summary.csv (plus geometry.csv
/// or trace.csv for the geometry and flow tasks). Returns the exit code.
int run(const nlohmann::ordered_json& config, const RunOptions& options);

/// Long-format (series, x, y) rows from a report envelope.
std::string plot_series(const nlohmann::ordered_json& report, const std::string& series);

/// Full command line: `run <config> [--out DIR] [--threads N] [--verbose]` or
/// `plot <report> --series NAME [--out FILE]`.
int main_entry(int argc, char** argv);

}  // namespace warpcheck::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eoscsp/model.hpp"
#include "eoscsp/runtime.hpp"
#include "eoscsp/sdcop.hpp"

namespace eoscsp {

/// Algorithm names accepted by run_solver, in reporting order.
const std::vector<std::string>& algorithm_names();
bool is_algorithm(const std::string& name);

class UnknownAlgorithm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunReport {
  std::string algorithm;
  std::uint64_t seed = 0;
  int scale = 0;
  std::size_t n_observations = 0;
  double reward = 0.0;
  double wall_time = 0.0;
  std::size_t msg_count = 0;
  std::size_t msg_bytes = 0;
  bool valid = false;
};

struct RunOptions {
  double budget_seconds = 10.0;  // exact only
  SdcopOptions sdcop;
};

struct RunResult {
  Schedule schedule;
  Verdict verdict;
  RunReport report;
  std::uint64_t trace_hash = 0;
  std::string trace_jsonl;
};

/// Solves, times and validates. Errors from the solver propagate.
RunResult run_solver(const Instance& p, const std::string& algorithm, const RunOptions& options = {});

/// CSV with a row_kind column: "detail" rows carry one run, "summary" rows
/// the mean over valid runs of an (algorithm, scale) cell with 5th and 95th
/// percentiles. Summary rows leave seed empty.
const std::vector<std::string>& report_columns();
std::string report_csv_header();
std::string report_csv_row(const RunReport& r);

struct Summary {
  std::string algorithm;
  int scale = 0;
  std::size_t runs = 0;  // valid runs
  bool all_valid = true;
  double n_observations = 0;
  double reward = 0, reward_p05 = 0, reward_p95 = 0;
  double wall_time = 0, wall_time_p05 = 0, wall_time_p95 = 0;
  double msg_count = 0, msg_count_p05 = 0, msg_count_p95 = 0;
  double msg_bytes = 0, msg_bytes_p05 = 0, msg_bytes_p95 = 0;
};

/// Linear interpolation between closest ranks; q in [0, 1].
double percentile(std::vector<double> values, double q);

std::vector<Summary> summarize(const std::vector<RunReport>& rows);
std::string summary_csv_row(const Summary& s);

/// Detail rows of a previously written CSV; summary rows are skipped.
std::vector<RunReport> parse_report_csv(const std::string& text);

struct BenchConfig {
  std::string preset = "conflicting";
  std::vector<int> scales{0};
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::string> algorithms;
  RunOptions run;
  unsigned threads = 0;  // 0: EOSCSP_THREADS or the hardware count
};

struct BenchResult {
  std::vector<RunReport> rows;  // (algorithm, seed, scale) order
  std::vector<Summary> summaries;
  std::size_t executed = 0;  // cells actually run (the rest were resumed)
};

/// Runs every (algorithm, seed, scale) cell not already present in
/// `existing`. Failures become rows with valid = false.
BenchResult run_bench(const BenchConfig& config, const std::vector<RunReport>& existing = {});

/// run_bench resuming from and rewriting the CSV at path.
BenchResult run_bench_file(const BenchConfig& config, const std::filesystem::path& path);

std::string bench_csv(const BenchResult& result);

}  // namespace eoscsp

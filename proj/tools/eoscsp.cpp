#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "eoscsp/bench.hpp"
#include "eoscsp/exact.hpp"
#include "eoscsp/instance_gen.hpp"
#include "eoscsp/io.hpp"

using namespace eoscsp;

namespace {

enum Exit { kOk = 0, kInvalidInput = 2, kSolverFailure = 3, kValidationFailure = 4 };

struct Failure {
  int code;
  std::string message;
};

/// "3", "0-4" and "1,5-7" style lists.
template <typename T>
std::vector<T> expand(const std::vector<std::string>& items) {
  std::vector<T> out;
  for (const auto& item : items) {
    const auto dash = item.find('-', 1);
    try {
      if (dash == std::string::npos) {
        out.push_back(static_cast<T>(std::stoll(item)));
        continue;
      }
      const long long lo = std::stoll(item.substr(0, dash));
      const long long hi = std::stoll(item.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument("empty range");
      for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw Failure{kInvalidInput, "bad list item '" + item + "'"};
    }
  }
  return out;
}

template <typename F>
auto guarded(int code, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Failure&) {
    throw;
  } catch (const std::exception& e) {
    throw Failure{code, e.what()};
  }
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satellite constellation scheduling with exclusive orbit portions"};
  app.require_subcommand(1);

  std::string preset_name = "conflicting", out, algo, trace, validate_only, dump_dir, instance_path;
  int scale = 0;
  std::uint64_t seed = 0;
  double budget = 10.0;
  std::vector<std::string> scales{"0"}, seeds{"0"}, algos{"greedy", "psi", "ssi", "cbba", "s_dcop"};
  unsigned threads = 0;

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--preset", preset_name, "conflicting or realistic")->capture_default_str();
  gen->add_option("--scale", scale, "Preset scale")->capture_default_str();
  gen->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--out", out, "Instance file (stdout when omitted)");

  auto* solve = app.add_subcommand("solve", "Solve an instance and print a report row");
  solve->add_option("instance", instance_path, "Instance JSON")->required();
  solve->add_option("--algo", algo, "greedy, exact, psi, ssi, cbba or s_dcop");
  solve->add_option("--budget", budget, "Time budget in seconds for exact")->capture_default_str();
  solve->add_option("--seed", seed, "Seed recorded in the report")->capture_default_str();
  solve->add_option("--scale", scale, "Scale recorded in the report")->capture_default_str();
  solve->add_option("--out", out, "Schedule file");
  solve->add_option("--trace", trace, "Message trace as JSON lines");
  solve->add_option("--validate-only", validate_only, "Only validate this schedule file against the instance");
  solve->add_option("--dump-dcop", dump_dir, "Directory receiving each s_dcop subproblem");

  auto* lp = app.add_subcommand("export-lp", "Write the MILP model in LP format");
  lp->add_option("instance", instance_path, "Instance JSON")->required();
  lp->add_option("--out", out, "LP file (stdout when omitted)");

  auto* bench = app.add_subcommand("bench", "Sweep algorithms, seeds and scales into a CSV");
  bench->add_option("--preset", preset_name, "conflicting or realistic")->capture_default_str();
  bench->add_option("--scale", scales, "Scales, e.g. 0-4 or 0,9")->delimiter(',');
  bench->add_option("--seed", seeds, "Seeds, e.g. 0-9")->delimiter(',');
  bench->add_option("--algo", algos, "Algorithms")->delimiter(',');
  bench->add_option("--budget", budget, "Time budget in seconds for exact")->capture_default_str();
  bench->add_option("--threads", threads, "Worker threads (0: EOSCSP_THREADS or all cores)");
  bench->add_option("--out", out, "CSV file; existing rows are reused")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*gen) {
      const Instance p = guarded(kInvalidInput, [&] {
        GenerationParams g = preset(preset_name, scale);
        g.seed = seed;
        return generate(g);
      });
      guarded(kInvalidInput, [&] { emit(out, dump(to_json(p))); });
      return kOk;
    }

    if (*lp) {
      const Instance p = guarded(kInvalidInput, [&] { return load_instance(instance_path); });
      const std::string text = guarded(kSolverFailure, [&] { return to_lp(build_milp(p)); });
      guarded(kInvalidInput, [&] { emit(out, text); });
      return kOk;
    }

    if (*solve) {
      const Instance p = guarded(kInvalidInput, [&] { return load_instance(instance_path); });
      if (!validate_only.empty()) {
        const Schedule m = guarded(kInvalidInput, [&] { return load_schedule(validate_only); });
        const Verdict v = validate_schedule(p, m);
        if (!v.ok()) {
          std::cerr << v.summary() << "\n";
          return kValidationFailure;
        }
        std::cout << "valid: " << m.size() << " observations, reward " << total_reward(p, m) << "\n";
        return kOk;
      }
      if (!is_algorithm(algo)) throw Failure{kInvalidInput, "unknown algorithm '" + algo + "'"};
      if (algo == "exact" && budget <= 0) throw Failure{kInvalidInput, "budget must be positive"};

      RunOptions opt;
      opt.budget_seconds = budget;
      if (!dump_dir.empty()) {
        guarded(kInvalidInput, [&] { std::filesystem::create_directories(dump_dir); });
        opt.sdcop.on_dcop = [&](const Id& request, const DcopProblem& d) {
          write_text(std::filesystem::path(dump_dir) / (request + ".json"), dump(d.to_json()));
        };
      }
      RunResult r = guarded(kSolverFailure, [&] { return run_solver(p, algo, opt); });
      r.report.seed = seed;
      r.report.scale = scale;
      if (!trace.empty()) guarded(kInvalidInput, [&] { write_text(trace, r.trace_jsonl); });
      if (!r.verdict.ok()) {
        std::cerr << "refusing to emit an invalid schedule\n" << r.verdict.summary() << "\n";
        return kValidationFailure;
      }
      if (!out.empty()) guarded(kInvalidInput, [&] { write_text(out, dump(to_json(r.schedule))); });
      std::cout << report_csv_header() << "\n" << report_csv_row(r.report) << "\n";
      return kOk;
    }

    if (*bench) {
      BenchConfig c;
      c.preset = preset_name;
      c.scales = expand<int>(scales);
      c.seeds = expand<std::uint64_t>(seeds);
      c.algorithms = algos;
      c.run.budget_seconds = budget;
      c.threads = threads;
      const BenchResult r = guarded(kInvalidInput, [&] { return run_bench_file(c, out); });
      std::size_t invalid = 0;
      for (const auto& row : r.rows) invalid += row.valid ? 0 : 1;
      std::cerr << r.executed << " runs executed, " << r.rows.size() - r.executed << " reused, " << invalid
                << " invalid\n";
      std::cout << report_csv_header() << "\n";
      for (const auto& s : r.summaries) std::cout << summary_csv_row(s) << "\n";
      return kOk;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kOk;
}

#include "eoscsp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "eoscsp/auction.hpp"
#include "eoscsp/exact.hpp"
#include "eoscsp/greedy.hpp"
#include "eoscsp/instance_gen.hpp"
#include "eoscsp/io.hpp"

namespace eoscsp {

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double to_double(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

using Key = std::tuple<std::string, std::uint64_t, int>;

Key key_of(const RunReport& r) { return {r.algorithm, r.seed, r.scale}; }

unsigned worker_count(unsigned requested, std::size_t cells) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EOSCSP_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, cells)));
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"greedy", "exact", "psi", "ssi", "cbba", "s_dcop"};
  return names;
}

bool is_algorithm(const std::string& name) {
  const auto& n = algorithm_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

RunResult run_solver(const Instance& p, const std::string& algorithm, const RunOptions& options) {
  if (!is_algorithm(algorithm)) throw UnknownAlgorithm("unknown algorithm '" + algorithm + "'");
  RunResult out;
  MessageBus bus;
  const auto t0 = std::chrono::steady_clock::now();
  if (algorithm == "greedy") out.schedule = solve_greedy(p);
  else if (algorithm == "exact") out.schedule = solve_exact(p, ExactOptions{options.budget_seconds, 0.0});
  else if (algorithm == "psi") out.schedule = solve_psi(p, &bus);
  else if (algorithm == "ssi") out.schedule = solve_ssi(p, &bus);
  else if (algorithm == "cbba") out.schedule = solve_cbba(p, &bus);
  else out.schedule = solve_sdcop(p, &bus, options.sdcop);
  const auto t1 = std::chrono::steady_clock::now();

  out.verdict = validate_schedule(p, out.schedule);
  RunReport& r = out.report;
  r.algorithm = algorithm;
  r.n_observations = p.observations().size();
  r.reward = total_reward(p, out.schedule);
  r.wall_time = std::chrono::duration<double>(t1 - t0).count();
  r.msg_count = bus.metrics().message_count;
  r.msg_bytes = bus.metrics().message_bytes;
  r.valid = out.verdict.ok();
  out.trace_hash = bus.trace_hash();
  out.trace_jsonl = bus.trace_jsonl();
  return out;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{
      "row_kind",     "algorithm",     "scale",         "seed",          "n_observations", "reward",
      "wall_time",    "msg_count",     "msg_bytes",     "valid",         "runs",           "reward_p05",
      "reward_p95",   "wall_time_p05", "wall_time_p95", "msg_count_p05", "msg_count_p95",  "msg_bytes_p05",
      "msg_bytes_p95"};
  return cols;
}

std::string report_csv_header() {
  std::string out;
  for (const auto& c : report_columns()) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string report_csv_row(const RunReport& r) {
  std::ostringstream s;
  s << "detail," << r.algorithm << ',' << r.scale << ',' << r.seed << ',' << r.n_observations << ',' << num(r.reward)
    << ',' << num(r.wall_time) << ',' << r.msg_count << ',' << r.msg_bytes << ',' << (r.valid ? "true" : "false")
    << ",,,,,,,,,";
  return s.str();
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<Summary> summarize(const std::vector<RunReport>& rows) {
  std::map<std::pair<std::string, int>, std::vector<const RunReport*>> cells;
  std::vector<std::pair<std::string, int>> order;
  for (const auto& r : rows) {
    auto k = std::make_pair(r.algorithm, r.scale);
    if (!cells.count(k)) order.push_back(k);
    cells[k].push_back(&r);
  }
  std::vector<Summary> out;
  for (const auto& k : order) {
    Summary s;
    s.algorithm = k.first;
    s.scale = k.second;
    std::vector<double> obs, reward, time, count, bytes;
    for (const RunReport* r : cells[k]) {
      s.all_valid = s.all_valid && r->valid;
      if (!r->valid) continue;
      obs.push_back(static_cast<double>(r->n_observations));
      reward.push_back(r->reward);
      time.push_back(r->wall_time);
      count.push_back(static_cast<double>(r->msg_count));
      bytes.push_back(static_cast<double>(r->msg_bytes));
    }
    s.runs = reward.size();
    auto mean = [](const std::vector<double>& v) {
      double t = 0;
      for (double x : v) t += x;
      return v.empty() ? 0.0 : t / static_cast<double>(v.size());
    };
    s.n_observations = mean(obs);
    s.reward = mean(reward);
    s.reward_p05 = percentile(reward, 0.05);
    s.reward_p95 = percentile(reward, 0.95);
    s.wall_time = mean(time);
    s.wall_time_p05 = percentile(time, 0.05);
    s.wall_time_p95 = percentile(time, 0.95);
    s.msg_count = mean(count);
    s.msg_count_p05 = percentile(count, 0.05);
    s.msg_count_p95 = percentile(count, 0.95);
    s.msg_bytes = mean(bytes);
    s.msg_bytes_p05 = percentile(bytes, 0.05);
    s.msg_bytes_p95 = percentile(bytes, 0.95);
    out.push_back(s);
  }
  return out;
}

std::string summary_csv_row(const Summary& s) {
  std::ostringstream o;
  o << "summary," << s.algorithm << ',' << s.scale << ",," << num(s.n_observations) << ',' << num(s.reward) << ','
    << num(s.wall_time) << ',' << num(s.msg_count) << ',' << num(s.msg_bytes) << ','
    << (s.all_valid ? "true" : "false") << ',' << s.runs << ',' << num(s.reward_p05) << ',' << num(s.reward_p95)
    << ',' << num(s.wall_time_p05) << ',' << num(s.wall_time_p95) << ',' << num(s.msg_count_p05) << ','
    << num(s.msg_count_p95) << ',' << num(s.msg_bytes_p05) << ',' << num(s.msg_bytes_p95);
  return o.str();
}

std::vector<RunReport> parse_report_csv(const std::string& text) {
  std::vector<RunReport> rows;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != report_csv_header()) throw std::invalid_argument("unexpected CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != report_columns().size()) throw std::invalid_argument("bad CSV row: " + line);
    if (f[0] == "summary") continue;
    if (f[0] != "detail") throw std::invalid_argument("bad row_kind: " + f[0]);
    RunReport r;
    r.algorithm = f[1];
    r.scale = std::stoi(f[2]);
    r.seed = std::stoull(f[3]);
    r.n_observations = std::stoull(f[4]);
    r.reward = to_double(f[5]);
    r.wall_time = to_double(f[6]);
    r.msg_count = std::stoull(f[7]);
    r.msg_bytes = std::stoull(f[8]);
    r.valid = f[9] == "true";
    rows.push_back(r);
  }
  return rows;
}

BenchResult run_bench(const BenchConfig& config, const std::vector<RunReport>& existing) {
  for (const auto& a : config.algorithms)
    if (!is_algorithm(a)) throw UnknownAlgorithm("unknown algorithm '" + a + "'");
  for (int scale : config.scales) preset(config.preset, scale).check();

  std::map<Key, RunReport> done;
  for (const auto& r : existing) done[key_of(r)] = r;

  std::vector<Key> cells;
  for (const auto& a : config.algorithms)
    for (auto seed : config.seeds)
      for (int scale : config.scales) cells.emplace_back(a, seed, scale);

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!done.count(cells[i])) todo.push_back(i);

  std::vector<RunReport> fresh(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < todo.size(); k = next++) {
      const auto& [algo, seed, scale] = cells[todo[k]];
      RunReport& r = fresh[todo[k]];
      r.algorithm = algo;
      r.seed = seed;
      r.scale = scale;
      GenerationParams g = preset(config.preset, scale);
      g.seed = seed;
      try {
        const Instance p = generate(g);
        r.n_observations = p.observations().size();
        r = run_solver(p, algo, config.run).report;
        r.seed = seed;
        r.scale = scale;
      } catch (const std::exception&) {
        r.valid = false;
      }
    }
  };
  const unsigned n = worker_count(config.threads, todo.size());
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  BenchResult out;
  out.executed = todo.size();
  std::set<Key> listed;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto it = done.find(cells[i]);
    out.rows.push_back(it == done.end() ? fresh[i] : it->second);
    listed.insert(cells[i]);
  }
  // Rows from earlier sweeps outside this grid are kept after the grid.
  for (const auto& [k, r] : done)
    if (!listed.count(k)) out.rows.push_back(r);
  out.summaries = summarize(out.rows);
  return out;
}

BenchResult run_bench_file(const BenchConfig& config, const std::filesystem::path& path) {
  std::vector<RunReport> existing;
  if (std::filesystem::exists(path)) existing = parse_report_csv(read_text(path));
  BenchResult r = run_bench(config, existing);
  write_text(path, bench_csv(r));
  return r;
}

std::string bench_csv(const BenchResult& result) {
  std::string out = report_csv_header() + "\n";
  for (const auto& r : result.rows) out += report_csv_row(r) + "\n";
  for (const auto& s : result.summaries) out += summary_csv_row(s) + "\n";
  return out;
}

}  // namespace eoscsp

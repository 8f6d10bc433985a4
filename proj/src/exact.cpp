#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "eoscsp/exact.hpp"
#include "eoscsp/greedy.hpp"

namespace eoscsp {

double priority_objective(const Instance& p, const Schedule& m, double boost) {
  double sum = 0.0;
  for (const auto& [oid, t] : m.entries) {
    const Observation& o = p.observation(oid);
    sum += o.reward + (p.user(o.owner).has_exclusives() ? boost : 0.0);
  }
  return sum;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxPerSatellite = 58;

struct Item {
  const Observation* obs = nullptr;
  std::vector<TimeWindow> starts;  // admissible start intervals, ascending
  bool fixed = false;
  double fixed_start = 0.0;
};

double earliest_start(const Item& it, double ready) {
  for (const auto& w : it.starts) {
    const double s = std::max(ready, w.start);
    if (s <= w.end + kTimeEps) return s;
  }
  return kInf;
}

// Earliest-finish dynamic programme over subsets of one satellite's items.
class SatelliteSequencer {
 public:
  SatelliteSequencer(const Satellite& s, std::vector<Item> items) : sat_(&s), items_(std::move(items)) {
    if (items_.size() > kMaxPerSatellite) {
      throw ModelError("exact search supports at most " + std::to_string(kMaxPerSatellite) +
                       " observations per satellite");
    }
  }

  const std::vector<Item>& items() const { return items_; }
  int capacity() const { return sat_->capacity; }

  bool feasible(std::uint64_t mask) {
    if (mask == 0) return true;
    auto it = feasible_.find(mask);
    if (it != feasible_.end()) return it->second;
    bool ok = false;
    for (std::uint64_t rest = mask; rest && !ok; rest &= rest - 1) {
      ok = eft(mask, std::countr_zero(rest)).first < kInf;
    }
    feasible_.emplace(mask, ok);
    return ok;
  }

  /// Sequence and start times realising the subset.
  std::vector<std::pair<std::size_t, double>> realise(std::uint64_t mask) {
    std::vector<std::size_t> order;
    int last = -1;
    double best = kInf;
    for (std::uint64_t rest = mask; rest; rest &= rest - 1) {
      const int i = std::countr_zero(rest);
      if (eft(mask, i).first < best) {
        best = eft(mask, i).first;
        last = i;
      }
    }
    if (last < 0) throw std::logic_error("realise called on an infeasible subset");
    std::uint64_t cur = mask;
    while (last >= 0) {
      order.push_back(static_cast<std::size_t>(last));
      const int prev = eft(cur, last).second;
      cur &= ~(std::uint64_t{1} << last);
      last = prev;
    }
    std::reverse(order.begin(), order.end());
    std::vector<std::pair<std::size_t, double>> out;
    double ready = -kInf;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const Item& it = items_[order[k]];
      const double start = earliest_start(it, ready);
      out.emplace_back(order[k], start);
      if (k + 1 < order.size()) {
        ready = start + it.obs->duration + sat_->transition(it.obs->id, items_[order[k + 1]].obs->id);
      }
    }
    return out;
  }

 private:
  // (earliest finish of a sequence of `mask` ending with `last`, predecessor)
  std::pair<double, int> eft(std::uint64_t mask, int last) {
    const std::uint64_t key = (mask << 6) | static_cast<std::uint64_t>(last);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const Item& cur = items_[static_cast<std::size_t>(last)];
    const std::uint64_t rest = mask & ~(std::uint64_t{1} << last);
    std::pair<double, int> best{kInf, -1};
    if (rest == 0) {
      const double s = earliest_start(cur, -kInf);
      if (s < kInf) best = {s + cur.obs->duration, -1};
    } else {
      for (std::uint64_t r = rest; r; r &= r - 1) {
        const int prev = std::countr_zero(r);
        const double f = eft(rest, prev).first;
        if (f == kInf) continue;
        const double ready = f + sat_->transition(items_[static_cast<std::size_t>(prev)].obs->id, cur.obs->id);
        const double s = earliest_start(cur, ready);
        if (s < kInf && s + cur.obs->duration < best.first) best = {s + cur.obs->duration, prev};
      }
    }
    memo_.emplace(key, best);
    return best;
  }

  const Satellite* sat_;
  std::vector<Item> items_;
  std::unordered_map<std::uint64_t, std::pair<double, int>> memo_;
  std::unordered_map<std::uint64_t, bool> feasible_;
};

struct Option {
  std::size_t sat = 0;
  std::uint64_t bit = 0;
};

struct RequestNode {
  const Request* request = nullptr;
  double value = 0.0;
  std::vector<Option> options;
};

class Search {
 public:
  Search(const Instance& p, const ExactOptions& options)
      : p_(p), boost_(options.priority_boost > 0 ? options.priority_boost : default_priority_boost(p)),
        deadline_(std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(options.budget_seconds))) {
    std::map<Id, std::vector<Item>> per_sat;
    for (const auto& [oid, t] : p.preallocated().entries) {
      const Observation& o = p.observation(oid);
      per_sat[o.satellite].push_back({&o, {{t, t}}, true, t});
    }
    std::map<Id, std::size_t> sat_index;
    for (std::size_t i = 0; i < p.satellites().size(); ++i) sat_index[p.satellites()[i].id] = i;

    // Candidate items, grouped per request.
    std::vector<std::vector<std::pair<Id, std::size_t>>> slots;
    for (const Request* r : p.open_requests()) {
      RequestNode node;
      node.request = r;
      node.value = r->reward + (p.user(r->owner).has_exclusives() ? boost_ : 0.0);
      std::vector<std::pair<Id, std::size_t>> mine;
      for (const auto& oid : r->opportunities) {
        const Observation& o = p.observation(oid);
        Item it{&o, {}, false, 0.0};
        for (const auto& [sat, w] : domains(p, o, DomainRule{})) it.starts.push_back({w.start, w.end - o.duration});
        if (it.starts.empty()) continue;
        auto& bucket = per_sat[o.satellite];
        mine.emplace_back(o.satellite, bucket.size());
        bucket.push_back(std::move(it));
      }
      if (mine.empty() || node.value <= 0) continue;
      slots.push_back(std::move(mine));
      nodes_.push_back(std::move(node));
    }
    for (const auto& s : p.satellites()) {
      sequencers_.emplace_back(s, std::move(per_sat[s.id]));
      std::uint64_t fixed = 0;
      for (std::size_t i = 0; i < sequencers_.back().items().size(); ++i)
        if (sequencers_.back().items()[i].fixed) fixed |= std::uint64_t{1} << i;
      masks_.push_back(fixed);
    }
    for (std::size_t k = 0; k < nodes_.size(); ++k)
      for (const auto& [sat, local] : slots[k]) nodes_[k].options.push_back({sat_index.at(sat), std::uint64_t{1} << local});

    std::vector<std::size_t> order(nodes_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (nodes_[a].value != nodes_[b].value) return nodes_[a].value > nodes_[b].value;
      return nodes_[a].request->id < nodes_[b].request->id;
    });
    std::vector<RequestNode> sorted;
    for (std::size_t i : order) sorted.push_back(std::move(nodes_[i]));
    nodes_ = std::move(sorted);
    suffix_.assign(nodes_.size() + 1, 0.0);
    for (std::size_t k = nodes_.size(); k-- > 0;) suffix_[k] = suffix_[k + 1] + nodes_[k].value;
    for (const auto& [oid, t] : p.preallocated().entries) {
      const Observation& o = p.observation(oid);
      fixed_value_ += o.reward + (p.user(o.owner).has_exclusives() ? boost_ : 0.0);
    }
  }

  Schedule run(ExactStats* stats) {
    for (std::size_t i = 0; i < sequencers_.size(); ++i) {
      if (!sequencers_[i].feasible(masks_[i])) throw ModelError("preallocated entries are not schedulable");
    }
    best_masks_ = masks_;
    best_value_ = fixed_value_;
    dfs(0, fixed_value_);
    Schedule m = materialise(best_masks_);
    if (stats) {
      stats->nodes = nodes_visited_;
      stats->objective = best_value_;
    }
    return m;
  }

 private:
  void dfs(std::size_t k, double value) {
    if (++nodes_visited_ % 1024 == 0 && std::chrono::steady_clock::now() > deadline_) {
      throw BudgetExhausted("exact search budget exhausted after " + std::to_string(nodes_visited_) + " nodes",
                            materialise(best_masks_));
    }
    if (value > best_value_) {
      best_value_ = value;
      best_masks_ = masks_;
    }
    if (k == nodes_.size() || value + suffix_[k] <= best_value_) return;
    const RequestNode& node = nodes_[k];
    for (const Option& opt : node.options) {
      SatelliteSequencer& seq = sequencers_[opt.sat];
      const std::uint64_t next = masks_[opt.sat] | opt.bit;
      if (std::popcount(next) > seq.capacity() || !seq.feasible(next)) continue;
      const std::uint64_t saved = masks_[opt.sat];
      masks_[opt.sat] = next;
      dfs(k + 1, value + node.value);
      masks_[opt.sat] = saved;
      if (value + suffix_[k] <= best_value_) return;
    }
    dfs(k + 1, value);
  }

  Schedule materialise(const std::vector<std::uint64_t>& masks) {
    Schedule m = p_.preallocated();
    for (std::size_t i = 0; i < sequencers_.size(); ++i) {
      if (masks[i] == 0) continue;
      for (const auto& [local, start] : sequencers_[i].realise(masks[i])) {
        const Item& it = sequencers_[i].items()[local];
        if (!it.fixed) m.entries[it.obs->id] = start;
      }
    }
    record_grants(p_, m);
    return m;
  }

  const Instance& p_;
  double boost_;
  std::chrono::steady_clock::time_point deadline_;
  std::vector<RequestNode> nodes_;
  std::vector<double> suffix_;
  std::vector<SatelliteSequencer> sequencers_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::uint64_t> best_masks_;
  double best_value_ = 0.0;
  double fixed_value_ = 0.0;
  std::size_t nodes_visited_ = 0;
};

}  // namespace

Schedule solve_exact(const Instance& p, const ExactOptions& options, ExactStats* stats) {
  if (!(options.budget_seconds > 0)) throw std::invalid_argument("budget must be positive");
  Search search(p, options);
  return search.run(stats);
}

}  // namespace eoscsp

#pragma once

// Exhaustive reference for the exact solver: every choice of at most one
// opportunity per request, every ordering per satellite, earliest starts.

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "eoscsp/model.hpp"

namespace oracle {

using namespace eoscsp;

struct Best {
  double objective = -1;
  double reward = 0;
  std::size_t exclusive_count = 0;
};

// Intervals where o may start: own exclusives for exclusive owners, the
// whole window for the central planner.
inline std::vector<std::pair<double, double>> start_ranges(const Instance& p, const Observation& o) {
  std::vector<std::pair<double, double>> out;
  const User& u = p.user(o.owner);
  if (!u.has_exclusives()) {
    out.emplace_back(o.window.start, o.window.end - o.duration);
    return out;
  }
  for (const auto& e : u.exclusives) {
    if (e.satellite != o.satellite) continue;
    const double lo = std::max(e.window.start, o.window.start);
    const double hi = std::min(e.window.end, o.window.end) - o.duration;
    if (hi >= lo - 1e-9) out.emplace_back(lo, hi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool sequence_fits(const Instance& p, const Satellite& s, const std::vector<const Observation*>& seq) {
  double ready = -std::numeric_limits<double>::infinity();
  const Observation* prev = nullptr;
  for (const Observation* o : seq) {
    if (prev) ready += s.transition(prev->id, o->id);
    bool placed = false;
    for (const auto& [lo, hi] : start_ranges(p, *o)) {
      const double t = std::max(ready, lo);
      if (t <= hi + 1e-9) {
        ready = t + o->duration;
        placed = true;
        break;
      }
    }
    if (!placed) return false;
    prev = o;
  }
  return true;
}

inline bool satellite_fits(const Instance& p, const Satellite& s, std::vector<const Observation*> chosen) {
  if (static_cast<int>(chosen.size()) > s.capacity) return false;
  std::sort(chosen.begin(), chosen.end());
  do {
    if (sequence_fits(p, s, chosen)) return true;
  } while (std::next_permutation(chosen.begin(), chosen.end()));
  return false;
}

inline Best enumerate(const Instance& p, double boost) {
  const auto& reqs = p.requests();
  std::vector<std::size_t> pick(reqs.size(), 0);  // 0 = skip, k = opportunity k-1
  Best best;
  while (true) {
    std::map<Id, std::vector<const Observation*>> per_sat;
    double reward = 0, objective = 0;
    std::size_t exclusive = 0;
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      if (pick[i] == 0) continue;
      const Observation& o = p.observation(reqs[i].opportunities[pick[i] - 1]);
      per_sat[o.satellite].push_back(&o);
      reward += o.reward;
      const bool ex = p.user(o.owner).has_exclusives();
      objective += o.reward + (ex ? boost : 0.0);
      exclusive += ex ? 1 : 0;
    }
    if (objective > best.objective) {
      bool ok = true;
      for (const auto& [sid, chosen] : per_sat) ok = ok && satellite_fits(p, p.satellite(sid), chosen);
      if (ok) best = {objective, reward, exclusive};
    }
    std::size_t i = 0;
    for (; i < reqs.size(); ++i) {
      if (++pick[i] <= reqs[i].opportunities.size()) break;
      pick[i] = 0;
    }
    if (i == reqs.size()) break;
  }
  return best;
}

}  // namespace oracle

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "eoscsp/instance_gen.hpp"
#include "eoscsp/model.hpp"

namespace fixtures {

using namespace eoscsp;

inline Satellite sat(const std::string& id, int capacity, double tau = 1.0, TimeWindow horizon = {0, 100}) {
  Satellite s;
  s.id = id;
  s.horizon = horizon;
  s.capacity = capacity;
  s.transition.default_time = tau;
  return s;
}

inline Observation obs(const std::string& id, const std::string& request, const std::string& owner,
                       const std::string& satellite, TimeWindow window, double duration, double reward,
                       int priority) {
  Observation o;
  o.id = id;
  o.window = window;
  o.duration = duration;
  o.request = request;
  o.reward = reward;
  o.satellite = satellite;
  o.owner = owner;
  o.priority = priority;
  return o;
}

/// Builds requests from the observation list (window = hull, reward and
/// duration copied from the first opportunity).
inline std::vector<Request> requests_for(const std::vector<Observation>& observations) {
  std::vector<Request> out;
  for (const auto& o : observations) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Request& r) { return r.id == o.request; });
    if (it == out.end()) {
      Request r;
      r.id = o.request;
      r.window = o.window;
      r.duration = o.duration;
      r.reward = o.reward;
      r.owner = o.owner;
      out.push_back(r);
      it = out.end() - 1;
    }
    it->window.start = std::min(it->window.start, o.window.start);
    it->window.end = std::max(it->window.end, o.window.end);
    it->opportunities.push_back(o.id);
  }
  return out;
}

inline Instance build(std::vector<Satellite> sats, std::vector<User> users, std::vector<Observation> observations,
                      Schedule preallocated = {}) {
  auto reqs = requests_for(observations);
  return Instance(std::move(sats), std::move(users), std::move(reqs), std::move(observations),
                  std::move(preallocated));
}

/// One satellite, one central request.
inline Instance single() {
  return build({sat("s_0", 1)}, {{"u_0", {}, 2}}, {obs("o_0_0_0", "r_0_0", "u_0", "s_0", {0, 10}, 2, 3, 2)});
}

/// Three satellites, two exclusive users and the central planner; all five
/// requests can be fulfilled with one central observation hosted inside
/// u_1's exclusive on s_0.
inline Instance constellation(int capacity = 4) {
  std::vector<Satellite> sats{sat("s_0", capacity), sat("s_1", capacity), sat("s_2", capacity)};
  std::vector<User> users{
      {"u_0", {}, 2},
      {"u_1", {{"s_0", {10, 30}}, {"s_1", {50, 70}}}, 1},
      {"u_2", {{"s_0", {60, 80}}, {"s_2", {20, 40}}}, 1},
  };
  std::vector<Observation> o{
      obs("o_1_0_0", "r_1_0", "u_1", "s_0", {12, 25}, 5, 30, 1),
      obs("o_1_0_1", "r_1_0", "u_1", "s_1", {52, 65}, 5, 30, 1),
      obs("o_2_0_0", "r_2_0", "u_2", "s_0", {62, 75}, 5, 20, 1),
      obs("o_2_0_1", "r_2_0", "u_2", "s_2", {22, 35}, 5, 20, 1),
      obs("o_2_1_0", "r_2_1", "u_2", "s_2", {28, 40}, 5, 40, 1),
      obs("o_2_1_1", "r_2_1", "u_2", "s_0", {65, 80}, 5, 40, 1),
      obs("o_0_0_0", "r_0_0", "u_0", "s_0", {14, 28}, 5, 3, 2),
      obs("o_0_0_1", "r_0_0", "u_0", "s_1", {55, 68}, 5, 3, 2),
      obs("o_0_1_0", "r_0_1", "u_0", "s_1", {0, 20}, 5, 2, 2),
      obs("o_0_1_1", "r_0_1", "u_0", "s_2", {70, 90}, 5, 2, 2),
  };
  return build(std::move(sats), std::move(users), std::move(o));
}

/// Small generated instance; max_obs 8 keeps at most 4 requests of 2
/// opportunities, max_obs 12 at most 6.
inline Instance tiny(std::uint64_t seed, int max_obs = 8, bool pair_transitions = false) {
  GenerationParams g;
  g.seed = seed;
  g.satellite_count = 2;
  g.satellite_capacity = 2 + static_cast<int>(seed % 3);
  g.horizon = {0, 60};
  g.exclusive_user_count = 2;
  g.exclusives_per_user = 1;
  g.exclusive_duration = {12, 22};
  g.requests_per_exclusive_user = {0, max_obs >= 12 ? 2 : 1};
  g.central_request_count = {1, 2};
  g.opportunities_per_request = 2;
  g.observation_duration = 5;
  g.observation_window_duration = {6, 16};
  g.exclusive_reward = {10, 20, 30};
  g.central_reward = {1, 5};
  Instance p = generate(g);
  if (!pair_transitions) return p;
  std::mt19937_64 rng(seed * 7919 + 1);
  std::vector<Satellite> sats = p.satellites();
  for (auto& s : sats) {
    for (const auto& a : p.observations())
      for (const auto& b : p.observations())
        if (a.id != b.id && a.satellite == s.id && b.satellite == s.id && rng() % 3 == 0)
          s.transition.overrides[{a.id, b.id}] = static_cast<double>(rng() % 4);
  }
  return Instance(sats, p.users(), p.requests(), p.observations());
}

}  // namespace fixtures

#include "eoscsp/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace eoscsp {

namespace {

// mt19937_64 output is fully specified by the standard; the std::
// distributions are not, so draws are derived from raw output here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return std::min(hi, lo + static_cast<int>(std::floor(unit() * span)));
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_int(0, static_cast<int>(n) - 1)); }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
void check_range(const Range<T>& r, const char* what) {
  if (r.lo > r.hi) throw GenerationError(std::string("empty range for ") + what);
}

struct PlacedExclusive {
  Id owner;
  std::size_t satellite;
  TimeWindow window;
};

}  // namespace

void GenerationParams::check() const {
  check_range(requests_per_exclusive_user, "requests_per_exclusive_user");
  check_range(exclusive_duration, "exclusive_duration");
  check_range(central_request_count, "central_request_count");
  check_range(observation_window_duration, "observation_window_duration");
  check_range(central_reward, "central_reward");
  if (satellite_count <= 0) throw GenerationError("satellite_count must be positive");
  if (satellite_capacity < 0) throw GenerationError("satellite_capacity must be non-negative");
  if (exclusive_user_count < 0 || exclusives_per_user < 0) throw GenerationError("negative counts");
  if (exclusive_user_count > 0 && exclusives_per_user == 0) {
    throw GenerationError("exclusive users need at least one exclusive window");
  }
  if (requests_per_exclusive_user.lo < 0 || central_request_count.lo < 0) throw GenerationError("negative request counts");
  if (opportunities_per_request <= 0) throw GenerationError("opportunities_per_request must be positive");
  if (!(observation_duration > 0)) throw GenerationError("observation_duration must be positive");
  if (!(exclusive_duration.lo > 0)) throw GenerationError("exclusive_duration must be positive");
  if (observation_window_duration.lo < observation_duration) {
    throw GenerationError("observation windows shorter than the observation duration");
  }
  if (exclusive_user_count > 0 && exclusive_duration.lo < observation_duration) {
    throw GenerationError("exclusive windows shorter than the observation duration");
  }
  if (exclusive_reward.empty()) throw GenerationError("exclusive_reward set is empty");
  if (transition_time < 0) throw GenerationError("transition_time must be non-negative");
  if (horizon.length() < std::max(exclusive_duration.hi, observation_window_duration.hi)) {
    throw GenerationError("horizon too short");
  }
  if (windows_only_inside_exclusives && exclusive_user_count == 0 && central_request_count.hi > 0) {
    throw GenerationError("windows_only_inside_exclusives requires exclusive users");
  }
  if (max_retries <= 0) throw GenerationError("max_retries must be positive");
}

GenerationParams conflicting_preset(int scale) {
  if (scale < 0 || scale > kConflictingMaxScale) {
    throw GenerationError("conflicting scale must be in [0, " + std::to_string(kConflictingMaxScale) + "]");
  }
  GenerationParams p;
  const int per_user = 2 + scale;
  p.requests_per_exclusive_user = {per_user, per_user};
  p.central_request_count = {p.exclusive_user_count * per_user, p.exclusive_user_count * per_user};
  return p;
}

GenerationParams realistic_preset(int scale) {
  if (scale < 0 || scale > kRealisticMaxScale) {
    throw GenerationError("realistic scale must be in [0, " + std::to_string(kRealisticMaxScale) + "]");
  }
  GenerationParams p;
  p.satellite_count = 8;
  p.satellite_capacity = 500;
  p.horizon = {0.0, 21600.0};
  p.exclusive_user_count = 5;
  const int per_user = 20 + static_cast<int>(std::lround(80.0 * scale / kRealisticMaxScale));
  const int central = 25 * (scale + 1);
  p.requests_per_exclusive_user = {per_user, per_user};
  p.exclusives_per_user = 10;
  p.exclusive_duration = {300.0, 600.0};
  p.central_request_count = {central, central};
  p.opportunities_per_request = 5;
  p.observation_duration = 20.0;
  p.observation_window_duration = {40.0, 60.0};
  p.windows_only_inside_exclusives = true;
  return p;
}

GenerationParams preset(const std::string& name, int scale) {
  if (name == "conflicting") return conflicting_preset(scale);
  if (name == "realistic") return realistic_preset(scale);
  throw GenerationError("unknown preset '" + name + "' (expected conflicting or realistic)");
}

Instance generate(const GenerationParams& params) {
  params.check();
  Rng rng(params.seed);

  std::vector<Satellite> sats;
  for (int i = 0; i < params.satellite_count; ++i) {
    Satellite s;
    s.id = "s_" + std::to_string(i);
    s.horizon = params.horizon;
    s.capacity = params.satellite_capacity;
    s.transition.default_time = params.transition_time;
    sats.push_back(std::move(s));
  }

  // Exclusives: random positions, pairwise separated by at least the
  // transition time on each satellite.
  std::vector<User> users;
  std::vector<PlacedExclusive> placed;
  std::vector<std::vector<TimeWindow>> by_sat(sats.size());
  const double gap = params.transition_time;
  for (int u = 1; u <= params.exclusive_user_count; ++u) {
    User user;
    user.id = "u_" + std::to_string(u);
    user.priority = 1;
    for (int k = 0; k < params.exclusives_per_user; ++k) {
      bool ok = false;
      for (int attempt = 0; attempt < params.max_retries && !ok; ++attempt) {
        const std::size_t s = rng.index(sats.size());
        const double len = rng.uniform(params.exclusive_duration.lo, params.exclusive_duration.hi);
        const double start = rng.uniform(params.horizon.start, params.horizon.end - len);
        const TimeWindow w{start, start + len};
        ok = std::none_of(by_sat[s].begin(), by_sat[s].end(), [&](const TimeWindow& other) {
          return w.start < other.end + gap && other.start < w.end + gap;
        });
        if (ok) {
          by_sat[s].push_back(w);
          user.exclusives.push_back({sats[s].id, w});
          placed.push_back({user.id, s, w});
        }
      }
      if (!ok) {
        throw GenerationError("could not place exclusive " + std::to_string(k) + " of " + user.id +
                              " after " + std::to_string(params.max_retries) + " retries");
      }
    }
    users.push_back(std::move(user));
  }
  users.push_back(User{"u_0", {}, 2});

  std::vector<Request> requests;
  std::vector<Observation> observations;

  auto make_request = [&](const Id& owner, int index, double reward, int priority,
                          auto&& draw_window) {
    Request r;
    r.id = "r_" + owner.substr(2) + "_" + std::to_string(index);
    r.duration = params.observation_duration;
    r.reward = reward;
    r.owner = owner;
    r.position = {rng.uniform(-90.0, 90.0), rng.uniform(-180.0, 180.0), 0.0};
    double lo = params.horizon.end, hi = params.horizon.start;
    for (int k = 0; k < params.opportunities_per_request; ++k) {
      auto [sat, window] = draw_window();
      Observation o;
      o.id = "o_" + owner.substr(2) + "_" + std::to_string(index) + "_" + std::to_string(k);
      o.window = window;
      o.duration = r.duration;
      o.request = r.id;
      o.reward = reward;
      o.satellite = sats[sat].id;
      o.owner = owner;
      o.priority = priority;
      lo = std::min(lo, window.start);
      hi = std::max(hi, window.end);
      r.opportunities.push_back(o.id);
      observations.push_back(std::move(o));
    }
    r.window = {lo, hi};
    requests.push_back(std::move(r));
  };

  auto window_inside = [&](const TimeWindow& ex) {
    const double len = std::min(
        ex.length(), rng.uniform(params.observation_window_duration.lo, params.observation_window_duration.hi));
    const double start = rng.uniform(ex.start, ex.end - len);
    return TimeWindow{start, std::min(ex.end, start + len)};
  };

  for (std::size_t ui = 0; ui + 1 < users.size(); ++ui) {
    const Id owner = users[ui].id;
    std::vector<const PlacedExclusive*> mine;
    for (const auto& pe : placed)
      if (pe.owner == owner) mine.push_back(&pe);
    const int count = rng.uniform_int(params.requests_per_exclusive_user.lo, params.requests_per_exclusive_user.hi);
    for (int j = 0; j < count; ++j) {
      const double reward = params.exclusive_reward[rng.index(params.exclusive_reward.size())];
      make_request(owner, j, reward, 1, [&] {
        const PlacedExclusive* pe = mine[rng.index(mine.size())];
        return std::pair{pe->satellite, window_inside(pe->window)};
      });
    }
  }

  const int central = rng.uniform_int(params.central_request_count.lo, params.central_request_count.hi);
  for (int j = 0; j < central; ++j) {
    const double reward = rng.uniform_int(params.central_reward.lo, params.central_reward.hi);
    make_request("u_0", j, reward, 2, [&]() -> std::pair<std::size_t, TimeWindow> {
      for (int attempt = 0; attempt < params.max_retries; ++attempt) {
        const std::size_t s = rng.index(sats.size());
        if (params.windows_only_inside_exclusives) {
          if (by_sat[s].empty()) continue;
          return {s, window_inside(by_sat[s][rng.index(by_sat[s].size())])};
        }
        const double len = rng.uniform(params.observation_window_duration.lo, params.observation_window_duration.hi);
        const double start = rng.uniform(params.horizon.start, params.horizon.end - len);
        const TimeWindow w{start, start + len};
        bool inside = false, overlapping = false;
        for (const auto& ex : by_sat[s]) {
          if (ex.contains(w)) inside = true;
          else if (ex.overlaps(w)) overlapping = true;
        }
        if (inside || !overlapping) return {s, w};
      }
      throw GenerationError("could not place an observation window after " +
                            std::to_string(params.max_retries) + " retries");
    });
  }

  return Instance(std::move(sats), std::move(users), std::move(requests), std::move(observations));
}

}  // namespace eoscsp

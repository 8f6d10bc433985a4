#include "eoscsp/greedy.hpp"

#include <algorithm>
#include <set>

namespace eoscsp {

namespace {

std::vector<TimeWindow> host_windows(const Instance& p, const Id& host, const Id& satellite) {
  const double guard = p.satellite(satellite).transition.max_time();
  const auto on_sat = p.exclusives_on(satellite);
  std::vector<TimeWindow> out;
  for (std::size_t i = 0; i < on_sat.size(); ++i) {
    if (on_sat[i].first != host) continue;
    TimeWindow w = on_sat[i].second;
    for (std::size_t j = 0; j < i; ++j) {
      const auto& [owner, prev] = on_sat[j];
      if (owner != host && prev.end <= w.start + kTimeEps && w.start - prev.end < guard) {
        w.start = std::max(w.start, prev.end + guard);
      }
    }
    out.push_back(w);
  }
  return out;
}

}  // namespace

std::vector<std::pair<Id, TimeWindow>> domains(const Instance& p, const Observation& o,
                                               const DomainRule& rule) {
  std::vector<std::pair<Id, TimeWindow>> out;
  auto keep = [&](const TimeWindow& w) {
    if (w.length() >= o.duration - kTimeEps) out.emplace_back(o.satellite, w);
  };
  switch (rule.policy) {
    case DomainPolicy::Centralized:
      if (p.user(o.owner).has_exclusives()) {
        for (const auto& w : own_exclusive_domains(p, o)) keep(w);
      } else {
        keep(o.window);
      }
      break;
    case DomainPolicy::OutsideExclusives: {
      const double gap = rule.guard ? p.satellite(o.satellite).transition.max_time() : 0.0;
      const auto on_sat = p.exclusives_on(o.satellite);
      for (TimeWindow w : free_portions(p, o)) {
        for (const auto& [owner, ex] : on_sat) {
          if (ex.end <= w.start + kTimeEps && w.start - ex.end < gap) w.start = ex.end + gap;
          if (ex.start >= w.end - kTimeEps && ex.start - w.end < gap) w.end = ex.start - gap;
        }
        keep(w);
      }
      break;
    }
    case DomainPolicy::Host: {
      const auto& host = p.user(rule.host);
      std::vector<TimeWindow> windows = host_windows(p, rule.host, o.satellite);
      if (rule.exclusive) {
        const Exclusive& chosen = host.exclusives.at(*rule.exclusive);
        if (chosen.satellite != o.satellite) break;
        std::erase_if(windows, [&](const TimeWindow& w) { return !chosen.window.contains(w); });
      }
      for (const auto& ex : windows) {
        if (auto w = ex.intersection(o.window)) keep(*w);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second.start) < std::tie(b.first, b.second.start);
  });
  return out;
}

TrackSet::TrackSet(const Instance& p) : p_(&p) {
  for (const auto& s : p.satellites()) {
    tracks_[s.id];
    limits_[s.id] = s.capacity;
  }
}

const std::vector<TrackEntry>& TrackSet::track(const Id& satellite) const {
  auto it = tracks_.find(satellite);
  if (it == tracks_.end()) throw ModelError("unknown satellite '" + satellite + "'");
  return it->second;
}

int TrackSet::limit(const Id& satellite) const { return limits_.at(satellite); }
void TrackSet::set_limit(const Id& satellite, int limit) { limits_.at(satellite) = limit; }

bool TrackSet::full(const Id& satellite) const {
  return static_cast<int>(track(satellite).size()) >= limit(satellite);
}

void TrackSet::add(const Id& satellite, TrackEntry entry) {
  auto& t = tracks_.at(satellite);
  auto pos = std::upper_bound(t.begin(), t.end(), entry.start,
                              [](double start, const TrackEntry& e) { return start < e.start; });
  t.insert(pos, std::move(entry));
}

void TrackSet::insert(const Id& satellite, std::size_t index, TrackEntry entry) {
  auto& t = tracks_.at(satellite);
  t.insert(t.begin() + static_cast<std::ptrdiff_t>(index), std::move(entry));
}

bool TrackSet::remove(const Id& observation) {
  for (auto& [sat, t] : tracks_) {
    auto it = std::find_if(t.begin(), t.end(), [&](const TrackEntry& e) { return e.observation == observation; });
    if (it != t.end()) {
      t.erase(it);
      return true;
    }
  }
  return false;
}

double TrackSet::transition(const Id& satellite, const Id& from, const Id& to) const {
  const auto& tt = p_->satellite(satellite).transition;
  if (from.empty() || to.empty()) return tt.max_time();
  return tt(from, to);
}

std::optional<Slot> TrackSet::scan(const Observation& o, const Id& satellite, const TimeWindow& domain) const {
  const auto& r = track(satellite);
  const double dur = o.duration;
  if (r.empty()) {
    if (domain.end >= domain.start + dur - kTimeEps) return Slot{satellite, domain.start, 0};
    return std::nullopt;
  }
  for (std::size_t i = 0; i <= r.size(); ++i) {
    double start = domain.start;
    if (i > 0) {
      const TrackEntry& prev = r[i - 1];
      start = std::max(start, prev.end() + transition(satellite, prev.observation, o.id));
    }
    if (start + dur > domain.end + kTimeEps) continue;
    // As in the reference procedure, only a middle insertion adds the
    // transition to the successor; a tail append checks the bare duration.
    double upper, end;
    if (i == r.size()) {
      upper = domain.end;
      end = start + dur;
    } else {
      upper = r[i].start;
      end = start + dur + transition(satellite, o.id, r[i].observation);
    }
    if (start < end && end <= upper + kTimeEps) return Slot{satellite, start, i};
  }
  return std::nullopt;
}

bool TrackSet::consistent(const Id& satellite) const {
  const auto& r = track(satellite);
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i].start - r[i - 1].start <
        r[i - 1].duration + transition(satellite, r[i - 1].observation, r[i].observation) - kTimeEps) {
      return false;
    }
  }
  return true;
}

std::map<Id, double> TrackSet::placements() const {
  std::map<Id, double> out;
  for (const auto& [sat, t] : tracks_)
    for (const auto& e : t)
      if (!e.observation.empty()) out.emplace(e.observation, e.start);
  return out;
}

std::vector<const Observation*> sort_observations(std::vector<const Observation*> observations) {
  std::sort(observations.begin(), observations.end(), [](const Observation* a, const Observation* b) {
    return std::tie(a->priority, a->window.start, a->id) < std::tie(b->priority, b->window.start, b->id);
  });
  return observations;
}

std::optional<Slot> first_slot(const Observation& o, const Instance& p, TrackSet& tracks,
                               const DomainRule& rule) {
  for (const auto& [sat, window] : domains(p, o, rule)) {
    if (tracks.full(sat)) continue;
    if (auto slot = tracks.scan(o, sat, window)) {
      tracks.insert(sat, slot->index, {o.id, slot->start, o.duration});
      return slot;
    }
  }
  return std::nullopt;
}

std::map<Id, double> greedy_fill(const Instance& p, TrackSet& tracks,
                                 std::vector<const Observation*> candidates, const DomainRule& rule) {
  std::map<Id, double> placed;
  std::set<Id> served;
  for (const Observation* o : sort_observations(std::move(candidates))) {
    if (served.count(o->request)) continue;
    if (auto slot = first_slot(*o, p, tracks, rule)) {
      placed.emplace(o->id, slot->start);
      served.insert(o->request);
    }
  }
  return placed;
}

Schedule solve_greedy(const Instance& p, const GreedyOptions& options) {
  TrackSet tracks(p);
  Schedule m = p.preallocated();
  for (const auto& [oid, t] : m.entries) {
    const Observation& o = p.observation(oid);
    tracks.add(o.satellite, {oid, t, o.duration});
  }
  std::vector<const Observation*> candidates;
  for (const Request* r : p.open_requests())
    for (const auto& oid : r->opportunities) candidates.push_back(&p.observation(oid));

  auto placed = greedy_fill(p, tracks, std::move(candidates), DomainRule{options.policy, {}, {}});
  m.entries.insert(placed.begin(), placed.end());
  if (options.policy == DomainPolicy::Centralized) record_grants(p, m);
  return m;
}

}  // namespace eoscsp

#include "eoscsp/model.hpp"

#include <algorithm>
#include <sstream>

namespace eoscsp {

std::optional<TimeWindow> TimeWindow::intersection(const TimeWindow& other) const {
  TimeWindow w{std::max(start, other.start), std::min(end, other.end)};
  if (w.start > w.end) return std::nullopt;
  return w;
}

double TransitionTable::operator()(const Id& from, const Id& to) const {
  if (overrides.empty()) return default_time;
  auto it = overrides.find({from, to});
  return it == overrides.end() ? default_time : it->second;
}

double TransitionTable::max_time() const {
  double m = default_time;
  for (const auto& [pair, t] : overrides) m = std::max(m, t);
  return m;
}

namespace {

template <typename T>
void sort_and_index(std::vector<T>& items, std::unordered_map<Id, std::size_t>& index,
                    const char* what) {
  std::sort(items.begin(), items.end(),
            [](const T& a, const T& b) { return a.id < b.id; });
  index.clear();
  index.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!index.emplace(items[i].id, i).second) {
      throw ModelError(std::string("duplicate ") + what + " id '" + items[i].id + "'");
    }
  }
}

template <typename T>
const T* lookup(const std::vector<T>& items, const std::unordered_map<Id, std::size_t>& index,
                const Id& id) {
  auto it = index.find(id);
  return it == index.end() ? nullptr : &items[it->second];
}

void check_window(const TimeWindow& w, const std::string& what) {
  if (!(w.start <= w.end)) throw ModelError(what + ": window start after end");
}

}  // namespace

Instance::Instance(std::vector<Satellite> satellites, std::vector<User> users,
                   std::vector<Request> requests, std::vector<Observation> observations,
                   Schedule preallocated)
    : satellites_(std::move(satellites)),
      users_(std::move(users)),
      requests_(std::move(requests)),
      observations_(std::move(observations)),
      preallocated_(std::move(preallocated)) {
  sort_and_index(satellites_, satellite_index_, "satellite");
  sort_and_index(users_, user_index_, "user");
  sort_and_index(requests_, request_index_, "request");
  sort_and_index(observations_, observation_index_, "observation");
  for (auto& u : users_) {
    std::sort(u.exclusives.begin(), u.exclusives.end(), [](const Exclusive& a, const Exclusive& b) {
      return std::tie(a.satellite, a.window.start, a.window.end) <
             std::tie(b.satellite, b.window.start, b.window.end);
    });
    for (const auto& e : u.exclusives) exclusives_by_satellite_[e.satellite].emplace_back(u.id, e.window);
  }
  for (auto& [sat, list] : exclusives_by_satellite_) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return std::tie(a.second.start, a.first) < std::tie(b.second.start, b.first);
    });
  }
  check_integrity();
}

void Instance::check_integrity() const {
  for (const auto& s : satellites_) {
    check_window(s.horizon, "satellite " + s.id);
    if (s.capacity < 0) throw ModelError("satellite " + s.id + ": negative capacity");
    if (s.transition.default_time < 0) throw ModelError("satellite " + s.id + ": negative transition");
    for (const auto& [pair, t] : s.transition.overrides) {
      if (t < 0) throw ModelError("satellite " + s.id + ": negative transition override");
    }
  }

  std::size_t central = 0;
  for (const auto& u : users_) {
    if (u.priority <= 0) throw ModelError("user " + u.id + ": priority must be positive");
    if (!u.has_exclusives()) ++central;
    for (const auto& e : u.exclusives) {
      check_window(e.window, "exclusive of " + u.id);
      const Satellite* s = find_satellite(e.satellite);
      if (!s) throw ModelError("user " + u.id + ": unknown satellite '" + e.satellite + "'");
      if (!s->horizon.contains(e.window)) {
        throw ModelError("user " + u.id + ": exclusive outside horizon of " + s->id);
      }
    }
  }
  if (!users_.empty() && central != 1) {
    throw ModelError("exactly one user without exclusives is required, found " +
                     std::to_string(central));
  }
  if (users_.empty() && !requests_.empty()) throw ModelError("requests without users");

  for (const auto& [sat, list] : exclusives_by_satellite_) {
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i - 1].second.overlaps(list[i].second)) {
        throw ModelError("overlapping exclusives on " + sat + " (" + list[i - 1].first + ", " +
                         list[i].first + ")");
      }
    }
  }

  for (const auto& r : requests_) {
    check_window(r.window, "request " + r.id);
    if (!(r.duration > 0)) throw ModelError("request " + r.id + ": duration must be positive");
    if (r.opportunities.empty()) throw ModelError("request " + r.id + ": no opportunities");
    if (!find_user(r.owner)) throw ModelError("request " + r.id + ": unknown owner '" + r.owner + "'");
    for (const auto& oid : r.opportunities) {
      const Observation* o = find_observation(oid);
      if (!o) throw ModelError("request " + r.id + ": unknown observation '" + oid + "'");
      if (o->request != r.id) throw ModelError("observation " + oid + " not tied to " + r.id);
    }
  }

  for (const auto& o : observations_) {
    check_window(o.window, "observation " + o.id);
    const Satellite* s = find_satellite(o.satellite);
    if (!s) throw ModelError("observation " + o.id + ": unknown satellite '" + o.satellite + "'");
    if (!s->horizon.contains(o.window)) {
      throw ModelError("observation " + o.id + ": window outside satellite horizon");
    }
    if (o.window.length() < o.duration - kTimeEps) {
      throw ModelError("observation " + o.id + ": window shorter than duration");
    }
    const Request* r = find_request(o.request);
    if (!r) throw ModelError("observation " + o.id + ": unknown request '" + o.request + "'");
    if (std::find(r->opportunities.begin(), r->opportunities.end(), o.id) == r->opportunities.end()) {
      throw ModelError("observation " + o.id + " missing from opportunities of " + r->id);
    }
    if (o.duration != r->duration) throw ModelError("observation " + o.id + ": duration differs from request");
    if (o.owner != r->owner) throw ModelError("observation " + o.id + ": owner differs from request");
    if (o.priority != user(o.owner).priority) {
      throw ModelError("observation " + o.id + ": priority differs from owner priority");
    }
  }

  for (const auto& [oid, t] : preallocated_.entries) {
    if (!find_observation(oid)) throw ModelError("preallocation references unknown '" + oid + "'");
  }
}

const Satellite* Instance::find_satellite(const Id& id) const {
  return lookup(satellites_, satellite_index_, id);
}
const User* Instance::find_user(const Id& id) const { return lookup(users_, user_index_, id); }
const Request* Instance::find_request(const Id& id) const {
  return lookup(requests_, request_index_, id);
}
const Observation* Instance::find_observation(const Id& id) const {
  return lookup(observations_, observation_index_, id);
}

const Satellite& Instance::satellite(const Id& id) const {
  if (auto* s = find_satellite(id)) return *s;
  throw ModelError("unknown satellite '" + id + "'");
}
const User& Instance::user(const Id& id) const {
  if (auto* u = find_user(id)) return *u;
  throw ModelError("unknown user '" + id + "'");
}
const Request& Instance::request(const Id& id) const {
  if (auto* r = find_request(id)) return *r;
  throw ModelError("unknown request '" + id + "'");
}
const Observation& Instance::observation(const Id& id) const {
  if (auto* o = find_observation(id)) return *o;
  throw ModelError("unknown observation '" + id + "'");
}

std::size_t Instance::observation_index(const Id& id) const {
  auto it = observation_index_.find(id);
  if (it == observation_index_.end()) throw ModelError("unknown observation '" + id + "'");
  return it->second;
}

std::vector<const User*> Instance::exclusive_users() const {
  std::vector<const User*> out;
  for (const auto& u : users_)
    if (u.has_exclusives()) out.push_back(&u);
  return out;
}

const User* Instance::central_planner() const {
  for (const auto& u : users_)
    if (!u.has_exclusives()) return &u;
  return nullptr;
}

std::vector<const Request*> Instance::open_requests() const {
  std::set<Id> fulfilled;
  for (const auto& [oid, t] : preallocated_.entries) fulfilled.insert(observation(oid).request);
  std::vector<const Request*> out;
  for (const auto& r : requests_)
    if (!fulfilled.count(r.id)) out.push_back(&r);
  return out;
}

int Instance::residual_capacity(const Id& sat) const {
  int used = 0;
  for (const auto& [oid, t] : preallocated_.entries)
    if (observation(oid).satellite == sat) ++used;
  return satellite(sat).capacity - used;
}

std::vector<std::pair<Id, TimeWindow>> Instance::exclusives_on(const Id& sat) const {
  auto it = exclusives_by_satellite_.find(sat);
  if (it == exclusives_by_satellite_.end()) return {};
  return it->second;
}

// ---------------------------------------------------------------------------

namespace {

Instance rebuild(const Instance& p, std::vector<Request> requests,
                 std::vector<Observation> observations, Schedule pre) {
  return Instance(p.satellites(), p.users(), std::move(requests), std::move(observations),
                  std::move(pre));
}

Schedule restrict_schedule(const Schedule& m, const std::set<Id>& keep) {
  Schedule out;
  for (const auto& [oid, t] : m.entries)
    if (keep.count(oid)) out.entries.emplace(oid, t);
  for (const auto& g : m.grants)
    if (keep.count(g.first)) out.grants.insert(g);
  return out;
}

}  // namespace

Instance restrict_to_user(const Instance& p, const Id& user) {
  p.user(user);
  std::vector<Request> rs;
  std::vector<Observation> os;
  std::set<Id> kept;
  for (const auto& r : p.requests())
    if (r.owner == user) rs.push_back(r);
  for (const auto& o : p.observations()) {
    if (o.owner == user) {
      os.push_back(o);
      kept.insert(o.id);
    }
  }
  return rebuild(p, std::move(rs), std::move(os), restrict_schedule(p.preallocated(), kept));
}

Instance restrict_to_request(const Instance& p, const Id& request) {
  const Request& r = p.request(request);
  std::vector<Observation> os;
  std::set<Id> kept;
  for (const auto& oid : r.opportunities) {
    os.push_back(p.observation(oid));
    kept.insert(oid);
  }
  return rebuild(p, {r}, std::move(os), restrict_schedule(p.preallocated(), kept));
}

std::vector<TimeWindow> free_portions(const Instance& p, const Observation& o) {
  std::vector<TimeWindow> out;
  double cursor = o.window.start;
  for (const auto& [owner, w] : p.exclusives_on(o.satellite)) {
    if (w.end <= cursor) continue;
    if (w.start >= o.window.end) break;
    if (w.start > cursor) out.push_back({cursor, w.start});
    cursor = std::max(cursor, w.end);
  }
  if (cursor < o.window.end) out.push_back({cursor, o.window.end});
  std::erase_if(out, [&](const TimeWindow& w) { return w.length() < o.duration - kTimeEps; });
  return out;
}

std::vector<TimeWindow> own_exclusive_domains(const Instance& p, const Observation& o) {
  std::vector<TimeWindow> out;
  for (const auto& e : p.user(o.owner).exclusives) {
    if (e.satellite != o.satellite) continue;
    if (auto w = e.window.intersection(o.window); w && w->length() >= o.duration - kTimeEps) {
      out.push_back(*w);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  return out;
}

Instance outside_exclusives(const Instance& p) {
  std::vector<Observation> os;
  std::set<Id> kept;
  for (const auto& o : p.observations()) {
    if (!free_portions(p, o).empty()) {
      os.push_back(o);
      kept.insert(o.id);
    }
  }
  std::vector<Request> rs;
  for (const auto& r : p.requests()) {
    Request copy = r;
    std::erase_if(copy.opportunities, [&](const Id& oid) { return !kept.count(oid); });
    if (!copy.opportunities.empty()) rs.push_back(std::move(copy));
  }
  return rebuild(p, std::move(rs), std::move(os), restrict_schedule(p.preallocated(), kept));
}

Instance with_preallocation(const Instance& p, const Schedule& m) {
  Verdict v = validate_schedule(p, m);
  if (!v.ok()) throw ModelError("preallocation is not valid: " + v.summary());
  Schedule pre = p.preallocated();
  for (const auto& [oid, t] : m.entries) pre.entries[oid] = t;
  pre.grants.insert(m.grants.begin(), m.grants.end());
  return rebuild(p, p.requests(), p.observations(), std::move(pre));
}

namespace {

template <typename T>
void merge_records(std::vector<T>& into, const std::vector<T>& from, const char* what) {
  std::map<Id, const T*> seen;
  for (const auto& x : into) seen.emplace(x.id, &x);
  for (const auto& x : from) {
    auto it = seen.find(x.id);
    if (it == seen.end()) {
      into.push_back(x);
    } else if (!(*it->second == x)) {
      throw ModelError(std::string("conflicting ") + what + " records for id '" + x.id + "'");
    }
  }
}

}  // namespace

Instance unite(const Instance& p, const Instance& q) {
  auto sats = p.satellites();
  auto users = p.users();
  merge_records(sats, q.satellites(), "satellite");
  merge_records(users, q.users(), "user");

  // Requests may appear with a filtered opportunity list on one side; the
  // union of the two lists is kept.
  std::map<Id, Request> reqs;
  for (const auto& r : p.requests()) reqs.emplace(r.id, r);
  for (const auto& r : q.requests()) {
    auto [it, inserted] = reqs.emplace(r.id, r);
    if (inserted) continue;
    Request a = it->second, b = r;
    a.opportunities.clear();
    b.opportunities.clear();
    if (!(a == b)) throw ModelError("conflicting request records for id '" + r.id + "'");
    std::set<Id> opps(it->second.opportunities.begin(), it->second.opportunities.end());
    opps.insert(r.opportunities.begin(), r.opportunities.end());
    it->second.opportunities.assign(opps.begin(), opps.end());
  }
  std::vector<Request> rs;
  for (auto& [id, r] : reqs) rs.push_back(std::move(r));

  auto os = p.observations();
  merge_records(os, q.observations(), "observation");

  Schedule pre = p.preallocated();
  for (const auto& [oid, t] : q.preallocated().entries) {
    auto [it, inserted] = pre.entries.emplace(oid, t);
    if (!inserted && it->second != t) throw ModelError("conflicting preallocation for '" + oid + "'");
  }
  pre.grants.insert(q.preallocated().grants.begin(), q.preallocated().grants.end());
  return Instance(std::move(sats), std::move(users), std::move(rs), std::move(os), std::move(pre));
}

// ---------------------------------------------------------------------------

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::UnknownObservation: return "unknown-observation";
    case ViolationKind::StartOutsideWindow: return "start-outside-window";
    case ViolationKind::CapacityExceeded: return "capacity-exceeded";
    case ViolationKind::DuplicateRequest: return "duplicate-request";
    case ViolationKind::TransitionTooShort: return "transition-too-short";
    case ViolationKind::OwnerOutsideExclusive: return "owner-outside-exclusive";
    case ViolationKind::UngrantedIntrusion: return "ungranted-intrusion";
    case ViolationKind::PreallocationChanged: return "preallocation-changed";
  }
  return "?";
}

std::size_t Verdict::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

std::string Verdict::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  out << violations.size() << " violation(s)";
  for (std::size_t i = 0; i < violations.size() && i < 5; ++i) {
    out << "; " << to_string(violations[i].kind) << ": " << violations[i].detail;
  }
  return out.str();
}

Verdict validate_schedule(const Instance& p, const Schedule& m) {
  Verdict verdict;
  auto flag = [&](ViolationKind k, std::string detail) {
    verdict.violations.push_back({k, std::move(detail)});
  };

  std::map<Id, std::vector<std::pair<double, const Observation*>>> tracks;
  std::map<Id, std::vector<Id>> per_request;

  for (const auto& [oid, t] : m.entries) {
    const Observation* o = p.find_observation(oid);
    if (!o) {
      flag(ViolationKind::UnknownObservation, oid);
      continue;
    }
    if (t < o->window.start - kTimeEps || t > o->latest_start() + kTimeEps) {
      flag(ViolationKind::StartOutsideWindow, oid + " at " + std::to_string(t));
    }
    tracks[o->satellite].emplace_back(t, o);
    per_request[o->request].push_back(oid);

    const TimeWindow busy = o->occupied(t);
    const User& owner = p.user(o->owner);
    if (owner.has_exclusives()) {
      bool inside = std::any_of(owner.exclusives.begin(), owner.exclusives.end(), [&](const Exclusive& e) {
        return e.satellite == o->satellite && e.window.contains(busy);
      });
      if (!inside) flag(ViolationKind::OwnerOutsideExclusive, oid);
    }
    for (const auto& [holder, w] : p.exclusives_on(o->satellite)) {
      if (holder == o->owner || !w.overlaps(busy)) continue;
      if (!m.grants.count({oid, holder})) {
        flag(ViolationKind::UngrantedIntrusion, oid + " in exclusive of " + holder);
      }
    }
  }

  for (const auto& [rid, obs] : per_request) {
    if (obs.size() > 1) flag(ViolationKind::DuplicateRequest, rid);
  }

  for (auto& [sid, track] : tracks) {
    const Satellite& s = p.satellite(sid);
    if (static_cast<int>(track.size()) > s.capacity) {
      flag(ViolationKind::CapacityExceeded,
           sid + " holds " + std::to_string(track.size()) + " > " + std::to_string(s.capacity));
    }
    std::sort(track.begin(), track.end(), [](const auto& a, const auto& b) {
      return std::tie(a.first, a.second->id) < std::tie(b.first, b.second->id);
    });
    for (std::size_t i = 1; i < track.size(); ++i) {
      const auto& [t_prev, prev] = track[i - 1];
      const auto& [t_next, next] = track[i];
      const double gap = prev->duration + s.transition(prev->id, next->id);
      if (t_next - t_prev < gap - kTimeEps) {
        flag(ViolationKind::TransitionTooShort, prev->id + " -> " + next->id);
      }
    }
  }

  for (const auto& [oid, t] : p.preallocated().entries) {
    auto it = m.entries.find(oid);
    if (it == m.entries.end() || it->second != t) flag(ViolationKind::PreallocationChanged, oid);
  }
  return verdict;
}

double total_reward(const Instance& p, const Schedule& m) {
  double sum = 0.0;
  for (const auto& [oid, t] : m.entries) sum += p.observation(oid).reward;
  return sum;
}

void record_grants(const Instance& p, Schedule& m) {
  for (const auto& [oid, t] : m.entries) {
    const Observation& o = p.observation(oid);
    const TimeWindow busy = o.occupied(t);
    for (const auto& [holder, w] : p.exclusives_on(o.satellite)) {
      if (holder != o.owner && w.overlaps(busy)) m.grants.emplace(oid, holder);
    }
  }
}

std::vector<const Request*> sort_by_due_date(std::vector<const Request*> requests) {
  std::sort(requests.begin(), requests.end(), [](const Request* a, const Request* b) {
    return std::tie(a->window.end, a->id) < std::tie(b->window.end, b->id);
  });
  return requests;
}

}  // namespace eoscsp

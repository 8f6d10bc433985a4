#include "agents.hpp"

#include <algorithm>
#include <cstdio>

namespace eoscsp::detail {

json counts_to_json(const Counts& c) {
  json j = json::object();
  for (const auto& [s, n] : c) j[s] = n;
  return j;
}

Counts counts_from_json(const json& j) {
  Counts c;
  for (const auto& [s, n] : j.items()) c[s] = n.get<int>();
  return c;
}

json request_record(const Instance& p, const Request& r, const std::set<Id>& satellites) {
  json opps = json::array();
  for (const auto& oid : r.opportunities) {
    const Observation& o = p.observation(oid);
    if (!satellites.empty() && !satellites.count(o.satellite)) continue;
    opps.push_back({{"id", o.id}, {"satellite", o.satellite}, {"window", {o.window.start, o.window.end}}});
  }
  return {{"id", r.id},
          {"window", {r.window.start, r.window.end}},
          {"duration", r.duration},
          {"reward", r.reward},
          {"opportunities", std::move(opps)}};
}

std::string handle(const Id& user, const Id& observation) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(user + '/' + observation)));
  return buf;
}

TrackSet tracks_of(const Instance& p, const Schedule& plan) {
  TrackSet t(p);
  for (const auto& [oid, start] : plan.entries) {
    const Observation& o = p.observation(oid);
    t.add(o.satellite, {oid, start, o.duration});
  }
  return t;
}

namespace {

bool served_in(const Schedule& plan, const Request& r) {
  return std::any_of(r.opportunities.begin(), r.opportunities.end(),
                     [&](const Id& oid) { return plan.contains(oid); });
}

}  // namespace

// ---------------------------------------------------------------------------

Agent::Agent(const Instance& p, const User& u, Schedule plan) : p_(&p), id_(u.id), plan_(std::move(plan)) {
  for (const auto& e : u.exclusives) satellites_.insert(e.satellite);
}

int Agent::count(const Id& satellite) const {
  int n = 0;
  for (const auto& [oid, t] : plan_.entries)
    if (p_->observation(oid).satellite == satellite) ++n;
  return n;
}

Counts Agent::counts() const {
  Counts c;
  for (const auto& s : satellites_) c[s] = count(s);
  return c;
}

Residuals Agent::room(const Counts& allowance) const {
  Residuals r;
  for (const auto& s : satellites_) {
    auto it = allowance.find(s);
    r[s] = (it == allowance.end() ? 0 : it->second) - count(s);
  }
  return r;
}

void Agent::fill(const Counts& allowance) {
  TrackSet tracks = tracks_of(*p_, plan_);
  for (const auto& s : satellites_) {
    auto it = allowance.find(s);
    tracks.set_limit(s, it == allowance.end() ? count(s) : it->second);
  }
  std::vector<const Observation*> candidates;
  for (const Request* r : p_->open_requests()) {
    if (r->owner != id_ || served_in(plan_, *r)) continue;
    for (const auto& oid : r->opportunities) candidates.push_back(&p_->observation(oid));
  }
  DomainRule rule{DomainPolicy::Host, id_, std::nullopt};
  for (const auto& [oid, t] : greedy_fill(*p_, tracks, std::move(candidates), rule)) plan_.entries[oid] = t;
}

bool Agent::has_unserved() const {
  for (const Request* r : p_->open_requests())
    if (r->owner == id_ && !served_in(plan_, *r)) return true;
  return false;
}

std::optional<Bid> Agent::bid(const Id& request, const Counts& allowance) const {
  return eoscsp::bid(*p_, id_, plan_, request, room(allowance));
}

void Agent::award(const Bid& b) { plan_ = merge_award(*p_, id_, plan_, b.placement, b.displaced); }

void Agent::drop(const Id& observation) {
  plan_.entries.erase(observation);
  plan_.grants.erase({observation, id_});
}

json Agent::foreign() const {
  json out = json::array();
  for (const auto& [oid, t] : plan_.entries)
    if (p_->observation(oid).owner != id_) out.push_back({{"observation", oid}, {"start", t}});
  return out;
}

// ---------------------------------------------------------------------------

Network::Network(const Instance& p, MessageBus& bus) : p_(&p), bus_(&bus) {
  const User* central = p.central_planner();
  planner_ = central ? central->id : Id{"central"};
  if (!bus.has_agent(planner_)) bus.register_agent(planner_);

  std::vector<const User*> ex = p.exclusive_users();
  std::sort(ex.begin(), ex.end(), [](const User* a, const User* b) {
    return std::tie(a->priority, a->id) < std::tie(b->priority, b->id);
  });

  std::map<Id, Schedule> plans;
  const Schedule& pre = p.preallocated();
  for (const auto& [oid, t] : pre.entries) {
    const Observation& o = p.observation(oid);
    std::optional<Id> holder;
    for (const auto& [go, gv] : pre.grants)
      if (go == oid && p.user(gv).has_exclusives()) holder = gv;
    if (!holder && p.user(o.owner).has_exclusives()) holder = o.owner;
    if (holder) {
      plans[*holder].entries[oid] = t;
      if (*holder != o.owner) plans[*holder].grants.insert({oid, *holder});
    } else {
      planner_fixed_.entries[oid] = t;
      fixed_outside_[o.satellite] += 1;
    }
  }

  for (const User* u : ex) {
    order_.push_back(u->id);
    if (!bus.has_agent(u->id)) bus.register_agent(u->id);
    auto [it, ok] = agents_.emplace(u->id, Agent(p, *u, plans[u->id]));
    believed_[u->id] = it->second.counts();
  }
}

int Network::residual(const Id& satellite) const {
  int r = p_->satellite(satellite).capacity;
  if (auto it = fixed_outside_.find(satellite); it != fixed_outside_.end()) r -= it->second;
  for (const auto& [u, c] : believed_)
    if (auto it = c.find(satellite); it != c.end()) r -= it->second;
  return r;
}

Counts Network::residuals() const {
  Counts c;
  for (const auto& s : p_->satellites()) c[s.id] = residual(s.id);
  return c;
}

Counts Network::allowance(const Id& u) const {
  Counts c;
  const Counts& mine = believed_.at(u);
  for (const auto& s : agents_.at(u).satellites()) {
    auto it = mine.find(s);
    c[s] = (it == mine.end() ? 0 : it->second) + std::max(0, residual(s));
  }
  return c;
}

Counts Network::share(const Id& u) const {
  Counts c;
  const Counts& mine = believed_.at(u);
  for (const auto& s : agents_.at(u).satellites()) {
    auto it = mine.find(s);
    c[s] = it == mine.end() ? 0 : it->second;
  }
  return c;
}

void Network::set_counts(const Id& u, const Counts& c) {
  for (const auto& [s, n] : c) believed_[u][s] = n;
}

std::vector<const Request*> Network::open_requests() const {
  std::vector<const Request*> out;
  for (const Request* r : p_->open_requests())
    if (!p_->user(r->owner).has_exclusives() && !served(r->id)) out.push_back(r);
  return sort_by_due_date(std::move(out));
}

void Network::exchange(const Id& u) {
  bus_->send(planner_, u, MessageKind::PlanReport, {{"allowance", counts_to_json(allowance(u))}});
  bus_->next_round();
  Agent& a = agents_.at(u);
  for (const auto& e : bus_->drain(u)) a.fill(counts_from_json(e.body().at("allowance")));
  bus_->send(u, planner_, MessageKind::PlanReport, {{"counts", counts_to_json(a.counts())}});
  bus_->next_round();
  for (const auto& e : bus_->drain(planner_)) set_counts(e.from, counts_from_json(e.body().at("counts")));
}

void Network::local_phase() {
  for (const auto& u : order_) exchange(u);
}

void Network::refill(const std::vector<Id>& users) {
  std::set<Id> wanted(users.begin(), users.end());
  for (const auto& u : order_)
    if (wanted.count(u) && agents_.at(u).has_unserved()) exchange(u);
}

Schedule Network::finish() {
  for (const auto& u : order_) {
    const Agent& a = agents_.at(u);
    bus_->send(u, planner_, MessageKind::PlanReport,
               {{"foreign", a.foreign()}, {"counts", counts_to_json(a.counts())}});
  }
  bus_->next_round();
  for (const auto& e : bus_->drain(planner_)) {
    const json body = e.body();
    if (body.contains("counts")) set_counts(e.from, counts_from_json(body.at("counts")));
    for (const auto& f : body.value("foreign", json::array()))
      mark_served(p_->observation(f.at("observation").get<Id>()).request);
  }

  TrackSet tracks = tracks_of(*p_, planner_fixed_);
  for (const auto& s : p_->satellites())
    tracks.set_limit(s.id, static_cast<int>(tracks.track(s.id).size()) + std::max(0, residual(s.id)));
  std::vector<const Observation*> candidates;
  for (const Request* r : open_requests())
    for (const auto& oid : r->opportunities) candidates.push_back(&p_->observation(oid));
  DomainRule rule{DomainPolicy::OutsideExclusives, planner_, std::nullopt, true};

  Schedule out = p_->preallocated();
  for (const auto& [oid, t] : greedy_fill(*p_, tracks, std::move(candidates), rule)) out.entries[oid] = t;
  for (const auto& [u, a] : agents_) {
    out.entries.insert(a.plan().entries.begin(), a.plan().entries.end());
    out.grants.insert(a.plan().grants.begin(), a.plan().grants.end());
  }
  return out;
}

}  // namespace eoscsp::detail

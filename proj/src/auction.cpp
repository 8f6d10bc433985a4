#include "eoscsp/auction.hpp"

#include <algorithm>
#include <tuple>
#include <utility>

#include "agents.hpp"

namespace eoscsp {

using detail::Counts;
using detail::Network;

namespace {

bool better(const Bid& a, const Bid& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.displaced_reward != b.displaced_reward) return a.displaced_reward < b.displaced_reward;
  if (a.placement.start != b.placement.start) return a.placement.start < b.placement.start;
  return a.placement.observation < b.placement.observation;
}

int room_on(const Instance& p, const Schedule& plan, const Residuals& residual, const Id& satellite) {
  if (auto it = residual.find(satellite); it != residual.end()) return it->second;
  int used = 0;
  for (const auto& [oid, t] : plan.entries)
    if (p.observation(oid).satellite == satellite) ++used;
  return p.satellite(satellite).capacity - used;
}

}  // namespace

std::optional<Bid> bid(const Instance& p, const Id& user, const Schedule& plan, const Id& request,
                       const Residuals& residual) {
  const Request& r = p.request(request);
  for (const auto& oid : r.opportunities)
    if (plan.contains(oid)) return std::nullopt;

  const TrackSet tracks = detail::tracks_of(p, plan);
  const Schedule& fixed = p.preallocated();
  std::optional<Bid> best;
  auto consider = [&](Bid b) {
    if (!best || better(b, *best)) best = std::move(b);
  };

  for (const auto& oid : r.opportunities) {
    const Observation& o = p.observation(oid);
    const int room = room_on(p, plan, residual, o.satellite);
    for (const auto& [sat, window] : domains(p, o, {DomainPolicy::Host, user, std::nullopt})) {
      if (room >= 1) {
        if (auto slot = tracks.scan(o, sat, window)) {
          consider({user, request, o.reward, {oid, sat, slot->start}, {}, 0.0});
        }
      }
      if (room < 0) continue;
      for (const auto& e : tracks.track(sat)) {
        if (e.observation.empty() || fixed.contains(e.observation)) continue;
        const Observation& d = p.observation(e.observation);
        if (d.owner != user || !(d.reward < o.reward)) continue;
        TrackSet without = tracks;
        without.remove(d.id);
        if (auto slot = without.scan(o, sat, window)) {
          consider({user, request, o.reward - d.reward, {oid, sat, slot->start}, {d.id}, d.reward});
        }
      }
    }
  }
  if (best && best->value <= 0) return std::nullopt;
  return best;
}

Schedule merge_award(const Instance& p, const Id& user, const Schedule& plan, const Placement& sigma,
                     const std::vector<Id>& displaced) {
  Schedule out = plan;
  for (const auto& d : displaced) {
    const Observation* o = p.find_observation(d);
    if (!o || o->owner != user) throw AwardError("cannot displace '" + d + "': not an own observation");
    if (p.preallocated().contains(d)) throw AwardError("cannot displace preallocated '" + d + "'");
    if (!out.entries.erase(d)) throw AwardError("cannot displace '" + d + "': not scheduled");
  }

  const Observation* o = p.find_observation(sigma.observation);
  if (!o) throw AwardError("unknown observation '" + sigma.observation + "'");
  if (o->satellite != sigma.satellite) throw AwardError("'" + o->id + "' is not an opportunity of " + sigma.satellite);
  for (const auto& sibling : p.request(o->request).opportunities)
    if (out.contains(sibling)) throw AwardError("request '" + o->request + "' is already served");

  const TimeWindow occupied = o->occupied(sigma.start);
  bool inside = false;
  for (const auto& [sat, w] : domains(p, *o, {DomainPolicy::Host, user, std::nullopt}))
    inside = inside || w.contains(occupied);
  if (!inside) throw AwardError("'" + o->id + "' does not fit an exclusive of " + user);

  TrackSet tracks = detail::tracks_of(p, out);
  tracks.add(sigma.satellite, {o->id, sigma.start, o->duration});
  if (!tracks.consistent(sigma.satellite)) throw AwardError("'" + o->id + "' overlaps the plan of " + user);

  out.entries[o->id] = sigma.start;
  if (o->owner != user) out.grants.insert({o->id, user});
  return out;
}

namespace {

json bid_json(const Bid& b) {
  json handles = json::array();
  for (const auto& d : b.displaced) handles.push_back(detail::handle(b.bidder, d));
  return {{"request", b.request},
          {"value", b.value},
          {"observation", b.placement.observation},
          {"satellite", b.placement.satellite},
          {"delta", b.delta()},
          {"displaced", std::move(handles)}};
}

/// Allowance from an announced residual: current entries plus the residual.
Counts allowance_from(const detail::Agent& a, const json& residual) {
  Counts c;
  for (const auto& s : a.satellites()) c[s] = a.count(s) + std::max(0, residual.value(s, 0));
  return c;
}

struct Offer {
  Id bidder;
  double value;
  Id satellite;
  std::vector<std::string> handles;
};

}  // namespace

Schedule solve_psi(const Instance& p, MessageBus* bus) {
  return detail::with_network(p, bus, [](Network& net) {
    net.local_phase();
    MessageBus& b = net.bus();
    const Id& u0 = net.planner();
    const auto requests = net.open_requests();
    if (requests.empty() || net.order().empty()) return;

    json records = json::array();
    for (const Request* r : requests) records.push_back(detail::request_record(net.instance(), *r));
    const json announce = {{"requests", records}, {"residual", detail::counts_to_json(net.residuals())}};
    b.broadcast(u0, net.order(), MessageKind::Announce, announce);
    b.next_round();

    for (const auto& u : net.order()) {
      const detail::Agent& a = net.agent(u);
      for (const auto& e : b.drain(u)) {
        const json body = e.body();
        const Counts allowance = allowance_from(a, body.at("residual"));
        json bids = json::array();
        for (const auto& rec : body.at("requests"))
          if (auto bd = a.bid(rec.at("id").get<Id>(), allowance)) bids.push_back(bid_json(*bd));
        if (!bids.empty()) b.send(u, u0, MessageKind::Bid, {{"bids", std::move(bids)}});
      }
    }
    b.next_round();

    // Winner determination, one request at a time in due-date order.
    std::map<Id, std::vector<Offer>> offers;
    for (const auto& e : b.drain(u0)) {
      const json body = e.body();
      for (const auto& bd : body.at("bids"))
        offers[bd.at("request").get<Id>()].push_back(
            {e.from, bd.at("value").get<double>(), bd.at("satellite").get<Id>(),
             bd.at("displaced").get<std::vector<std::string>>()});
    }

    Counts residual = net.residuals();
    std::map<Id, std::set<std::string>> consumed;
    std::map<Id, Counts> reserved;
    std::map<Id, std::vector<Id>> awards;
    for (const Request* r : requests) {
      auto it = offers.find(r->id);
      if (it == offers.end()) continue;
      auto& cands = it->second;
      std::stable_sort(cands.begin(), cands.end(), [](const Offer& x, const Offer& y) {
        return std::tie(y.value, x.bidder) < std::tie(x.value, y.bidder);
      });
      for (const Offer& c : cands) {
        int fresh = 0;
        for (const auto& h : c.handles) fresh += consumed[c.bidder].count(h) ? 0 : 1;
        const int delta = 1 - fresh;
        if (residual[c.satellite] < delta) continue;
        residual[c.satellite] -= delta;
        consumed[c.bidder].insert(c.handles.begin(), c.handles.end());
        reserved[c.bidder][c.satellite] += delta;
        awards[c.bidder].push_back(r->id);
        break;
      }
    }
    if (awards.empty()) return;

    // Unreserved capacity goes to the lowest-id winner.
    const Id& first = awards.begin()->first;
    for (const auto& s : net.agent(first).satellites())
      if (residual[s] > 0) reserved[first][s] += std::exchange(residual[s], 0);

    for (const auto& [w, list] : awards) {
      for (const auto& [s, n] : reserved[w]) net.reserve(w, s, n);
      b.send(u0, w, MessageKind::Award, {{"requests", list}, {"allowance", detail::counts_to_json(net.share(w))}});
    }
    b.next_round();

    std::vector<Id> displacers;
    for (const auto& [w, list] : awards) {
      detail::Agent& a = net.agent(w);
      for (const auto& e : b.drain(w)) {
        const json body = e.body();
        const Counts allowance = detail::counts_from_json(body.at("allowance"));
        json accepted = json::array(), declined = json::array();
        for (const auto& rid : body.at("requests")) {
          auto bd = a.bid(rid.get<Id>(), allowance);
          if (!bd) {
            declined.push_back(rid);
            continue;
          }
          a.award(*bd);
          if (!bd->displaced.empty()) displacers.push_back(w);
          accepted.push_back(rid);
        }
        b.send(w, u0, MessageKind::PlanReport,
               {{"accepted", accepted}, {"declined", declined}, {"counts", detail::counts_to_json(a.counts())}});
      }
    }
    b.next_round();
    for (const auto& e : b.drain(u0)) {
      const json body = e.body();
      for (const auto& rid : body.at("accepted")) net.mark_served(rid.get<Id>());
      net.set_counts(e.from, detail::counts_from_json(body.at("counts")));
    }
    net.refill(displacers);
  });
}

Schedule solve_ssi(const Instance& p, MessageBus* bus) {
  return detail::with_network(p, bus, [](Network& net) {
    net.local_phase();
    MessageBus& b = net.bus();
    const Id& u0 = net.planner();
    if (net.order().empty()) return;

    std::vector<Id> displacers;
    for (const Request* r : net.open_requests()) {
      b.broadcast(u0, net.order(), MessageKind::Announce,
                  {{"request", detail::request_record(net.instance(), *r)},
                   {"residual", detail::counts_to_json(net.residuals())}});
      b.next_round();

      std::map<Id, Bid> pending;
      for (const auto& u : net.order()) {
        const detail::Agent& a = net.agent(u);
        for (const auto& e : b.drain(u)) {
          const json body = e.body();
          auto bd = a.bid(body.at("request").at("id").get<Id>(), allowance_from(a, body.at("residual")));
          if (!bd) continue;
          b.send(u, u0, MessageKind::Bid, bid_json(*bd));
          pending.emplace(u, std::move(*bd));
        }
      }
      b.next_round();

      std::optional<Offer> best;
      for (const auto& e : b.drain(u0)) {
        const json bd = e.body();
        Offer o{e.from, bd.at("value").get<double>(), bd.at("satellite").get<Id>(), {}};
        if (!best || o.value > best->value || (o.value == best->value && o.bidder < best->bidder)) best = o;
      }
      if (!best) continue;
      const Bid& won = pending.at(best->bidder);
      b.send(u0, best->bidder, MessageKind::Award, {{"request", r->id}});
      net.reserve(best->bidder, best->satellite, won.delta());
      net.mark_served(r->id);
      b.next_round();

      b.drain(best->bidder);
      net.agent(best->bidder).award(won);
      if (!won.displaced.empty()) displacers.push_back(best->bidder);
    }
    net.refill(displacers);
  });
}

}  // namespace eoscsp

#include "eoscsp/sdcop.hpp"

#include <algorithm>

#include "agents.hpp"
#include "eoscsp/auction.hpp"

namespace eoscsp {

namespace {

struct Candidate {
  std::vector<Id> ids;
  double reward = 0.0;
};

std::vector<Candidate> displacement_sets(std::vector<std::pair<double, Id>> own) {
  std::sort(own.begin(), own.end());
  std::vector<Candidate> sets;
  for (std::size_t i = 0; i < own.size(); ++i) {
    sets.push_back({{own[i].second}, own[i].first});
    for (std::size_t j = i + 1; j < own.size(); ++j)
      sets.push_back({{own[i].second, own[j].second}, own[i].first + own[j].first});
  }
  Candidate prefix;
  for (std::size_t k = 0; k < own.size(); ++k) {
    prefix.ids.push_back(own[k].second);
    prefix.reward += own[k].first;
    if (k >= 2) sets.push_back(prefix);
  }
  for (auto& c : sets) std::sort(c.ids.begin(), c.ids.end());
  std::sort(sets.begin(), sets.end(), [](const Candidate& a, const Candidate& b) {
    if (a.reward != b.reward) return a.reward < b.reward;
    if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
    return a.ids < b.ids;
  });
  return sets;
}

}  // namespace

Revision revise(const Instance& p, const Id& user, const Schedule& plan, const Id& observation,
                std::optional<std::size_t> exclusive) {
  const Observation& o = p.observation(observation);
  const auto windows = domains(p, o, {DomainPolicy::Host, user, exclusive});
  if (windows.empty()) return {};

  const TrackSet tracks = detail::tracks_of(p, plan);
  auto fits = [&](const TrackSet& t) -> std::optional<double> {
    for (const auto& [sat, w] : windows)
      if (auto slot = t.scan(o, sat, w)) return slot->start;
    return std::nullopt;
  };
  if (auto start = fits(tracks)) return {0.0, {}, *start};

  std::vector<std::pair<double, Id>> own;
  for (const auto& e : tracks.track(o.satellite)) {
    if (e.observation.empty() || p.preallocated().contains(e.observation)) continue;
    const Observation& d = p.observation(e.observation);
    if (d.owner == user) own.emplace_back(d.reward, d.id);
  }
  for (const auto& c : displacement_sets(std::move(own))) {
    TrackSet without = tracks;
    for (const auto& d : c.ids) without.remove(d);
    if (auto start = fits(without)) return {c.reward, c.ids, *start};
  }
  return {};
}

double pi(const Instance& p, const Id& observation, const Schedule& plan, const Id& user) {
  return revise(p, user, plan, observation).cost;
}

RequestDcopContext make_context(const Instance& p, const Id& request, const std::map<Id, Schedule>& plans,
                                const std::map<Id, int>& residual_capacity) {
  RequestDcopContext ctx;
  ctx.request = request;
  const Request& r = p.request(request);
  for (const auto& [u, plan] : plans) {
    const User& user = p.user(u);
    for (const auto& oid : r.opportunities) {
      const Observation& o = p.observation(oid);
      for (std::size_t e = 0; e < user.exclusives.size(); ++e) {
        const Exclusive& ex = user.exclusives[e];
        if (ex.satellite != o.satellite || !ex.window.intersects(o.window)) continue;
        ctx.variables.push_back({u, e, oid, revise(p, u, plan, oid, e)});
        auto& obs = ctx.candidate_obs[u];
        if (obs.empty() || obs.back() != oid) obs.push_back(oid);
      }
    }
    if (ctx.candidate_obs.count(u)) ctx.eligible_agents.push_back(u);
  }
  for (const auto& v : ctx.variables) {
    const Id& s = p.observation(v.observation).satellite;
    auto it = residual_capacity.find(s);
    ctx.residual_capacity[s] = it == residual_capacity.end() ? p.residual_capacity(s) : it->second;
  }
  return ctx;
}

DcopProblem build_dcop(const Instance& p, const RequestDcopContext& ctx) {
  DcopProblem d;
  std::map<Id, std::vector<std::size_t>> by_satellite, by_observation;
  std::vector<std::size_t> all;
  for (const auto& v : ctx.variables) {
    const Observation& o = p.observation(v.observation);
    const std::size_t x =
        d.add_variable("x_" + v.user + "_" + std::to_string(v.exclusive) + "_" + v.observation, v.user, {0, 1});
    const double hosted = v.revision.feasible() ? v.revision.cost - o.reward : kHardCost;
    d.add_constraint(unary_constraint("c_" + std::to_string(x), x, {{0, 0.0}, {1, hosted}}));
    by_satellite[o.satellite].push_back(x);
    by_observation[o.id].push_back(x);
    all.push_back(x);
  }
  if (all.size() > 1) d.add_constraint(at_most_constraint("one_per_request", all, 1));
  for (const auto& [s, xs] : by_satellite) {
    const int kappa = std::max(0, ctx.residual_capacity.at(s));
    if (static_cast<int>(xs.size()) > kappa) d.add_constraint(at_most_constraint("capacity_" + s, xs, kappa));
  }
  for (const auto& [o, xs] : by_observation)
    if (xs.size() > 1) d.add_constraint(at_most_constraint("one_host_" + o, xs, 1));
  return d;
}

Schedule solve_sdcop(const Instance& p, MessageBus* bus, const SdcopOptions& options) {
  return detail::with_network(p, bus, [&](detail::Network& net) {
    net.local_phase();
    MessageBus& b = net.bus();
    const Id& u0 = net.planner();
    if (net.order().empty()) return;

    std::vector<Id> displacers;
    for (const Request* r : net.open_requests()) {
      std::vector<Id> eligible;
      for (const auto& u : net.order()) {
        const User& user = p.user(u);
        const bool any = std::any_of(r->opportunities.begin(), r->opportunities.end(), [&](const Id& oid) {
          const Observation& o = p.observation(oid);
          return std::any_of(user.exclusives.begin(), user.exclusives.end(), [&](const Exclusive& ex) {
            return ex.satellite == o.satellite && ex.window.intersects(o.window);
          });
        });
        if (any) eligible.push_back(u);
      }
      if (eligible.empty()) continue;

      const auto residual = net.residuals();
      for (const auto& u : eligible) {
        json res = json::object();
        for (const auto& s : net.agent(u).satellites()) res[s] = residual.at(s);
        b.send(u0, u, MessageKind::Announce,
               {{"request", detail::request_record(p, *r, net.agent(u).satellites())}, {"residual", res}});
      }
      b.next_round();

      // Each agent builds its own variables from the announce.
      std::map<Id, Schedule> plans;
      std::map<Id, int> kappa;
      for (const auto& u : eligible) {
        for (const auto& e : b.drain(u)) {
          for (const auto& [s, n] : detail::counts_from_json(e.body().at("residual"))) kappa[s] = n;
          plans[u] = net.agent(u).plan();
        }
      }
      const RequestDcopContext ctx = make_context(p, r->id, plans, kappa);
      const DcopProblem dcop = build_dcop(p, ctx);
      if (options.on_dcop) options.on_dcop(r->id, dcop);
      if (dcop.empty()) continue;
      const DcopSolution sol = solve_dpop(dcop, &b, options.dpop);
      if (!sol.feasible) continue;

      for (std::size_t x = 0; x < ctx.variables.size(); ++x) {
        if (sol.assignment[x] != 1) continue;
        const HostingVariable& v = ctx.variables[x];
        const Observation& o = p.observation(v.observation);
        detail::Agent& agent = net.agent(v.user);
        agent.set_plan(
            merge_award(p, v.user, agent.plan(), {o.id, o.satellite, v.revision.start}, v.revision.displaced));
        if (!v.revision.displaced.empty()) displacers.push_back(v.user);
        b.send(v.user, u0, MessageKind::PlanReport,
               {{"request", r->id}, {"counts", detail::counts_to_json(agent.counts())}});
        b.next_round();
        for (const auto& e : b.drain(u0)) {
          net.set_counts(e.from, detail::counts_from_json(e.body().at("counts")));
          net.mark_served(e.body().at("request").get<Id>());
        }
        break;
      }
    }
    net.refill(displacers);
  });
}

}  // namespace eoscsp

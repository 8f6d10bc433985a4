#include <algorithm>

#include "agents.hpp"
#include "eoscsp/auction.hpp"

namespace eoscsp {

using detail::Counts;
using detail::Network;

namespace {

struct BundleItem {
  Id request;
  double value;  // diminishing-marginal-gain capped bid
  Bid bid;
};

struct CbbaAgent {
  bool active = false;
  std::vector<Id> candidates;  // due-date order
  std::vector<Id> neighbours;
  Counts allowance;
  std::vector<BundleItem> bundle;
  std::vector<Schedule> before;  // plan preceding each bundle item
  std::map<Id, double> y;
  std::map<Id, Id> z;
  std::map<Id, std::size_t> stamps;
  json last_sent;

  double bid_of(const Id& r) const { return y.count(r) ? y.at(r) : 0.0; }
  Id winner_of(const Id& r) const { return z.count(r) ? z.at(r) : Id{}; }

  json winners() const {
    json w = json::object();
    for (const auto& r : candidates)
      if (!winner_of(r).empty()) w[r] = {winner_of(r), bid_of(r)};
    return w;
  }
};

/// Conflict resolution for one item, receiver i, sender k.
void resolve(CbbaAgent& st, const Id& i, const Id& k, const Id& r, const Id& zk, double yk,
             const std::map<Id, std::size_t>& sk) {
  const Id zi = st.winner_of(r);
  const double yi = st.bid_of(r);
  auto stamp = [](const std::map<Id, std::size_t>& s, const Id& m) -> long long {
    auto it = s.find(m);
    return it == s.end() ? -1 : static_cast<long long>(it->second);
  };
  auto newer = [&](const Id& m) { return stamp(sk, m) > stamp(st.stamps, m); };
  const bool outbids = yk > yi || (yk == yi && zk < zi);
  auto update = [&] {
    st.y[r] = yk;
    st.z[r] = zk;
  };
  auto reset = [&] {
    st.y[r] = 0.0;
    st.z[r].clear();
  };

  if (zk == k) {
    if (zi == i) {
      if (outbids) update();
    } else if (zi == k || zi.empty()) {
      update();
    } else if (newer(zi) || outbids) {
      update();
    }
  } else if (zk == i) {
    if (zi == k) {
      reset();
    } else if (!zi.empty() && zi != i && newer(zi)) {
      reset();
    }
  } else if (!zk.empty()) {
    const Id& m = zk;
    if (zi == i) {
      if (newer(m) && outbids) update();
    } else if (zi == k) {
      if (newer(m)) update();
      else reset();
    } else if (zi == m) {
      if (newer(m)) update();
    } else if (zi.empty()) {
      if (newer(m)) update();
    } else {
      const Id& n = zi;
      if (newer(m) && newer(n)) update();
      else if (newer(m) && outbids) update();
      else if (newer(n) && stamp(st.stamps, m) > stamp(sk, m)) reset();
    }
  } else {
    if (zi == k) {
      update();
    } else if (!zi.empty() && zi != i && newer(zi)) {
      update();
    }
  }
}

}  // namespace

Schedule solve_cbba(const Instance& p, MessageBus* bus, const CbbaOptions& options) {
  return detail::with_network(p, bus, [&](Network& net) {
    net.local_phase();
    MessageBus& b = net.bus();
    const Id& u0 = net.planner();
    const auto requests = net.open_requests();
    if (requests.empty() || net.order().empty()) return;

    // Candidate hosts per request: a non-empty exclusive domain for some opportunity.
    std::map<Id, std::vector<const Request*>> interests;
    std::map<Id, std::set<Id>> hosts;
    for (const Request* r : requests) {
      for (const auto& u : net.order()) {
        const bool hostable = std::any_of(r->opportunities.begin(), r->opportunities.end(), [&](const Id& oid) {
          return !domains(p, p.observation(oid), {DomainPolicy::Host, u, std::nullopt}).empty();
        });
        if (hostable) {
          interests[u].push_back(r);
          hosts[r->id].insert(u);
        }
      }
    }
    const Counts residual = net.residuals();
    std::vector<Id> bidders;
    for (const auto& u : net.order()) {
      auto it = interests.find(u);
      if (it == interests.end()) continue;
      std::set<Id> neighbours;
      json records = json::array();
      for (const Request* r : it->second) {
        records.push_back(detail::request_record(p, *r, net.agent(u).satellites()));
        neighbours.insert(hosts[r->id].begin(), hosts[r->id].end());
      }
      neighbours.erase(u);
      json res = json::object();
      for (const auto& s : net.agent(u).satellites()) res[s] = residual.at(s);
      b.send(u0, u, MessageKind::Announce, {{"requests", records}, {"residual", res}, {"neighbours", neighbours}});
      bidders.push_back(u);
    }
    b.next_round();

    std::map<Id, CbbaAgent> state;
    auto step = [&](const Id& me, const std::vector<Envelope>& inbox, MessageBus& bus) {
      CbbaAgent& st = state[me];
      detail::Agent& agent = net.agent(me);
      for (const auto& e : inbox) {
        const json body = e.body();
        if (e.kind == MessageKind::Announce) {
          st.active = true;
          for (const auto& rec : body.at("requests")) st.candidates.push_back(rec.at("id").get<Id>());
          st.neighbours = body.at("neighbours").get<std::vector<Id>>();
          for (const auto& s : agent.satellites()) st.allowance[s] = agent.count(s) + std::max(0, body.at("residual").value(s, 0));
          continue;
        }
        if (e.kind != MessageKind::BundleState) continue;
        const auto sk = body.at("stamps").get<std::map<Id, std::size_t>>();
        const json& wk = body.at("winners");
        for (const auto& r : st.candidates) {
          Id zk;
          double yk = 0.0;
          if (auto it = wk.find(r); it != wk.end()) {
            zk = (*it)[0].get<Id>();
            yk = (*it)[1].get<double>();
          }
          resolve(st, me, e.from, r, zk, yk, sk);
        }
        st.stamps[e.from] = e.round;
        for (const auto& [m, t] : sk)
          if (m != me) st.stamps[m] = std::max(st.stamps[m], t);
      }
      if (!st.active) return;

      // Outbid: drop that item and everything added after it.
      for (std::size_t n = 0; n < st.bundle.size(); ++n) {
        if (st.winner_of(st.bundle[n].request) == me) continue;
        for (std::size_t later = n + 1; later < st.bundle.size(); ++later) {
          const Id& r = st.bundle[later].request;
          if (st.winner_of(r) == me) {
            st.y[r] = 0.0;
            st.z[r].clear();
          }
        }
        agent.set_plan(st.before[n]);
        st.bundle.resize(n);
        st.before.resize(n);
        break;
      }

      for (;;) {
        std::optional<BundleItem> best;
        for (const auto& r : st.candidates) {
          if (std::any_of(st.bundle.begin(), st.bundle.end(), [&](const BundleItem& it) { return it.request == r; }))
            continue;
          auto bd = agent.bid(r, st.allowance);
          if (!bd) continue;
          const double h = st.bundle.empty() ? bd->value : std::min(bd->value, st.bundle.back().value);
          const double yr = st.bid_of(r);
          const Id zr = st.winner_of(r);
          if (!(h > yr || (h == yr && (zr.empty() || me < zr)))) continue;
          if (!best || h > best->value) best = BundleItem{r, h, std::move(*bd)};
        }
        if (!best) break;
        st.before.push_back(agent.plan());
        agent.award(best->bid);
        st.y[best->request] = best->value;
        st.z[best->request] = me;
        st.bundle.push_back(std::move(*best));
      }

      json w = st.winners();
      if (w != st.last_sent) {
        st.stamps[me] = bus.round();
        json stamps = json::object();
        for (const auto& [m, t] : st.stamps) stamps[m] = t;
        for (const auto& k : st.neighbours)
          bus.send(me, k, MessageKind::BundleState, {{"winners", w}, {"stamps", stamps}});
        st.last_sent = std::move(w);
      }
    };
    run_rounds(b, bidders, step, options.max_rounds);

    // Capacity arbitration over the converged winners.
    for (const auto& u : bidders) {
      const CbbaAgent& st = state[u];
      if (st.bundle.empty()) continue;
      json wins = json::array();
      for (const auto& it : st.bundle)
        wins.push_back({{"request", it.request},
                        {"value", it.value},
                        {"satellite", it.bid.placement.satellite},
                        {"delta", it.bid.delta()}});
      b.send(u, u0, MessageKind::PlanReport, {{"wins", wins}});
    }
    b.next_round();

    struct Win {
      Id user, request, satellite;
      double value;
      int delta;
    };
    std::vector<Win> wins;
    for (const auto& e : b.drain(u0)) {
      const json body = e.body();
      for (const auto& w : body.at("wins"))
        wins.push_back({e.from, w.at("request").get<Id>(), w.at("satellite").get<Id>(), w.at("value").get<double>(),
                        w.at("delta").get<int>()});
    }
    std::stable_sort(wins.begin(), wins.end(), [](const Win& a, const Win& c) {
      if (a.value != c.value) return a.value > c.value;
      return std::tie(a.request, a.user) < std::tie(c.request, c.user);
    });
    Counts left = net.residuals();
    std::map<Id, std::pair<json, json>> verdicts;
    for (const Win& w : wins) {
      auto& [acc, rej] = verdicts[w.user];
      if (acc.is_null()) acc = json::array();
      if (rej.is_null()) rej = json::array();
      if (!net.served(w.request) && left[w.satellite] >= w.delta) {
        left[w.satellite] -= w.delta;
        net.reserve(w.user, w.satellite, w.delta);
        net.mark_served(w.request);
        acc.push_back(w.request);
      } else {
        rej.push_back(w.request);
      }
    }
    for (const auto& [u, v] : verdicts)
      b.send(u0, u, MessageKind::Award, {{"accepted", v.first}, {"rejected", v.second}});
    b.next_round();

    std::vector<Id> displacers;
    for (const auto& [u, v] : verdicts) {
      detail::Agent& agent = net.agent(u);
      for (const auto& e : b.drain(u)) {
        const json body = e.body();
        const std::set<Id> rejected = body.at("rejected").get<std::set<Id>>();
        for (const auto& it : state[u].bundle) {
          if (!it.bid.displaced.empty()) displacers.push_back(u);
          if (rejected.count(it.request)) agent.drop(it.bid.placement.observation);
        }
      }
    }
    net.refill(displacers);
  });
}

}  // namespace eoscsp

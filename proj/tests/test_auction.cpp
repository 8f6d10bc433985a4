#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "eoscsp/auction.hpp"
#include "eoscsp/greedy.hpp"
#include "eoscsp/instance_gen.hpp"
#include "eoscsp/io.hpp"
#include "fixtures.hpp"

using namespace eoscsp;
using fixtures::build;
using fixtures::obs;
using fixtures::sat;

namespace {

std::size_t kind_count(const MessageBus& bus, MessageKind k) {
  const auto& m = bus.metrics().count_by_kind;
  return m.count(k) ? m.at(k) : 0;
}

/// One host u_1 with an exclusive on s_0; u_2 only has an exclusive on s_1.
Instance hosting() {
  return build({sat("s_0", 4), sat("s_1", 4)},
               {{"u_0", {}, 2}, {"u_1", {{"s_0", {10, 30}}}, 1}, {"u_2", {{"s_1", {10, 30}}}, 1}},
               {obs("o_0_0_0", "r_0_0", "u_0", "s_0", {12, 25}, 5, 3, 2)});
}

/// u_1's exclusive holds either its own 2-reward observation or the central 5-reward one.
Instance displacement() {
  return build({sat("s_0", 4)}, {{"u_0", {}, 2}, {"u_1", {{"s_0", {10, 20}}}, 1}},
               {obs("o_1_0_0", "r_1_0", "u_1", "s_0", {10, 20}, 8, 2, 1),
                obs("o_0_0_0", "r_0_0", "u_0", "s_0", {10, 20}, 8, 5, 2)});
}

Instance single_bidder(std::uint64_t seed) {
  GenerationParams g = conflicting_preset(0);
  g.seed = seed;
  g.exclusive_user_count = 1;
  g.central_request_count = {6, 6};
  return generate(g);
}

std::set<Id> own_observations(const Instance& p) {
  std::set<Id> out;
  for (const auto& o : p.observations())
    if (p.user(o.owner).has_exclusives()) out.insert(o.id);
  return out;
}

using Solver = Schedule (*)(const Instance&, MessageBus*);
Schedule run_cbba(const Instance& p, MessageBus* bus) { return solve_cbba(p, bus); }
const std::vector<std::pair<const char*, Solver>> kSolvers{
    {"psi", solve_psi}, {"ssi", solve_ssi}, {"cbba", run_cbba}};

}  // namespace

TEST_CASE("bid") {
  SUBCASE("empty plan, one window") {
    const Instance p = hosting();
    auto b = bid(p, "u_1", {}, "r_0_0");
    REQUIRE(b);
    CHECK(b->value == 3);
    CHECK(b->placement == Placement{"o_0_0_0", "s_0", 12});
    CHECK(b->displaced.empty());
    CHECK(b->delta() == 1);
  }
  SUBCASE("exclusive on the wrong satellite") {
    CHECK_FALSE(bid(hosting(), "u_2", {}, "r_0_0"));
  }
  SUBCASE("no residual capacity") {
    CHECK_FALSE(bid(hosting(), "u_1", {}, "r_0_0", {{"s_0", 0}}));
  }
  SUBCASE("displacing a cheaper own observation") {
    const Instance p = displacement();
    Schedule plan;
    plan.entries["o_1_0_0"] = 10;
    auto b = bid(p, "u_1", plan, "r_0_0");
    REQUIRE(b);
    CHECK(b->value == 3);
    CHECK(b->displaced == std::vector<Id>{"o_1_0_0"});
    CHECK(b->delta() == 0);
    // Exhaustive check: keeping o_1_0_0 leaves no start for the central observation.
    for (double t = 10; t <= 12; t += 0.25) {
      Schedule both = plan;
      both.entries["o_0_0_0"] = t;
      both.grants.insert({"o_0_0_0", "u_1"});
      CHECK_FALSE(validate_schedule(p, both).ok());
    }
  }
  SUBCASE("preallocated entries are never displaced") {
    Schedule pre;
    pre.entries["o_1_0_0"] = 10;
    const Instance p = with_preallocation(displacement(), pre);
    CHECK_FALSE(bid(p, "u_1", pre, "r_0_0"));
  }
  SUBCASE("served request") {
    Schedule plan;
    plan.entries["o_0_0_0"] = 12;
    CHECK_FALSE(bid(hosting(), "u_1", plan, "r_0_0"));
  }
}

TEST_CASE("merge_award") {
  SUBCASE("plain insertion") {
    const Instance p = hosting();
    const Schedule m = merge_award(p, "u_1", {}, {"o_0_0_0", "s_0", 12}, {});
    CHECK(m.entries.at("o_0_0_0") == 12);
    CHECK(m.grants.count({"o_0_0_0", "u_1"}));
    CHECK(validate_schedule(p, m).ok());
  }
  SUBCASE("net reward after displacement") {
    const Instance p = displacement();
    Schedule plan;
    plan.entries["o_1_0_0"] = 10;
    const Schedule m = merge_award(p, "u_1", plan, {"o_0_0_0", "s_0", 10}, {"o_1_0_0"});
    CHECK(total_reward(p, m) - total_reward(p, plan) == 3);
    CHECK(validate_schedule(p, m).ok());
  }
  SUBCASE("inconsistent awards") {
    const Instance p = displacement();
    Schedule plan;
    plan.entries["o_1_0_0"] = 10;
    CHECK_THROWS_AS(merge_award(p, "u_1", plan, {"o_0_0_0", "s_0", 10}, {}), AwardError);
    CHECK_THROWS_AS(merge_award(p, "u_1", plan, {"o_0_0_0", "s_0", 30}, {"o_1_0_0"}), AwardError);
    CHECK_THROWS_AS(merge_award(p, "u_1", plan, {"o_0_0_0", "s_1", 10}, {"o_1_0_0"}), AwardError);
    CHECK_THROWS_AS(merge_award(p, "u_1", plan, {"o_0_0_0", "s_0", 10}, {"o_0_0_0"}), AwardError);
    CHECK_THROWS_AS(merge_award(p, "u_1", {}, {"o_0_0_0", "s_0", 10}, {"o_1_0_0"}), AwardError);
    CHECK_THROWS_AS(merge_award(p, "u_1", plan, {"zz", "s_0", 10}, {}), AwardError);
  }
  SUBCASE("every bid merges into a valid plan") {
    std::size_t merged = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const Instance p = fixtures::tiny(seed, 12);
      for (const User* u : p.exclusive_users()) {
        Schedule plan = solve_greedy(restrict_to_user(p, u->id));
        for (const Request* r : p.open_requests()) {
          if (p.user(r->owner).has_exclusives()) continue;
          auto b = bid(p, u->id, plan, r->id);
          if (!b) continue;
          const Schedule m = merge_award(p, u->id, plan, b->placement, b->displaced);
          CHECK(validate_schedule(p, m).ok());
          CHECK(total_reward(p, m) - total_reward(p, plan) == doctest::Approx(b->value));
          ++merged;
        }
      }
    }
    CHECK(merged > 20);
  }
}

TEST_CASE("no exclusive users reduces to greedy") {
  const Instance p = build({sat("s_0", 2)}, {{"u_0", {}, 2}},
                           {obs("o_0_0_0", "r_0_0", "u_0", "s_0", {0, 20}, 5, 3, 2),
                            obs("o_0_1_0", "r_0_1", "u_0", "s_0", {0, 20}, 5, 2, 2),
                            obs("o_0_2_0", "r_0_2", "u_0", "s_0", {0, 20}, 5, 1, 2)});
  const Schedule g = solve_greedy(p);
  CHECK(g.size() == 2);
  for (const auto& [name, solve] : kSolvers) {
    CAPTURE(name);
    CHECK(solve(p, nullptr) == g);
  }
}

TEST_CASE("single bidder: psi equals ssi") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance p = single_bidder(seed);
    MessageBus psi_bus, ssi_bus;
    const Schedule a = solve_psi(p, &psi_bus);
    const Schedule b = solve_ssi(p, &ssi_bus);
    CHECK(a == b);
    CHECK(validate_schedule(p, a).ok());
    // One announce, one bid and one award carry each request.
    CHECK(kind_count(psi_bus, MessageKind::Announce) == 1);
    CHECK(kind_count(psi_bus, MessageKind::Bid) <= 1);
    CHECK(kind_count(psi_bus, MessageKind::Award) <= 1);
    const auto& trace = psi_bus.trace();
    std::map<Id, int> announced, bid_on, awarded;
    for (const auto& e : trace) {
      const json body = e.body();
      if (e.kind == MessageKind::Announce)
        for (const auto& r : body.at("requests")) announced[r.at("id")]++;
      if (e.kind == MessageKind::Bid)
        for (const auto& bd : body.at("bids")) bid_on[bd.at("request")]++;
      if (e.kind == MessageKind::Award)
        for (const auto& r : body.at("requests")) awarded[r.get<Id>()]++;
    }
    for (const auto& [r, n] : announced) CHECK(n == 1);
    for (const auto& [r, n] : bid_on) CHECK(n == 1);
    for (const auto& [r, n] : awarded) CHECK(n == 1);
  }
}

TEST_CASE("ssi announces in due-date order") {
  // One exclusive slot; both central requests fit it but not together.
  const Instance p = build({sat("s_0", 4)}, {{"u_0", {}, 2}, {"u_1", {{"s_0", {0, 10}}}, 1}},
                           {obs("o_0_0_0", "r_0_0", "u_0", "s_0", {2, 20}, 6, 5, 2),
                            obs("o_0_1_0", "r_0_1", "u_0", "s_0", {2, 10}, 6, 1, 2)});
  MessageBus bus;
  const Schedule m = solve_ssi(p, &bus);
  CHECK(validate_schedule(p, m).ok());
  CHECK(m.grants.count({"o_0_1_0", "u_1"}));
  CHECK(m.entries.at("o_0_1_0") == 2);
  CHECK(m.entries.at("o_0_0_0") >= 11);  // residual pass, outside the exclusive plus guard

  std::vector<Id> order;
  for (const auto& e : bus.trace())
    if (e.kind == MessageKind::Announce) order.push_back(e.body().at("request").at("id"));
  CHECK(order == std::vector<Id>{"r_0_1", "r_0_0"});
}

TEST_CASE("ssi message count per request") {
  const Instance p = fixtures::constellation();
  MessageBus bus;
  const Schedule m = solve_ssi(p, &bus);
  CHECK(validate_schedule(p, m).ok());
  // Per announced request: one announce to each exclusive user, one bid per
  // bidder, one award.
  std::map<Id, std::size_t> announces, bids, awards;
  for (const auto& e : bus.trace()) {
    const json body = e.body();
    if (e.kind == MessageKind::Announce) announces[body.at("request").at("id")]++;
    if (e.kind == MessageKind::Bid) bids[body.at("request")]++;
    if (e.kind == MessageKind::Award) awards[body.at("request")]++;
  }
  CHECK(announces.size() == 2);
  for (const auto& [r, n] : announces) {
    CHECK(n == 2);
    CHECK(awards[r] == (bids[r] > 0 ? 1u : 0u));
  }
  CHECK(bids["r_0_0"] == 1);
  CHECK(m.grants.count({"o_0_0_0", "u_1"}));
}

TEST_CASE("psi and ssi agree without conflicts") {
  const Instance p = fixtures::constellation();
  CHECK(total_reward(p, solve_psi(p)) == total_reward(p, solve_ssi(p)));
  CHECK(total_reward(p, solve_psi(p)) == 95);
}

TEST_CASE("cbba") {
  SUBCASE("one bidder takes every feasible request") {
    const Instance p = build({sat("s_0", 8)}, {{"u_0", {}, 2}, {"u_1", {{"s_0", {0, 100}}}, 1}},
                             {obs("o_0_0_0", "r_0_0", "u_0", "s_0", {0, 30}, 5, 3, 2),
                              obs("o_0_1_0", "r_0_1", "u_0", "s_0", {0, 30}, 5, 2, 2),
                              obs("o_0_2_0", "r_0_2", "u_0", "s_0", {40, 60}, 5, 1, 2)});
    MessageBus bus;
    const Schedule m = solve_cbba(p, &bus);
    CHECK(validate_schedule(p, m).ok());
    CHECK(m.grants.size() == 3);
    CHECK(kind_count(bus, MessageKind::BundleState) == 0);
  }
  SUBCASE("outbid items and everything after them are released") {
    // u_1 values r_a at 7; u_2 values r_a at 4, r_b at 3, r_c at 2.
    std::vector<Observation> o{
        obs("o_a_1", "r_a", "u_0", "s_0", {0, 30}, 5, 7, 2),  obs("o_a_2", "r_a", "u_0", "s_1", {0, 30}, 5, 4, 2),
        obs("o_b_2", "r_b", "u_0", "s_1", {0, 60}, 5, 3, 2),  obs("o_c_2", "r_c", "u_0", "s_1", {0, 60}, 5, 2, 2),
    };
    const Instance p = build({sat("s_0", 8), sat("s_1", 8)},
                             {{"u_0", {}, 2}, {"u_1", {{"s_0", {0, 40}}}, 1}, {"u_2", {{"s_1", {0, 40}}}, 1}}, o);
    MessageBus bus;
    const Schedule m = solve_cbba(p, &bus);
    CHECK(validate_schedule(p, m).ok());
    CHECK(m.grants.count({"o_a_1", "u_1"}));
    CHECK(m.grants.count({"o_b_2", "u_2"}));
    CHECK(m.grants.count({"o_c_2", "u_2"}));
    CHECK_FALSE(m.contains("o_a_2"));

    std::vector<json> from_u2;
    for (const auto& e : bus.trace())
      if (e.kind == MessageKind::BundleState && e.from == "u_2") from_u2.push_back(e.body().at("winners"));
    REQUIRE(from_u2.size() >= 2);
    CHECK(from_u2.front().at("r_a")[0] == "u_2");
    CHECK(from_u2.front().at("r_b")[1] == 3);
    CHECK(from_u2.front().at("r_c")[1] == 2);
    CHECK(from_u2.back().at("r_a")[0] == "u_1");

    MessageBus capped;
    CHECK_THROWS_AS(solve_cbba(p, &capped, {.max_rounds = 1}), ProtocolError);
  }
  SUBCASE("disjoint neighbourhoods exchange nothing") {
    const Instance p = build({sat("s_0", 8), sat("s_1", 8)},
                             {{"u_0", {}, 2}, {"u_1", {{"s_0", {0, 40}}}, 1}, {"u_2", {{"s_1", {0, 40}}}, 1}},
                             {obs("o_0_0_0", "r_0_0", "u_0", "s_0", {0, 30}, 5, 3, 2),
                              obs("o_0_1_0", "r_0_1", "u_0", "s_1", {0, 30}, 5, 3, 2)});
    MessageBus bus;
    const Schedule m = solve_cbba(p, &bus);
    CHECK(m.grants.size() == 2);
    for (const auto& e : bus.trace()) {
      const bool cross = (e.from == "u_1" && e.to == "u_2") || (e.from == "u_2" && e.to == "u_1");
      CHECK_FALSE(cross);
    }
  }
}

TEST_CASE("valid schedules, unique winners, no leaked plans") {
  for (int scale = 0; scale <= 1; ++scale) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      GenerationParams g = conflicting_preset(scale);
      g.seed = seed;
      const Instance p = generate(g);
      const std::set<Id> own = own_observations(p);
      for (const auto& [name, solve] : kSolvers) {
        CAPTURE(name);
        CAPTURE(seed);
        MessageBus bus;
        const Schedule m = solve(p, &bus);
        const Verdict v = validate_schedule(p, m);
        CHECK_MESSAGE(v.ok(), v.summary());
        for (const auto& e : bus.trace())
          for (const auto& o : own) CHECK(e.payload.find('"' + o + '"') == std::string::npos);
      }
    }
  }
}

TEST_CASE("distributed runs are deterministic") {
  GenerationParams g = conflicting_preset(1);
  g.seed = 3;
  const Instance p = generate(g);
  for (const auto& [name, solve] : kSolvers) {
    MessageBus a, b;
    const Schedule x = solve(p, &a);
    const Schedule y = solve(p, &b);
    CHECK(to_json(x).dump() == to_json(y).dump());
    CHECK(a.trace_hash() == b.trace_hash());
  }
}

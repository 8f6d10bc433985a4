#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "eoscsp/runtime.hpp"

using namespace eoscsp;

namespace {

MessageBus bus_with(std::initializer_list<const char*> agents) {
  MessageBus bus;
  for (const char* a : agents) bus.register_agent(a);
  return bus;
}

}  // namespace

TEST_CASE("one message of 100 bytes") {
  MessageBus bus = bus_with({"a", "b"});
  const std::string text(100 - 2, 'x');  // quotes make 100 bytes of JSON
  bus.send("a", "b", MessageKind::Bid, json(text));
  CHECK(bus.metrics().message_count == 1);
  CHECK(bus.metrics().message_bytes == 100);
  CHECK(bus.trace().at(0).size == bus.trace().at(0).payload.size());
  CHECK(bus.metrics().count_by_kind.at(MessageKind::Bid) == 1);
}

TEST_CASE("broadcast fans out") {
  MessageBus bus = bus_with({"a", "b", "c", "d"});
  CHECK(bus.broadcast("a", {"b", "c", "d"}, MessageKind::Announce, {{"k", 1}}) == 3);
  CHECK(bus.metrics().message_count == 3);
  CHECK(bus.metrics().message_bytes == 3 * json({{"k", 1}}).dump().size());
}

TEST_CASE("unknown endpoints are rejected") {
  MessageBus bus = bus_with({"a"});
  CHECK_THROWS_AS(bus.send("a", "zz", MessageKind::Bid, json::object()), ProtocolError);
  CHECK_THROWS_AS(bus.send("zz", "a", MessageKind::Bid, json::object()), ProtocolError);
  CHECK_THROWS_AS(bus.drain("zz"), ProtocolError);
  CHECK(bus.metrics().message_count == 0);
}

TEST_CASE("delivery waits a round and is ordered by round, sender, send order") {
  MessageBus bus = bus_with({"a", "b", "c"});
  bus.send("c", "a", MessageKind::Bid, 1);
  bus.send("b", "a", MessageKind::Bid, 2);
  bus.send("b", "a", MessageKind::Bid, 3);
  CHECK(bus.drain("a").empty());
  bus.next_round();
  bus.send("b", "a", MessageKind::Bid, 4);
  auto got = bus.drain("a");
  REQUIRE(got.size() == 3);
  CHECK(got[0].payload == "2");
  CHECK(got[1].payload == "3");
  CHECK(got[2].payload == "1");
  CHECK_FALSE(bus.idle());
  bus.next_round();
  CHECK(bus.drain("a").at(0).payload == "4");
  CHECK(bus.idle());
}

TEST_CASE("run_rounds") {
  SUBCASE("zero agents") {
    MessageBus bus;
    CHECK(run_rounds(bus, {}, [](const Id&, const std::vector<Envelope>&, MessageBus&) {}) == 0);
  }
  SUBCASE("token passing stops after a silent round") {
    MessageBus bus = bus_with({"a", "b"});
    int hops = 0;
    bus.send("a", "b", MessageKind::BundleState, 0);
    bus.next_round();
    auto step = [&](const Id& me, const std::vector<Envelope>& inbox, MessageBus& b) {
      for (const auto& e : inbox) {
        const int n = e.body().get<int>();
        ++hops;
        if (n < 4) b.send(me, e.from, MessageKind::BundleState, n + 1);
      }
    };
    CHECK(run_rounds(bus, {"b", "a"}, step) == 5);
    CHECK(hops == 5);
    CHECK(bus.metrics().message_count == 5);
  }
  SUBCASE("round cap") {
    MessageBus bus = bus_with({"a"});
    auto chatter = [](const Id& me, const std::vector<Envelope>&, MessageBus& b) {
      b.send(me, me, MessageKind::BundleState, 0);
    };
    CHECK_THROWS_AS(run_rounds(bus, {"a"}, chatter, 10), ProtocolError);
  }
  SUBCASE("unregistered agent") {
    MessageBus bus;
    CHECK_THROWS_AS(run_rounds(bus, {"x"}, [](const Id&, const std::vector<Envelope>&, MessageBus&) {}),
                    ProtocolError);
  }
}

TEST_CASE("metrics equal the sum over the trace; hash is deterministic") {
  auto run = [] {
    MessageBus bus = bus_with({"a", "b", "c"});
    for (int i = 0; i < 20; ++i) {
      bus.send(i % 2 ? "a" : "b", "c", static_cast<MessageKind>(i % 7), {{"i", i}, {"s", std::string(i, 'z')}});
      if (i % 5 == 0) bus.next_round();
    }
    return bus;
  };
  MessageBus one = run();
  MessageBus two = run();
  std::size_t bytes = 0;
  for (const auto& e : one.trace()) bytes += e.size;
  CHECK(bytes == one.metrics().message_bytes);
  CHECK(one.trace().size() == one.metrics().message_count);
  CHECK(one.trace_hash() == two.trace_hash());
  CHECK(one.trace_jsonl() == two.trace_jsonl());

  MessageBus three = run();
  three.send("a", "b", MessageKind::Bid, 0);
  CHECK(three.trace_hash() != one.trace_hash());
}

TEST_CASE("trace jsonl and csv") {
  MessageBus bus = bus_with({"a", "b"});
  bus.send("a", "b", MessageKind::DcopUtil, {{"x", 1}});
  const json line = json::parse(bus.trace_jsonl());
  CHECK(line.at("kind") == "dcop-util");
  CHECK(line.at("payload").at("x") == 1);
  CHECK(metrics_csv_header() == "algorithm,seed,n_observations,reward,time_s,msg_count,msg_bytes");
  MetricsLog m = bus.metrics();
  m.reward = 12.5;
  CHECK(metrics_csv_row("psi", 3, 40, m).rfind("psi,3,40,12.5,", 0) == 0);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

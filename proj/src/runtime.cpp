#include "eoscsp/runtime.hpp"

#include <algorithm>
#include <sstream>

namespace eoscsp {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Announce: return "announce";
    case MessageKind::Bid: return "bid";
    case MessageKind::Award: return "award";
    case MessageKind::BundleState: return "bundle-state";
    case MessageKind::DcopUtil: return "dcop-util";
    case MessageKind::DcopValue: return "dcop-value";
    case MessageKind::PlanReport: return "plan-report";
  }
  return "?";
}

void MessageBus::register_agent(const Id& agent) { inboxes_[agent]; }

std::vector<Id> MessageBus::agents() const {
  std::vector<Id> out;
  for (const auto& [id, box] : inboxes_) out.push_back(id);
  return out;
}

std::size_t MessageBus::send(const Id& from, const Id& to, MessageKind kind, const json& payload) {
  if (!has_agent(from)) throw ProtocolError("unknown sender '" + from + "'");
  auto it = inboxes_.find(to);
  if (it == inboxes_.end()) throw ProtocolError("unknown recipient '" + to + "'");
  Envelope e;
  e.from = from;
  e.to = to;
  e.kind = kind;
  e.payload = payload.dump();
  e.size = e.payload.size();
  e.round = round_;
  e.seq = seq_++;
  metrics_.message_count += 1;
  metrics_.message_bytes += e.size;
  metrics_.count_by_kind[kind] += 1;
  metrics_.bytes_by_kind[kind] += e.size;
  trace_.push_back(e);
  it->second.push_back(std::move(e));
  return trace_.back().seq;
}

std::size_t MessageBus::broadcast(const Id& from, const std::vector<Id>& recipients, MessageKind kind,
                                  const json& payload) {
  for (const auto& to : recipients) send(from, to, kind, payload);
  return recipients.size();
}

std::vector<Envelope> MessageBus::drain(const Id& agent) {
  auto it = inboxes_.find(agent);
  if (it == inboxes_.end()) throw ProtocolError("unknown agent '" + agent + "'");
  auto& box = it->second;
  std::vector<Envelope> ready, later;
  for (auto& e : box) (e.round < round_ ? ready : later).push_back(std::move(e));
  box = std::move(later);
  std::sort(ready.begin(), ready.end(), [](const Envelope& a, const Envelope& b) {
    return std::tie(a.round, a.from, a.seq) < std::tie(b.round, b.from, b.seq);
  });
  return ready;
}

bool MessageBus::idle() const {
  return std::all_of(inboxes_.begin(), inboxes_.end(), [](const auto& kv) { return kv.second.empty(); });
}

std::uint64_t fnv1a(const std::string& text, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t MessageBus::trace_hash() const {
  std::uint64_t h = fnv1a("");
  for (const auto& e : trace_) {
    h = fnv1a(std::to_string(e.round) + '|' + e.from + '|' + e.to + '|' + to_string(e.kind) + '|' + e.payload + '\n', h);
  }
  return h;
}

std::string MessageBus::trace_jsonl() const {
  std::string out;
  for (const auto& e : trace_) {
    json j = {{"round", e.round}, {"seq", e.seq},   {"from", e.from},
              {"to", e.to},       {"kind", to_string(e.kind)}, {"size", e.size}, {"payload", e.body()}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::size_t run_rounds(MessageBus& bus, const std::vector<Id>& agents, const StepFunction& step,
                       std::size_t max_rounds) {
  if (agents.empty()) return 0;
  std::vector<Id> order = agents;
  std::sort(order.begin(), order.end());
  for (const auto& a : order)
    if (!bus.has_agent(a)) throw ProtocolError("agent '" + a + "' is not registered");
  for (std::size_t r = 0; r < max_rounds; ++r) {
    const std::size_t before = bus.metrics().message_count;
    for (const auto& a : order) step(a, bus.drain(a), bus);
    bus.next_round();
    if (bus.metrics().message_count == before) return r + 1;
  }
  throw ProtocolError("no quiescence after " + std::to_string(max_rounds) + " rounds");
}

std::string metrics_csv_header() { return "algorithm,seed,n_observations,reward,time_s,msg_count,msg_bytes"; }

std::string metrics_csv_row(const std::string& algorithm, std::uint64_t seed, std::size_t n_observations,
                            const MetricsLog& m) {
  std::ostringstream out;
  out << algorithm << ',' << seed << ',' << n_observations << ',' << m.reward << ',' << m.wall_time << ','
      << m.message_count << ',' << m.message_bytes;
  return out.str();
}

}  // namespace eoscsp

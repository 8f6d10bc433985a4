#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "eoscsp/io.hpp"
#include "eoscsp/model.hpp"

namespace eoscsp {

enum class MessageKind { Announce, Bid, Award, BundleState, DcopUtil, DcopValue, PlanReport };

const char* to_string(MessageKind kind);

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Envelope {
  Id from;
  Id to;
  MessageKind kind = MessageKind::Announce;
  std::string payload;  // compact JSON
  std::size_t size = 0;
  std::size_t round = 0;
  std::size_t seq = 0;  // global send order

  json body() const { return json::parse(payload); }
};

struct MetricsLog {
  std::size_t message_count = 0;
  std::size_t message_bytes = 0;
  double wall_time = 0.0;
  double reward = 0.0;
  std::map<MessageKind, std::size_t> count_by_kind;
  std::map<MessageKind, std::size_t> bytes_by_kind;
};

/// Round-synchronous simulated network. Messages sent during round k are
/// delivered from round k + 1 on, per recipient in (round, sender, send
/// order) order. Every send is recorded in the trace and the metrics.
class MessageBus {
 public:
  void register_agent(const Id& agent);
  bool has_agent(const Id& agent) const { return inboxes_.count(agent) != 0; }
  std::vector<Id> agents() const;

  /// Throws ProtocolError when either end is unknown.
  std::size_t send(const Id& from, const Id& to, MessageKind kind, const json& payload);
  /// One point-to-point message per recipient.
  std::size_t broadcast(const Id& from, const std::vector<Id>& recipients, MessageKind kind, const json& payload);

  /// Messages for the agent sent in earlier rounds, removed from its inbox.
  std::vector<Envelope> drain(const Id& agent);
  void next_round() { ++round_; }
  std::size_t round() const { return round_; }
  /// True when no message awaits delivery.
  bool idle() const;

  const std::vector<Envelope>& trace() const { return trace_; }
  const MetricsLog& metrics() const { return metrics_; }
  MetricsLog& metrics() { return metrics_; }
  /// FNV-1a over (round, from, to, kind, payload) of every envelope.
  std::uint64_t trace_hash() const;
  /// One JSON object per line.
  std::string trace_jsonl() const;

 private:
  std::map<Id, std::vector<Envelope>> inboxes_;
  std::vector<Envelope> trace_;
  MetricsLog metrics_;
  std::size_t round_ = 0;
  std::size_t seq_ = 0;
};

/// Runs synchronous rounds: in each round every agent (ascending id)
/// receives its delivered inbox and may send. Stops after the first round
/// in which nothing was sent; returns the number of rounds executed.
/// Throws ProtocolError if the cap is reached first.
using StepFunction = std::function<void(const Id& agent, const std::vector<Envelope>& inbox, MessageBus& bus)>;
std::size_t run_rounds(MessageBus& bus, const std::vector<Id>& agents, const StepFunction& step,
                       std::size_t max_rounds = 1000);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Metrics CSV: algorithm, seed, n_observations, reward, time_s, msg_count, msg_bytes.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& algorithm, std::uint64_t seed, std::size_t n_observations,
                            const MetricsLog& metrics);

}  // namespace eoscsp

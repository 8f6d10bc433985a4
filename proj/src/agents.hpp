#pragma once

// Machinery shared by the distributed solvers. Each exclusive user keeps a
// private plan; the central planner keeps a capacity ledger fed by the
// users' per-satellite entry counts and runs the residual pass at the end.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "eoscsp/auction.hpp"
#include "eoscsp/greedy.hpp"
#include "eoscsp/runtime.hpp"

namespace eoscsp::detail {

using Counts = std::map<Id, int>;

json counts_to_json(const Counts& c);
Counts counts_from_json(const json& j);
/// Public description of a request: window, reward and the opportunities
/// whose satellite is listed in `satellites` (all when empty).
json request_record(const Instance& p, const Request& r, const std::set<Id>& satellites = {});
/// Opaque stand-in for a bidder's own observation on the wire.
std::string handle(const Id& user, const Id& observation);

TrackSet tracks_of(const Instance& p, const Schedule& plan);

class Agent {
 public:
  Agent(const Instance& p, const User& u, Schedule plan);

  const Id& id() const { return id_; }
  const Schedule& plan() const { return plan_; }
  void set_plan(Schedule plan) { plan_ = std::move(plan); }
  /// Satellites carrying at least one of the user's exclusives.
  const std::set<Id>& satellites() const { return satellites_; }

  int count(const Id& satellite) const;
  Counts counts() const;
  /// Capacity beyond the current entries, given an allowance (total number
  /// of entries the ledger lets this user hold per satellite).
  Residuals room(const Counts& allowance) const;

  /// Greedy insertion of the user's unserved own requests within the allowance.
  void fill(const Counts& allowance);
  bool has_unserved() const;

  std::optional<Bid> bid(const Id& request, const Counts& allowance) const;
  void award(const Bid& b);
  /// Unschedules a hosted foreign observation and its grant.
  void drop(const Id& observation);
  /// Hosted foreign entries, as {observation, start} records.
  json foreign() const;

 private:
  const Instance* p_;
  Id id_;
  Schedule plan_;
  std::set<Id> satellites_;
};

/// The whole simulated system: agents, central planner and ledger.
class Network {
 public:
  Network(const Instance& p, MessageBus& bus);

  const Instance& instance() const { return *p_; }
  MessageBus& bus() { return *bus_; }
  const Id& planner() const { return planner_; }
  /// Exclusive users in (priority, id) order.
  const std::vector<Id>& order() const { return order_; }
  Agent& agent(const Id& u) { return agents_.at(u); }
  const Agent& agent(const Id& u) const { return agents_.at(u); }

  /// Unreserved capacity on a satellite according to the ledger.
  int residual(const Id& satellite) const;
  Counts residuals() const;
  /// Entries user u may hold: its ledger share plus the residual.
  Counts allowance(const Id& u) const;
  /// Entries the ledger currently attributes to u (its satellites only).
  Counts share(const Id& u) const;
  void reserve(const Id& u, const Id& satellite, int units) { believed_[u][satellite] += units; }
  void set_counts(const Id& u, const Counts& c);

  /// Central requests not yet hosted, in due-date order.
  std::vector<const Request*> open_requests() const;
  void mark_served(const Id& request) { served_.insert(request); }
  bool served(const Id& request) const { return served_.count(request) != 0; }

  /// Sequential local solves against the ledger (two plan-reports per user).
  void local_phase();
  /// Local re-insertion for the given users (displaced own requests).
  void refill(const std::vector<Id>& users);
  /// Foreign-placement reports, residual pass outside exclusives, union.
  Schedule finish();

 private:
  void exchange(const Id& u);

  const Instance* p_;
  MessageBus* bus_;
  Id planner_;
  std::vector<Id> order_;
  std::map<Id, Agent> agents_;
  Schedule planner_fixed_;
  Counts fixed_outside_;
  std::map<Id, Counts> believed_;
  std::set<Id> served_;
};

/// Runs `body` on a network over the given bus (or a private one).
template <typename Body>
Schedule with_network(const Instance& p, MessageBus* bus, Body&& body) {
  MessageBus local;
  MessageBus& b = bus ? *bus : local;
  Network net(p, b);
  body(net);
  return net.finish();
}

}  // namespace eoscsp::detail

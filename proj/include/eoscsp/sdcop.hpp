#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "eoscsp/dcop.hpp"
#include "eoscsp/model.hpp"
#include "eoscsp/runtime.hpp"

namespace eoscsp {

/// Cheapest way for a user to make room for o inside one exclusive.
struct Revision {
  double cost = kHardCost;  // total displaced reward; kHardCost when o cannot be hosted
  std::vector<Id> displaced;
  double start = 0.0;

  bool feasible() const { return cost != kHardCost; }
};

/// Revision for inserting o into plan within exclusive `exclusive` of the
/// user (index into its exclusives; all of them when empty). Plain insertion
/// costs 0; otherwise displacement sets of the user's own observations on
/// the satellite are tried by ascending total reward (all sets of at most
/// two, plus every cheapest-k prefix) and the first that fits is kept.
Revision revise(const Instance& p, const Id& user, const Schedule& plan, const Id& observation,
                std::optional<std::size_t> exclusive = std::nullopt);

/// Revision cost of hosting o in u's plan (+inf when impossible).
double pi(const Instance& p, const Id& observation, const Schedule& plan, const Id& user);

struct HostingVariable {
  Id user;
  std::size_t exclusive = 0;
  Id observation;
  Revision revision;
};

struct RequestDcopContext {
  Id request;
  std::vector<Id> eligible_agents;
  std::map<Id, std::vector<Id>> candidate_obs;  // per agent
  std::map<Id, int> residual_capacity;          // per satellite
  std::vector<HostingVariable> variables;       // one per DCOP variable, same order
};

/// Eligible agents own an exclusive on s_o intersecting o's window for some
/// opportunity o of the request; plans holds each agent's current plan.
RequestDcopContext make_context(const Instance& p, const Id& request, const std::map<Id, Schedule>& plans,
                                const std::map<Id, int>& residual_capacity);

/// Binary hosting variables with unary costs pi - reward, at most one host
/// for the request, per-satellite residual capacity and at most one host
/// per observation. Empty when no agent is eligible.
DcopProblem build_dcop(const Instance& p, const RequestDcopContext& ctx);

struct SdcopOptions {
  DpopOptions dpop;
  /// Called with each per-request DCOP before it is solved.
  std::function<void(const Id& request, const DcopProblem&)> on_dcop;
};

/// Sequential per-request DCOP coordination among the exclusive users.
Schedule solve_sdcop(const Instance& p, MessageBus* bus = nullptr, const SdcopOptions& options = {});

}  // namespace eoscsp

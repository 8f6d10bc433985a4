#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "eoscsp/model.hpp"
#include "eoscsp/runtime.hpp"

namespace eoscsp {

struct Placement {
  Id observation;
  Id satellite;
  double start = 0.0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Bid {
  Id bidder;
  Id request;
  /// Reward gained minus reward of the displaced observations.
  double value = 0.0;
  Placement placement;
  std::vector<Id> displaced;  // bidder's own observations to unschedule
  double displaced_reward = 0.0;

  /// Net change in the bidder's entry count on the placement satellite.
  int delta() const { return 1 - static_cast<int>(displaced.size()); }
};

/// Bid from an award that does not fit the plan it is merged into.
class AwardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-satellite capacity available to a user beyond its current entries.
/// Satellites not listed default to capacity minus the plan's entries.
using Residuals = std::map<Id, int>;

/// Best positive-value way for exclusive user u to host request r in its
/// own exclusives: plain insertion (needs one unit of residual capacity),
/// or insertion after unscheduling one of u's own cheaper observations.
/// Ties: value, then less displaced reward, earlier start, observation id.
/// Returns nullopt (abstain) when nothing improves the plan.
std::optional<Bid> bid(const Instance& p, const Id& user, const Schedule& plan, const Id& request,
                       const Residuals& residual = {});

/// Removes the displaced entries and inserts the placement (with a grant
/// when the observation is foreign). Throws AwardError when the result
/// would not be a valid plan for u.
Schedule merge_award(const Instance& p, const Id& user, const Schedule& plan, const Placement& sigma,
                     const std::vector<Id>& displaced);

/// Parallel single-item auction. Without a bus an internal one is used.
Schedule solve_psi(const Instance& p, MessageBus* bus = nullptr);

/// Sequential single-item auction in due-date order.
Schedule solve_ssi(const Instance& p, MessageBus* bus = nullptr);

struct CbbaOptions {
  std::size_t max_rounds = 1000;
};

/// Consensus-based bundle auction among the candidate hosts of each request.
Schedule solve_cbba(const Instance& p, MessageBus* bus = nullptr, const CbbaOptions& options = {});

}  // namespace eoscsp

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace eoscsp {

using Id = std::string;

/// Absolute tolerance used by every time-feasibility comparison.
inline constexpr double kTimeEps = 1e-9;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool contains(const TimeWindow& other) const {
    return other.start >= start - kTimeEps && other.end <= end + kTimeEps;
  }
  /// Positive-length overlap (touching endpoints do not count).
  bool overlaps(const TimeWindow& other) const {
    return other.start < end - kTimeEps && start < other.end - kTimeEps;
  }
  /// Closed-interval intersection test.
  bool intersects(const TimeWindow& other) const {
    return other.start <= end + kTimeEps && start <= other.end + kTimeEps;
  }
  std::optional<TimeWindow> intersection(const TimeWindow& other) const;

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Pair-dependent transition times: a default plus explicit overrides.
struct TransitionTable {
  double default_time = 0.0;
  std::map<std::pair<Id, Id>, double> overrides;

  double operator()(const Id& from, const Id& to) const;
  /// Upper bound over all pairs; used when one side of a pair is unknown.
  double max_time() const;

  friend bool operator==(const TransitionTable&, const TransitionTable&) = default;
};

struct Satellite {
  Id id;
  TimeWindow horizon;
  int capacity = 0;
  TransitionTable transition;

  friend bool operator==(const Satellite&, const Satellite&) = default;
};

struct Exclusive {
  Id satellite;
  TimeWindow window;

  friend bool operator==(const Exclusive&, const Exclusive&) = default;
};

struct User {
  Id id;
  std::vector<Exclusive> exclusives;
  int priority = 1;

  bool has_exclusives() const { return !exclusives.empty(); }

  friend bool operator==(const User&, const User&) = default;
};

struct Position {
  double latitude = 0.0;
  double longitude = 0.0;
  double altitude = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct Request {
  Id id;
  TimeWindow window;
  double duration = 0.0;
  double reward = 0.0;
  Position position;
  Id owner;
  std::vector<Id> opportunities;

  friend bool operator==(const Request&, const Request&) = default;
};

struct Observation {
  Id id;
  TimeWindow window;
  double duration = 0.0;
  Id request;
  double reward = 0.0;
  Id satellite;
  Id owner;
  int priority = 1;

  /// Latest start that still completes inside the window.
  double latest_start() const { return window.end - duration; }
  TimeWindow occupied(double start) const { return {start, start + duration}; }

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// The mapping M (observation -> start time) plus the grants ledger: a pair
/// (o, v) records that exclusive owner v accepted foreign observation o
/// inside one of its windows.
struct Schedule {
  std::map<Id, double> entries;
  std::set<std::pair<Id, Id>> grants;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  bool contains(const Id& observation) const { return entries.count(observation) != 0; }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Immutable EOSCSP instance <S, U, R, O>. Collections are kept sorted by id
/// and every cross reference is checked on construction.
class Instance {
 public:
  Instance() = default;
  Instance(std::vector<Satellite> satellites, std::vector<User> users,
           std::vector<Request> requests, std::vector<Observation> observations,
           Schedule preallocated = {});

  const std::vector<Satellite>& satellites() const { return satellites_; }
  const std::vector<User>& users() const { return users_; }
  const std::vector<Request>& requests() const { return requests_; }
  const std::vector<Observation>& observations() const { return observations_; }
  /// Entries fixed by with_preallocation(); solvers keep them untouched.
  const Schedule& preallocated() const { return preallocated_; }

  const Satellite& satellite(const Id& id) const;
  const User& user(const Id& id) const;
  const Request& request(const Id& id) const;
  const Observation& observation(const Id& id) const;

  const Satellite* find_satellite(const Id& id) const;
  const User* find_user(const Id& id) const;
  const Request* find_request(const Id& id) const;
  const Observation* find_observation(const Id& id) const;

  std::size_t observation_index(const Id& id) const;

  /// U^ex, sorted by id.
  std::vector<const User*> exclusive_users() const;
  /// The single user without exclusives (u_0), or nullptr when absent.
  const User* central_planner() const;

  /// Requests not fulfilled by the preallocated entries, sorted by id.
  std::vector<const Request*> open_requests() const;
  /// kappa*_s: capacity minus preallocated entries on s.
  int residual_capacity(const Id& satellite) const;

  /// Exclusive windows of every user lying on the given satellite, as
  /// (owner, window) pairs sorted by window start.
  std::vector<std::pair<Id, TimeWindow>> exclusives_on(const Id& satellite) const;

  bool empty() const { return requests_.empty() && observations_.empty(); }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.satellites_ == b.satellites_ && a.users_ == b.users_ &&
           a.requests_ == b.requests_ && a.observations_ == b.observations_ &&
           a.preallocated_ == b.preallocated_;
  }

 private:
  void check_integrity() const;

  std::vector<Satellite> satellites_;
  std::vector<User> users_;
  std::vector<Request> requests_;
  std::vector<Observation> observations_;
  Schedule preallocated_;

  std::unordered_map<Id, std::size_t> satellite_index_;
  std::unordered_map<Id, std::size_t> user_index_;
  std::unordered_map<Id, std::size_t> request_index_;
  std::unordered_map<Id, std::size_t> observation_index_;
  std::unordered_map<Id, std::vector<std::pair<Id, TimeWindow>>> exclusives_by_satellite_;
};

// ---------------------------------------------------------------------------
// Sub-problem algebra
// ---------------------------------------------------------------------------

/// P[u]: requests and observations owned by u.
Instance restrict_to_user(const Instance& p, const Id& user);
/// P[r]: request r and its opportunities.
Instance restrict_to_request(const Instance& p, const Id& request);
/// P-bar: observations that fit somewhere outside every exclusive window.
Instance outside_exclusives(const Instance& p);
/// P[.|M]: the entries of M become fixed preallocations.
Instance with_preallocation(const Instance& p, const Schedule& m);
/// Componentwise union; shared ids must denote identical records.
Instance unite(const Instance& p, const Instance& q);

/// Maximal sub-intervals of o's window on s_o not covered by any exclusive,
/// keeping only those long enough to hold the observation.
std::vector<TimeWindow> free_portions(const Instance& p, const Observation& o);

/// Windows in which o may legitimately start when the owner is an exclusive
/// user: o's window intersected with the owner's exclusives on s_o.
std::vector<TimeWindow> own_exclusive_domains(const Instance& p, const Observation& o);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationKind {
  UnknownObservation,
  StartOutsideWindow,      // (a)
  CapacityExceeded,        // (b)
  DuplicateRequest,        // (c)
  TransitionTooShort,      // (d)
  OwnerOutsideExclusive,   // (e)
  UngrantedIntrusion,      // (f)
  PreallocationChanged,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct Verdict {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
  std::string summary() const;
};

Verdict validate_schedule(const Instance& p, const Schedule& m);

double total_reward(const Instance& p, const Schedule& m);

/// Adds a grant (o, v) for every entry whose occupied interval overlaps an
/// exclusive window of a user v other than its owner. Used by centralized
/// solvers, which act with every owner's authority.
void record_grants(const Instance& p, Schedule& m);

/// Earliest-due-date order of requests: (t_r^end, id).
std::vector<const Request*> sort_by_due_date(std::vector<const Request*> requests);

}  // namespace eoscsp

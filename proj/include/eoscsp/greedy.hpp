#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "eoscsp/model.hpp"

namespace eoscsp {

/// One occupied slot on a satellite track. An empty observation id marks an
/// anonymous busy block (a neighbour's entry whose identity is not shared);
/// transitions touching it use the satellite's maximum transition time.
struct TrackEntry {
  Id observation;
  double start = 0.0;
  double duration = 0.0;

  double end() const { return start + duration; }
};

struct Slot {
  Id satellite;
  double start = 0.0;
  std::size_t index = 0;
};

/// Where an observation may be placed.
enum class DomainPolicy {
  /// Exclusive users' observations inside their own exclusives; central
  /// observations anywhere in their window (grants recorded afterwards).
  Centralized,
  /// Only portions of the window outside every exclusive.
  OutsideExclusives,
  /// Inside the host user's exclusives, trimmed so that the first start of
  /// a window keeps the maximum transition time from a preceding exclusive
  /// of another user.
  Host,
};

struct DomainRule {
  DomainPolicy policy = DomainPolicy::Centralized;
  Id host;
  /// Host policy only: restrict to this exclusive (index into the host's
  /// sorted exclusives).
  std::optional<std::size_t> exclusive;
  /// OutsideExclusives only: keep the maximum transition time clear of every
  /// adjacent exclusive, whose contents are unknown to the caller.
  bool guard = false;
};

/// Candidate (satellite, window) domains for o, ascending by start.
std::vector<std::pair<Id, TimeWindow>> domains(const Instance& p, const Observation& o,
                                               const DomainRule& rule);

/// Per-satellite ordered tracks (the data R of the greedy scheduler).
class TrackSet {
 public:
  explicit TrackSet(const Instance& p);

  const std::vector<TrackEntry>& track(const Id& satellite) const;
  int limit(const Id& satellite) const;
  void set_limit(const Id& satellite, int limit);
  bool full(const Id& satellite) const;

  /// Inserts keeping start order, without feasibility checks.
  void add(const Id& satellite, TrackEntry entry);
  void insert(const Id& satellite, std::size_t index, TrackEntry entry);
  bool remove(const Id& observation);

  double transition(const Id& satellite, const Id& from, const Id& to) const;

  /// First feasible insertion of o inside the domain window, scanning
  /// insertion indices left to right. Does not mutate.
  std::optional<Slot> scan(const Observation& o, const Id& satellite, const TimeWindow& domain) const;

  /// True when consecutive entries respect duration + transition.
  bool consistent(const Id& satellite) const;

  std::map<Id, double> placements() const;

 private:
  const Instance* p_;
  std::map<Id, std::vector<TrackEntry>> tracks_;
  std::map<Id, int> limits_;
};

/// Ascending (priority, window start, id).
std::vector<const Observation*> sort_observations(std::vector<const Observation*> observations);

/// Scans o's domains in order, skipping full satellites, and inserts o at
/// the first feasible index. Returns the placement or nullopt.
std::optional<Slot> first_slot(const Observation& o, const Instance& p, TrackSet& tracks,
                               const DomainRule& rule = {});

/// Runs the greedy loop over the given candidates against existing tracks:
/// sorted order, first_slot, sibling opportunities dropped once a request is
/// served. Returns the new entries only.
std::map<Id, double> greedy_fill(const Instance& p, TrackSet& tracks,
                                 std::vector<const Observation*> candidates, const DomainRule& rule);

struct GreedyOptions {
  DomainPolicy policy = DomainPolicy::Centralized;
};

/// Centralized greedy baseline. Preallocated entries are kept; grants are
/// recorded for every foreign observation placed inside an exclusive.
Schedule solve_greedy(const Instance& p, const GreedyOptions& options = {});

}  // namespace eoscsp

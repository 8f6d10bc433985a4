#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eoscsp/model.hpp"

namespace eoscsp {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename T>
struct Range {
  T lo{};
  T hi{};
};

struct GenerationParams {
  std::uint64_t seed = 0;
  int satellite_count = 3;
  int satellite_capacity = 20;
  TimeWindow horizon{0.0, 300.0};
  int exclusive_user_count = 4;
  Range<int> requests_per_exclusive_user{2, 2};
  int exclusives_per_user = 8;
  Range<double> exclusive_duration{15.0, 20.0};
  Range<int> central_request_count{8, 8};
  int opportunities_per_request = 10;
  double observation_duration = 5.0;
  Range<double> observation_window_duration{10.0, 20.0};
  std::vector<double> exclusive_reward{10, 20, 30, 40, 50};
  Range<int> central_reward{1, 5};
  double transition_time = 1.0;
  bool windows_only_inside_exclusives = false;
  int max_retries = 1000;

  /// Throws GenerationError when a range is empty or a duration non-positive.
  void check() const;
};

/// Highly-conflicting regime. Scale 0..18 sweeps 2..20 requests per
/// exclusive user; the central planner emits as many requests as all
/// exclusive users together (8..80).
GenerationParams conflicting_preset(int scale);
inline constexpr int kConflictingMaxScale = 18;

/// Realistic regime. Scale 0..9 sweeps 20..100 requests per exclusive user
/// and 25..250 central requests.
GenerationParams realistic_preset(int scale);
inline constexpr int kRealisticMaxScale = 9;

/// Preset by name ("conflicting" or "realistic").
GenerationParams preset(const std::string& name, int scale);

Instance generate(const GenerationParams& params);

}  // namespace eoscsp

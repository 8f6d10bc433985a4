#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "eoscsp/model.hpp"

namespace eoscsp {

// ---------------------------------------------------------------------------
// MILP model and LP-format export
// ---------------------------------------------------------------------------

enum class VarKind { Binary, Continuous };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct LinearTerm {
  std::string variable;
  double coefficient = 1.0;
};

struct LinearRow {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct MilpVariable {
  std::string name;
  VarKind kind = VarKind::Binary;
  double lower = 0.0;
  double upper = 1.0;
};

struct MilpModel {
  std::vector<MilpVariable> variables;
  std::vector<LinearTerm> objective;  // maximized
  std::vector<LinearRow> rows;
  double priority_boost = 0.0;

  std::size_t count(VarKind kind) const;
  /// Rows whose name starts with the given prefix ("c1_", "sep_", "cap_", ...).
  std::size_t rows_with_prefix(const std::string& prefix) const;
};

struct MilpOptions {
  /// Added to the reward of every exclusive-user observation; 0 selects
  /// default_priority_boost().
  double priority_boost = 0.0;
  /// Tighten start bounds so foreign observations stay out of exclusives
  /// and exclusive users' observations stay inside their own (the largest
  /// admissible sub-interval is used).
  bool strict_exclusives = false;
  /// Replace the published pairwise rows (which sequence every pair on
  /// every satellite whether scheduled or not, and bound each request per
  /// satellite) by rows that only bind scheduled pairs, one request row
  /// across satellites, and start bounds that finish inside the window.
  bool sound_sequencing = false;
};

/// 1 + sum of all request rewards: larger than any achievable total reward,
/// so one exclusive observation outweighs every non-exclusive combination.
double default_priority_boost(const Instance& p);

/// Big-M of the separation rows: t_o^end - t_p^start + dur_o + tau_s(o, p).
double delta_max(const Instance& p, const Satellite& s, const Observation& o, const Observation& q);

/// Throws std::invalid_argument when the boost does not exceed the total
/// non-exclusive reward.
MilpModel build_milp(const Instance& p, const MilpOptions& options = {});

/// LP-format text (objective, constraints, bounds, binaries). Variable
/// names: x_<sat>_<obs>, t_<sat>_<obs>, b_<sat>_<obs>_<obs>.
std::string to_lp(const MilpModel& m);
void export_lp(const MilpModel& m, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Exact branch-and-bound
// ---------------------------------------------------------------------------

/// Sum of rewards with exclusive-user observations boosted: the objective
/// the exact solver maximizes.
double priority_objective(const Instance& p, const Schedule& m, double boost);

class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(const std::string& what, Schedule incumbent)
      : std::runtime_error(what), incumbent_(std::move(incumbent)) {}
  const Schedule& incumbent() const { return incumbent_; }

 private:
  Schedule incumbent_;
};

struct ExactOptions {
  double budget_seconds = 10.0;
  double priority_boost = 0.0;  // 0 selects default_priority_boost()
};

struct ExactStats {
  std::size_t nodes = 0;
  double objective = 0.0;
};

/// Maximum priority_objective over all valid schedules. Exclusive users'
/// observations lie inside their own exclusives; central observations may
/// use any part of their window and receive grants.
Schedule solve_exact(const Instance& p, const ExactOptions& options = {}, ExactStats* stats = nullptr);
inline Schedule solve_exact(const Instance& p, double budget_seconds) {
  return solve_exact(p, ExactOptions{budget_seconds, 0.0});
}

}  // namespace eoscsp

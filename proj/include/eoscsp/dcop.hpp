#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "eoscsp/io.hpp"

namespace eoscsp {

class MessageBus;

/// Cost of a violated hard constraint; ordered above every finite cost.
inline constexpr double kHardCost = std::numeric_limits<double>::infinity();

class DcopError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DcopVariable {
  std::string name;
  std::string owner;  // agent
  std::vector<int> domain;
};

struct DcopConstraint {
  std::string name;
  std::vector<std::size_t> scope;  // variable indices
  /// Receives the values of the scope variables, in scope order.
  std::function<double(const std::vector<int>&)> cost;
};

/// Minimize the sum of constraint costs.
class DcopProblem {
 public:
  std::size_t add_variable(std::string name, std::string owner, std::vector<int> domain);
  void add_constraint(DcopConstraint c);

  const std::vector<DcopVariable>& variables() const { return variables_; }
  const std::vector<DcopConstraint>& constraints() const { return constraints_; }
  std::vector<std::string> agents() const;
  std::size_t index_of(const std::string& name) const;

  double evaluate(const std::vector<int>& assignment) const;
  bool empty() const { return variables_.empty(); }

  /// Tabulated constraints, for debugging dumps.
  json to_json() const;

 private:
  std::vector<DcopVariable> variables_;
  std::vector<DcopConstraint> constraints_;
  std::map<std::string, std::size_t> index_;
};

DcopConstraint unary_constraint(std::string name, std::size_t variable, std::map<int, double> costs);
DcopConstraint table_constraint(std::string name, std::vector<std::size_t> scope,
                                std::map<std::vector<int>, double> table, double otherwise = kHardCost);
/// Hard: sum of the scope values must not exceed the bound.
DcopConstraint at_most_constraint(std::string name, std::vector<std::size_t> scope, int bound);

/// DFS pseudo-tree (a forest when the constraint graph is disconnected).
/// Each component is rooted at its highest-degree variable (ties: lowest
/// name); children are visited by descending degree, then name.
struct PseudoTree {
  std::vector<int> parent;                             // -1 for roots
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::vector<std::size_t>> pseudo_parents;  // back-edge ancestors
  std::vector<std::size_t> roots;
  std::vector<std::size_t> depth;
  std::vector<std::size_t> preorder;

  std::size_t tree_edges() const;
  std::size_t back_edges() const;
  std::size_t height() const;
};

PseudoTree build_pseudo_tree(const DcopProblem& p);

struct DcopSolution {
  std::vector<int> assignment;  // per variable index
  double cost = 0.0;
  bool feasible = true;

  int value(const DcopProblem& p, const std::string& variable) const { return assignment.at(p.index_of(variable)); }
};

struct DpopOptions {
  /// Largest utility table (entries) a single node may hold.
  std::size_t max_table_entries = std::size_t{1} << 20;
};

/// Complete solver: UTIL tables up the pseudo-tree, VALUE assignments down.
/// With a bus, one dcop-util and one dcop-value message per tree edge is
/// sent between the owning agents (which must be registered).
DcopSolution solve_dpop(const DcopProblem& p, MessageBus* bus = nullptr, const DpopOptions& options = {});

/// Brute force over the full product of domains; ties keep the
/// lexicographically smallest assignment. Throws DcopError beyond the cap.
DcopSolution solve_exhaustive(const DcopProblem& p, std::size_t max_assignments = std::size_t{1} << 22);

}  // namespace eoscsp

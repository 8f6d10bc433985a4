#pragma once

#include <algorithm>
#include <random>
#include <string>

#include "eoscsp/dcop.hpp"

namespace dcop_fuzz {

using namespace eoscsp;

inline std::string var(std::size_t i) { return "x" + std::to_string(i); }

/// Random binary problem: unary costs, pairwise tables with some hard
/// entries, and occasional at-most constraints over three variables.
inline DcopProblem random_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  DcopProblem p;
  const int n = 1 + pick(10);
  for (int i = 0; i < n; ++i) p.add_variable(var(i), "a" + std::to_string(pick(3)), {0, 1});
  for (int i = 0; i < n; ++i)
    p.add_constraint(unary_constraint("u" + std::to_string(i), i, {{0, pick(5)}, {1, pick(5) - 2.0}}));
  const int pairs = pick(2 * n + 1);
  for (int k = 0; k < pairs; ++k) {
    const std::size_t a = pick(n), b = pick(n);
    if (a == b) continue;
    std::map<std::vector<int>, double> t;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        if (pick(6) != 0) t[{x, y}] = pick(7);
    p.add_constraint(table_constraint("t" + std::to_string(k), {a, b}, t));
  }
  if (n >= 3 && pick(2) == 0) {
    std::vector<std::size_t> scope{static_cast<std::size_t>(pick(n))};
    for (int j = 0; j < 2; ++j) {
      const std::size_t c = pick(n);
      if (std::find(scope.begin(), scope.end(), c) == scope.end()) scope.push_back(c);
    }
    p.add_constraint(at_most_constraint("m", scope, 1));
  }
  return p;
}

}  // namespace dcop_fuzz

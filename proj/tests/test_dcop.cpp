#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "eoscsp/dcop.hpp"
#include "eoscsp/runtime.hpp"
#include "dcop_fuzz.hpp"

using namespace eoscsp;
using dcop_fuzz::random_problem;
using dcop_fuzz::var;

namespace {

MessageBus bus_for(const DcopProblem& p) {
  MessageBus bus;
  for (const auto& a : p.agents()) bus.register_agent(a);
  return bus;
}

}  // namespace

TEST_CASE("problem construction") {
  DcopProblem p;
  CHECK(p.add_variable("a", "u", {0, 1}) == 0);
  CHECK_THROWS_AS(p.add_variable("a", "u", {0, 1}), DcopError);
  CHECK_THROWS_AS(p.add_variable("b", "u", {}), DcopError);
  CHECK_THROWS_AS(p.add_constraint({"bad", {3}, [](const std::vector<int>&) { return 0.0; }}), DcopError);
  CHECK_THROWS_AS(p.index_of("zz"), DcopError);
  p.add_variable("b", "v", {0, 1, 2});
  p.add_constraint(at_most_constraint("m", {0, 1}, 2));
  CHECK(p.agents() == std::vector<std::string>{"u", "v"});
  CHECK(p.evaluate({1, 1}) == 0.0);
  CHECK(p.evaluate({1, 2}) == kHardCost);
  const json j = p.to_json();
  CHECK(j.at("variables").size() == 2);
}

TEST_CASE("pseudo-tree shapes") {
  SUBCASE("single variable") {
    DcopProblem p;
    p.add_variable("a", "u", {0, 1});
    const PseudoTree t = build_pseudo_tree(p);
    CHECK(t.roots == std::vector<std::size_t>{0});
    CHECK(t.tree_edges() == 0);
    CHECK(t.height() == 0);
  }
  SUBCASE("chain of three") {
    DcopProblem p;
    for (int i = 0; i < 3; ++i) p.add_variable(var(i), "u", {0, 1});
    p.add_constraint(table_constraint("ab", {0, 1}, {}, 0));
    p.add_constraint(table_constraint("bc", {1, 2}, {}, 0));
    const PseudoTree t = build_pseudo_tree(p);
    CHECK(t.roots == std::vector<std::size_t>{1});  // highest degree
    CHECK(t.tree_edges() == 2);
    CHECK(t.back_edges() == 0);
    // Rooted at the middle the chain has depth 1; from an end it has depth 2.
    CHECK(t.height() == 1);
  }
  SUBCASE("chain of three rooted at an end by degree tie") {
    DcopProblem p;
    for (int i = 0; i < 3; ++i) p.add_variable(var(i), "u", {0, 1});
    p.add_constraint(table_constraint("ab", {0, 1}, {}, 0));
    p.add_constraint(table_constraint("bc", {1, 2}, {}, 0));
    p.add_constraint(table_constraint("ca", {0, 2}, {}, 0));  // triangle: all degree 2
    const PseudoTree t = build_pseudo_tree(p);
    CHECK(t.roots == std::vector<std::size_t>{0});
    CHECK(t.height() == 2);
    CHECK(t.back_edges() == 1);
  }
  SUBCASE("clique of four") {
    DcopProblem p;
    for (int i = 0; i < 4; ++i) p.add_variable(var(i), "u", {0, 1});
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) p.add_constraint(table_constraint("c", {i, j}, {}, 0));
    const PseudoTree t = build_pseudo_tree(p);
    CHECK(t.tree_edges() == 3);
    CHECK(t.back_edges() == 3);
    CHECK(t.height() == 3);
  }
  SUBCASE("disconnected graph gives a forest") {
    DcopProblem p;
    for (int i = 0; i < 4; ++i) p.add_variable(var(i), "u", {0, 1});
    p.add_constraint(table_constraint("ab", {0, 1}, {}, 0));
    p.add_constraint(table_constraint("cd", {2, 3}, {}, 0));
    const PseudoTree t = build_pseudo_tree(p);
    CHECK(t.roots.size() == 2);
    CHECK(t.tree_edges() == 2);
  }
}

TEST_CASE("small solved examples") {
  SUBCASE("one binary variable") {
    DcopProblem p;
    p.add_variable("x", "u", {0, 1});
    p.add_constraint(unary_constraint("c", 0, {{0, 3}, {1, 1}}));
    const DcopSolution s = solve_dpop(p);
    CHECK(s.value(p, "x") == 1);
    CHECK(s.cost == 1);
    CHECK(s.feasible);
  }
  SUBCASE("all-different pair") {
    DcopProblem p;
    p.add_variable("a", "u", {0, 1});
    p.add_variable("b", "v", {0, 1});
    p.add_constraint(unary_constraint("ua", 0, {{0, 4}, {1, 1}}));
    p.add_constraint(unary_constraint("ub", 1, {{0, 2}, {1, 2}}));
    p.add_constraint(table_constraint("diff", {0, 1}, {{{0, 1}, 0}, {{1, 0}, 0}}));
    const DcopSolution s = solve_dpop(p);
    CHECK(s.assignment == std::vector<int>{1, 0});
    CHECK(s.cost == 3);
  }
  SUBCASE("empty problem") {
    DcopProblem p;
    const DcopSolution s = solve_exhaustive(p);
    CHECK(s.assignment.empty());
    CHECK(s.cost == 0);
    CHECK(solve_dpop(p).cost == 0);
  }
  SUBCASE("infeasible") {
    DcopProblem p;
    p.add_variable("a", "u", {0, 1});
    p.add_constraint(table_constraint("no", {0}, {}));
    CHECK_FALSE(solve_exhaustive(p).feasible);
    CHECK_FALSE(solve_dpop(p).feasible);
  }
  SUBCASE("exhaustive tie-break is lexicographic") {
    DcopProblem p;
    p.add_variable("a", "u", {0, 1});
    p.add_variable("b", "u", {0, 1});
    p.add_constraint(table_constraint("t", {0, 1}, {{{0, 1}, 1}, {{1, 0}, 1}}, 5));
    CHECK(solve_exhaustive(p).assignment == std::vector<int>{0, 1});
  }
  SUBCASE("exhaustive cap") {
    DcopProblem p;
    for (int i = 0; i < 12; ++i) p.add_variable(var(i), "u", {0, 1});
    CHECK_THROWS_AS(solve_exhaustive(p, 1000), DcopError);
  }
}

TEST_CASE("DPOP matches exhaustive search on fuzzed problems") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    CAPTURE(seed);
    const DcopProblem p = random_problem(seed);
    const DcopSolution exact = solve_exhaustive(p);
    const DcopSolution d = solve_dpop(p);
    CHECK(d.feasible == exact.feasible);
    if (exact.feasible) {
      CHECK(d.cost == exact.cost);
      CHECK(p.evaluate(d.assignment) == d.cost);
    }
  }
}

TEST_CASE("DPOP sends one util and one value message per tree edge") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DcopProblem p = random_problem(seed);
    MessageBus bus = bus_for(p);
    solve_dpop(p, &bus);
    const PseudoTree t = build_pseudo_tree(p);
    const auto& m = bus.metrics();
    auto count = [&](MessageKind k) { return m.count_by_kind.count(k) ? m.count_by_kind.at(k) : 0; };
    CHECK(count(MessageKind::DcopUtil) == t.tree_edges());
    CHECK(count(MessageKind::DcopValue) == t.tree_edges());
    CHECK(bus.idle());
  }
}

TEST_CASE("utility table cap") {
  DcopProblem p;
  for (int i = 0; i < 8; ++i) p.add_variable(var(i), "u", {0, 1, 2, 3});
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = i + 1; j < 8; ++j) p.add_constraint(table_constraint("c", {i, j}, {}, 1));
  CHECK_THROWS_AS(solve_dpop(p, nullptr, {.max_table_entries = 64}), DcopError);
  CHECK(solve_dpop(p).cost == 28);
}

#include "eoscsp/dcop.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "eoscsp/runtime.hpp"

namespace eoscsp {

namespace {

json cost_json(double c) { return std::isinf(c) ? json(nullptr) : json(c); }

}  // namespace

std::size_t DcopProblem::add_variable(std::string name, std::string owner, std::vector<int> domain) {
  if (domain.empty()) throw DcopError("variable '" + name + "' has an empty domain");
  if (index_.count(name)) throw DcopError("duplicate variable '" + name + "'");
  index_[name] = variables_.size();
  variables_.push_back({std::move(name), std::move(owner), std::move(domain)});
  return variables_.size() - 1;
}

void DcopProblem::add_constraint(DcopConstraint c) {
  for (std::size_t v : c.scope)
    if (v >= variables_.size()) throw DcopError("constraint '" + c.name + "' references an unknown variable");
  if (!c.cost) throw DcopError("constraint '" + c.name + "' has no cost function");
  constraints_.push_back(std::move(c));
}

std::vector<std::string> DcopProblem::agents() const {
  std::set<std::string> s;
  for (const auto& v : variables_) s.insert(v.owner);
  return {s.begin(), s.end()};
}

std::size_t DcopProblem::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DcopError("unknown variable '" + name + "'");
  return it->second;
}

double DcopProblem::evaluate(const std::vector<int>& assignment) const {
  double total = 0.0;
  std::vector<int> vals;
  for (const auto& c : constraints_) {
    vals.clear();
    for (std::size_t v : c.scope) vals.push_back(assignment.at(v));
    total += c.cost(vals);
  }
  return total;
}

json DcopProblem::to_json() const {
  json vars = json::array();
  for (const auto& v : variables_) vars.push_back({{"name", v.name}, {"owner", v.owner}, {"domain", v.domain}});
  json cons = json::array();
  for (const auto& c : constraints_) {
    json scope = json::array();
    for (std::size_t v : c.scope) scope.push_back(variables_[v].name);
    json rows = json::array();
    std::size_t total = 1;
    for (std::size_t v : c.scope) total = std::min<std::size_t>(total * variables_[v].domain.size(), 4096);
    for (std::size_t k = 0; k < total; ++k) {
      std::vector<int> vals(c.scope.size());
      std::size_t rest = k;
      for (std::size_t i = c.scope.size(); i-- > 0;) {
        const auto& dom = variables_[c.scope[i]].domain;
        vals[i] = dom[rest % dom.size()];
        rest /= dom.size();
      }
      json row = vals;
      row.push_back(cost_json(c.cost(vals)));
      rows.push_back(std::move(row));
    }
    cons.push_back({{"name", c.name}, {"scope", scope}, {"table", rows}});
  }
  return {{"variables", vars}, {"constraints", cons}};
}

DcopConstraint unary_constraint(std::string name, std::size_t variable, std::map<int, double> costs) {
  return {std::move(name), {variable}, [costs = std::move(costs)](const std::vector<int>& v) {
            auto it = costs.find(v[0]);
            return it == costs.end() ? 0.0 : it->second;
          }};
}

DcopConstraint table_constraint(std::string name, std::vector<std::size_t> scope,
                                std::map<std::vector<int>, double> table, double otherwise) {
  return {std::move(name), std::move(scope), [table = std::move(table), otherwise](const std::vector<int>& v) {
            auto it = table.find(v);
            return it == table.end() ? otherwise : it->second;
          }};
}

DcopConstraint at_most_constraint(std::string name, std::vector<std::size_t> scope, int bound) {
  return {std::move(name), std::move(scope), [bound](const std::vector<int>& v) {
            int sum = 0;
            for (int x : v) sum += x;
            return sum <= bound ? 0.0 : kHardCost;
          }};
}

// ---------------------------------------------------------------------------

std::size_t PseudoTree::tree_edges() const {
  std::size_t n = 0;
  for (const auto& c : children) n += c.size();
  return n;
}

std::size_t PseudoTree::back_edges() const {
  std::size_t n = 0;
  for (const auto& pp : pseudo_parents) n += pp.size();
  return n;
}

std::size_t PseudoTree::height() const {
  std::size_t h = 0;
  for (std::size_t d : depth) h = std::max(h, d);
  return h;
}

PseudoTree build_pseudo_tree(const DcopProblem& p) {
  const std::size_t n = p.variables().size();
  std::vector<std::set<std::size_t>> adj(n);
  for (const auto& c : p.constraints())
    for (std::size_t a : c.scope)
      for (std::size_t b : c.scope)
        if (a != b) adj[a].insert(b);
  const auto& vars = p.variables();
  auto before = [&](std::size_t a, std::size_t b) {
    if (adj[a].size() != adj[b].size()) return adj[a].size() > adj[b].size();
    return vars[a].name < vars[b].name;
  };
  std::vector<std::vector<std::size_t>> sorted_adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    sorted_adj[v].assign(adj[v].begin(), adj[v].end());
    std::sort(sorted_adj[v].begin(), sorted_adj[v].end(), before);
  }

  PseudoTree t;
  t.parent.assign(n, -1);
  t.children.assign(n, {});
  t.pseudo_parents.assign(n, {});
  t.depth.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), before);

  // Iterative DFS: (vertex, next neighbour position).
  for (std::size_t root : order) {
    if (seen[root]) continue;
    t.roots.push_back(root);
    seen[root] = true;
    t.preorder.push_back(root);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      if (pos == sorted_adj[v].size()) {
        stack.pop_back();
        continue;
      }
      const std::size_t w = sorted_adj[v][pos++];
      if (!seen[w]) {
        seen[w] = true;
        t.parent[w] = static_cast<int>(v);
        t.depth[w] = t.depth[v] + 1;
        t.children[v].push_back(w);
        t.preorder.push_back(w);
        stack.emplace_back(w, 0);
      } else if (static_cast<int>(w) != t.parent[v] && t.depth[w] < t.depth[v]) {
        t.pseudo_parents[v].push_back(w);
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

struct UtilTable {
  std::vector<std::size_t> vars;     // separator, ascending depth
  std::vector<std::size_t> strides;
  std::vector<double> data;

  std::size_t index(const std::vector<std::size_t>& cur) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) k += cur[vars[i]] * strides[i];
    return k;
  }
};

}  // namespace

DcopSolution solve_dpop(const DcopProblem& p, MessageBus* bus, const DpopOptions& options) {
  const auto& vars = p.variables();
  const std::size_t n = vars.size();
  DcopSolution sol;
  if (n == 0) return sol;
  const PseudoTree t = build_pseudo_tree(p);

  // Each constraint is evaluated at its deepest scope variable.
  std::vector<std::vector<std::size_t>> owned(n);
  std::vector<std::size_t> constant;
  for (std::size_t c = 0; c < p.constraints().size(); ++c) {
    const auto& scope = p.constraints()[c].scope;
    if (scope.empty()) {
      constant.push_back(c);
      continue;
    }
    std::size_t deepest = scope[0];
    for (std::size_t v : scope)
      if (t.depth[v] > t.depth[deepest]) deepest = v;
    owned[deepest].push_back(c);
  }

  std::vector<std::size_t> cur(n, 0);
  std::vector<int> vals;
  auto local_cost = [&](std::size_t v, const std::vector<UtilTable>& tables) {
    double total = 0.0;
    for (std::size_t c : owned[v]) {
      const auto& con = p.constraints()[c];
      vals.clear();
      for (std::size_t s : con.scope) vals.push_back(vars[s].domain[cur[s]]);
      total += con.cost(vals);
      if (std::isinf(total)) return total;
    }
    for (std::size_t ch : t.children[v]) total += tables[ch].data[tables[ch].index(cur)];
    return total;
  };

  // UTIL phase in reverse preorder (children before parents).
  std::vector<UtilTable> tables(n);
  for (auto it = t.preorder.rbegin(); it != t.preorder.rend(); ++it) {
    const std::size_t v = *it;
    std::set<std::size_t> sep;
    if (t.parent[v] >= 0) sep.insert(static_cast<std::size_t>(t.parent[v]));
    for (std::size_t pp : t.pseudo_parents[v]) sep.insert(pp);
    for (std::size_t ch : t.children[v])
      for (std::size_t s : tables[ch].vars)
        if (s != v) sep.insert(s);
    UtilTable& tab = tables[v];
    tab.vars.assign(sep.begin(), sep.end());
    std::sort(tab.vars.begin(), tab.vars.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(t.depth[a], a) < std::tie(t.depth[b], b);
    });
    std::size_t size = 1;
    tab.strides.assign(tab.vars.size(), 0);
    for (std::size_t i = tab.vars.size(); i-- > 0;) {
      tab.strides[i] = size;
      const std::size_t d = vars[tab.vars[i]].domain.size();
      if (size > options.max_table_entries / d) {
        throw DcopError("utility table of '" + vars[v].name + "' exceeds " + std::to_string(options.max_table_entries) +
                        " entries; decompose the problem or lower its induced width");
      }
      size *= d;
    }
    tab.data.assign(size, kHardCost);
    for (std::size_t k = 0; k < size; ++k) {
      std::size_t rest = k;
      for (std::size_t i = 0; i < tab.vars.size(); ++i) {
        cur[tab.vars[i]] = rest / tab.strides[i];
        rest %= tab.strides[i];
      }
      double best = kHardCost;
      for (std::size_t x = 0; x < vars[v].domain.size(); ++x) {
        cur[v] = x;
        best = std::min(best, local_cost(v, tables));
      }
      tab.data[k] = best;
    }
    if (bus && t.parent[v] >= 0) {
      json sep_names = json::array();
      for (std::size_t s : tab.vars) sep_names.push_back(vars[s].name);
      json util = json::array();
      for (double c : tab.data) util.push_back(cost_json(c));
      bus->send(vars[v].owner, vars[static_cast<std::size_t>(t.parent[v])].owner, MessageKind::DcopUtil,
                {{"variable", vars[v].name}, {"separator", sep_names}, {"util", util}});
    }
  }
  if (bus) bus->next_round();

  // VALUE phase in preorder.
  sol.cost = 0.0;
  for (std::size_t r : t.roots) sol.cost += tables[r].data[0];
  for (std::size_t c : constant) sol.cost += p.constraints()[c].cost({});
  for (std::size_t v : t.preorder) {
    double best = kHardCost;
    std::size_t arg = 0;
    for (std::size_t x = 0; x < vars[v].domain.size(); ++x) {
      cur[v] = x;
      const double c = local_cost(v, tables);
      if (c < best) {
        best = c;
        arg = x;
      }
    }
    cur[v] = arg;
    if (bus) {
      for (std::size_t ch : t.children[v]) {
        json context = json::object();
        for (std::size_t s : tables[ch].vars) context[vars[s].name] = vars[s].domain[cur[s]];
        bus->send(vars[v].owner, vars[ch].owner, MessageKind::DcopValue,
                  {{"variable", vars[ch].name}, {"context", context}});
      }
    }
  }
  if (bus) {
    bus->next_round();
    for (const auto& a : p.agents()) bus->drain(a);
  }
  sol.assignment.resize(n);
  for (std::size_t v = 0; v < n; ++v) sol.assignment[v] = vars[v].domain[cur[v]];
  sol.feasible = !std::isinf(sol.cost);
  return sol;
}

DcopSolution solve_exhaustive(const DcopProblem& p, std::size_t max_assignments) {
  const auto& vars = p.variables();
  DcopSolution sol;
  std::size_t total = 1;
  for (const auto& v : vars) {
    if (total > max_assignments / v.domain.size()) {
      throw DcopError("exhaustive search over more than " + std::to_string(max_assignments) + " assignments");
    }
    total *= v.domain.size();
  }
  std::vector<std::size_t> idx(vars.size(), 0);
  std::vector<int> assignment(vars.size());
  sol.cost = kHardCost;
  bool first = true;
  for (std::size_t k = 0; k < total; ++k) {
    for (std::size_t i = 0; i < vars.size(); ++i) assignment[i] = vars[i].domain[idx[i]];
    const double c = p.evaluate(assignment);
    if (first || c < sol.cost) {
      sol.cost = c;
      sol.assignment = assignment;
      first = false;
    }
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (++idx[i] < vars[i].domain.size()) break;
      idx[i] = 0;
    }
  }
  sol.feasible = !std::isinf(sol.cost);
  return sol;
}

}  // namespace eoscsp

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "homfactor/circuit.hpp"
#include "homfactor/circuit_build.hpp"
#include "homfactor/errors.hpp"
#include "homfactor/frac_cover.hpp"
#include "homfactor/function_set.hpp"
#include "homfactor/structure.hpp"
#include "homfactor/tree_decomposition.hpp"
#include "homfactor/validation.hpp"

namespace homfactor {

constexpr long long kDefaultCompileBudget = 100'000'000;

// One bag of the decomposition, materialized over B: the assignments of the
// bag variables consistent with every relation of A scoped inside the bag.
struct BagRelation {
  int node = -1;
  std::vector<int> vars;  // bag contents, ascending (A's universe order)
  FunctionSet tuples;
  bool constrained = false;  // at least one A-tuple has scope inside this bag
};

struct MaterializedBags {
  std::vector<BagRelation> bags;
  std::vector<std::string> warnings;
};

struct CompileStats {
  std::vector<std::size_t> bag_sizes;  // after semijoin reduction
  std::size_t max_bag_tuples = 0;
  int circuit_size = 0;
  Rational fhtw = Rational(0);
  std::vector<std::vector<int>> owned_vars;  // induced v-tree: per node, vars it introduces
  std::vector<std::string> warnings;
};

namespace detail {

inline void require_td_for(const Structure& a, const TreeDecomposition& td, const char* who) {
  require_connected(a, who);
  ValidationReport rep = validate_td(hypergraph_of(a), td);
  if (!rep.ok()) throw BadScope(std::string(who) + ": invalid tree decomposition: " + rep.summary());
}

// BFS orientation from the root (node 0): parents array plus top-down order.
inline std::pair<std::vector<int>, std::vector<int>> orient_td(const TreeDecomposition& td) {
  std::vector<int> parent(td.node_count(), -1), order;
  std::vector<char> seen(td.node_count(), 0);
  auto adj = td.adjacency();
  order.push_back(0);
  seen[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int v : adj[order[i]])
      if (!seen[v]) {
        seen[v] = 1;
        parent[v] = order[i];
        order.push_back(v);
      }
  return {parent, order};
}

// Keep the rows of x that agree with at least one row of y on the shared
// variables. With nothing shared this degenerates to "y is nonempty".
inline FunctionSet semijoin(const FunctionSet& x, const FunctionSet& y) {
  std::vector<int> shared;
  std::set_intersection(x.vars.begin(), x.vars.end(), y.vars.begin(), y.vars.end(),
                        std::back_inserter(shared));
  FunctionSet proj = restrict_set(y, shared);
  std::vector<std::size_t> cols;
  for (int v : shared)
    cols.push_back(std::lower_bound(x.vars.begin(), x.vars.end(), v) - x.vars.begin());
  FunctionSet out = FunctionSet::empty_set(x.vars);
  std::vector<std::int32_t> key(shared.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) key[k] = x.row(i)[cols[k]];
    if (proj.contains(key.data())) {
      std::vector<std::int32_t> r(x.row(i), x.row(i) + x.arity());
      out.push_row(r);
    }
  }
  return out;
}

}  // namespace detail

// Backtracking join per bag: every assignment of the bag's variables to B's
// elements that satisfies each A-tuple scoped inside the bag. Constraints
// fire as soon as their last variable is assigned.
inline MaterializedBags materialize_bags(const Structure& a, const Structure& b,
                                         const TreeDecomposition& td,
                                         long long budget = kDefaultCompileBudget) {
  require_same_signature(a, b, "materialize_bags");
  detail::require_td_for(a, td, "materialize_bags");

  // sorted copies of B's relations for membership tests (parsed structures
  // may carry file-ordered tuples)
  std::vector<FunctionSet> b_rel(b.relations.size());
  for (std::size_t r = 0; r < b.relations.size(); ++r) {
    b_rel[r].vars.resize(a.sig.symbols[r].arity);
    for (int k = 0; k < a.sig.symbols[r].arity; ++k) b_rel[r].vars[k] = k;
    for (const auto& t : b.relations[r])
      b_rel[r].push_row(std::vector<std::int32_t>(t.begin(), t.end()));
    b_rel[r].normalize();
  }

  MaterializedBags out;
  long long cells = 0;
  int nb = b.size_of_universe();
  for (int node = 0; node < td.node_count(); ++node) {
    BagRelation bag;
    bag.node = node;
    bag.vars = td.bags[node];
    int w = static_cast<int>(bag.vars.size());

    // constraints: (relation, tuple) pairs of A with scope inside the bag,
    // bucketed by the bag position at which they become fully assigned
    struct Constraint {
      int rel;
      const std::vector<int>* tup;
    };
    std::vector<std::vector<Constraint>> fire_at(std::max(w, 1));
    for (std::size_t r = 0; r < a.relations.size(); ++r)
      for (const auto& tup : a.relations[r]) {
        int last = -1;
        bool inside = true;
        for (int v : tup) {
          auto it = std::lower_bound(bag.vars.begin(), bag.vars.end(), v);
          if (it == bag.vars.end() || *it != v) {
            inside = false;
            break;
          }
          last = std::max(last, static_cast<int>(it - bag.vars.begin()));
        }
        if (inside && last >= 0) {
          fire_at[last].push_back({static_cast<int>(r), &tup});
          bag.constrained = true;
        }
      }
    if (!bag.constrained && w > 0)
      out.warnings.push_back("bag " + td.node_names[node] +
                             " has no covering relation; materializing the full product");

    bag.tuples.vars = bag.vars;
    std::vector<std::int32_t> vals(w);
    std::vector<int> pos_of(a.size_of_universe(), -1);
    for (int i = 0; i < w; ++i) pos_of[bag.vars[i]] = i;
    std::vector<std::int32_t> image;

    auto consistent_at = [&](int depth) {
      for (const auto& c : fire_at[depth]) {
        image.assign(c.tup->size(), 0);
        for (std::size_t k = 0; k < c.tup->size(); ++k) image[k] = vals[pos_of[(*c.tup)[k]]];
        if (!b_rel[c.rel].contains(image.data())) return false;
      }
      return true;
    };
    auto dfs = [&](auto&& self, int depth) -> void {
      if (depth == w) {
        bag.tuples.push_row(vals);
        return;
      }
      for (int d = 0; d < nb; ++d) {
        if (++cells > budget) throw BudgetExceeded("bag materialization exceeded budget");
        vals[depth] = d;
        if (consistent_at(depth)) self(self, depth + 1);
      }
    };
    if (w == 0)
      bag.tuples = FunctionSet::unit();
    else
      dfs(dfs, 0);
    bag.tuples.normalize();
    out.bags.push_back(std::move(bag));
  }
  return out;
}

// Upward then downward semijoin passes over the rooted tree; afterwards
// every surviving tuple agrees with some tuple in each neighboring bag.
inline std::vector<BagRelation> yannakakis_reduce(std::vector<BagRelation> bags,
                                                  const TreeDecomposition& td) {
  if (static_cast<int>(bags.size()) != td.node_count())
    throw BadScope("yannakakis_reduce: bag list does not match the decomposition");
  auto [parent, order] = detail::orient_td(td);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (parent[*it] >= 0)
      bags[parent[*it]].tuples = detail::semijoin(bags[parent[*it]].tuples, bags[*it].tuples);
  for (int u : order)
    if (parent[u] >= 0) bags[u].tuples = detail::semijoin(bags[u].tuples, bags[parent[u]].tuples);
  return bags;
}

// Compile Hom(A,B) along a tree decomposition: root the tree at node 0, give
// each variable to the topmost bag containing it, and per bag tuple emit a
// product of the owned inputs and one union per child over the compatible
// child tuples. Semijoin reduction beforehand guarantees those unions are
// never empty; distinct sibling tuples differ on an owned input, which makes
// every union deterministic.
inline CircuitOrEmpty compile_td(const Structure& a, const Structure& b,
                                 const TreeDecomposition& td, CompileStats* stats = nullptr,
                                 long long budget = kDefaultCompileBudget) {
  if (a.universe.empty()) throw BadScope("compile_td: query has no variables");
  MaterializedBags mat = materialize_bags(a, b, td, budget);
  std::vector<BagRelation> bags = yannakakis_reduce(std::move(mat.bags), td);

  if (stats) {
    stats->warnings = mat.warnings;
    stats->bag_sizes.clear();
    stats->max_bag_tuples = 0;
    for (const auto& bag : bags) {
      stats->bag_sizes.push_back(bag.tuples.size());
      stats->max_bag_tuples = std::max(stats->max_bag_tuples, bag.tuples.size());
    }
    stats->fhtw = fhtw_of_td(hypergraph_of(a), td);
    stats->circuit_size = 0;
    stats->owned_vars.assign(td.node_count(), {});
  }

  auto [parent, order] = detail::orient_td(td);
  std::vector<int> depth(td.node_count(), 0);
  for (int u : order)
    if (parent[u] >= 0) depth[u] = depth[parent[u]] + 1;

  // topmost bag of each variable; unique because occurrence sets are
  // connected subtrees
  std::vector<int> owner(a.size_of_universe(), -1);
  for (int u = 0; u < td.node_count(); ++u)
    for (int v : td.bags[u])
      if (owner[v] < 0 || depth[u] < depth[owner[v]]) owner[v] = u;
  std::vector<std::vector<int>> owned(td.node_count());
  for (int v = 0; v < a.size_of_universe(); ++v) owned[owner[v]].push_back(v);
  if (stats) stats->owned_vars = owned;

  std::vector<std::vector<int>> children(td.node_count());
  for (int u = 0; u < td.node_count(); ++u)
    if (parent[u] >= 0) children[parent[u]].push_back(u);
  std::vector<char> contributes(td.node_count(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    contributes[*it] = !owned[*it].empty();
    for (int c : children[*it]) contributes[*it] |= contributes[c];
  }

  if (bags[0].tuples.empty()) return EmptyResult{};

  CircuitBuilder builder(a.universe);
  // gates[u][i]: gate for tuple i of bag u; built bottom-up
  std::vector<std::vector<int>> gates(td.node_count());
  long long work = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int u = *it;
    if (!contributes[u]) continue;
    const BagRelation& bag = bags[u];

    // per contributing child: its tuples' gates grouped by the shared-var
    // projection, so each parent tuple looks its union up by key
    struct ChildIndex {
      std::vector<std::size_t> parent_cols;
      std::map<std::vector<std::int32_t>, std::vector<int>> by_key;
    };
    std::vector<ChildIndex> child_index;
    for (int c : children[u]) {
      if (!contributes[c]) continue;
      ChildIndex ci;
      std::vector<int> shared;
      std::set_intersection(bag.vars.begin(), bag.vars.end(), bags[c].vars.begin(),
                            bags[c].vars.end(), std::back_inserter(shared));
      std::vector<std::size_t> child_cols;
      for (int v : shared) {
        ci.parent_cols.push_back(
            std::lower_bound(bag.vars.begin(), bag.vars.end(), v) - bag.vars.begin());
        child_cols.push_back(std::lower_bound(bags[c].vars.begin(), bags[c].vars.end(), v) -
                             bags[c].vars.begin());
      }
      for (std::size_t i = 0; i < bags[c].tuples.size(); ++i) {
        std::vector<std::int32_t> key(child_cols.size());
        for (std::size_t k = 0; k < child_cols.size(); ++k)
          key[k] = bags[c].tuples.row(i)[child_cols[k]];
        ci.by_key[key].push_back(gates[c][i]);
      }
      child_index.push_back(std::move(ci));
    }

    std::vector<std::size_t> owned_cols;
    for (int v : owned[u])
      owned_cols.push_back(std::lower_bound(bag.vars.begin(), bag.vars.end(), v) - bag.vars.begin());

    gates[u].resize(bag.tuples.size());
    for (std::size_t i = 0; i < bag.tuples.size(); ++i) {
      std::vector<int> factors;
      for (std::size_t k = 0; k < owned_cols.size(); ++k)
        factors.push_back(builder.input(owned[u][k], bag.tuples.row(i)[owned_cols[k]]));
      for (const ChildIndex& ci : child_index) {
        std::vector<std::int32_t> key(ci.parent_cols.size());
        for (std::size_t k = 0; k < ci.parent_cols.size(); ++k)
          key[k] = bag.tuples.row(i)[ci.parent_cols[k]];
        auto hit = ci.by_key.find(key);
        if (hit == ci.by_key.end())
          throw Error("compile_td: reduced bag tuple lost its child match");
        factors.push_back(builder.union_tree(hit->second));
      }
      if (factors.empty()) throw Error("compile_td: contributing node produced no factors");
      if ((work += static_cast<long long>(factors.size())) > budget)
        throw BudgetExceeded("circuit construction exceeded budget");
      gates[u][i] = builder.times_chain(factors);
    }
  }

  Circuit c = builder.finish(builder.union_tree(gates[0]));
  if (stats) stats->circuit_size = c.size();
  return c;
}

}  // namespace homfactor

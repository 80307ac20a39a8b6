#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/tree_decomposition.hpp"

namespace homfactor {

struct TreewidthResult {
  int width = -1;
  TreeDecomposition td;
  std::vector<int> elimination_order;
};

constexpr int kDefaultTreewidthCap = 18;

// Exact treewidth by dynamic programming over vertex subsets (elimination
// orders). For S a set of already-eliminated vertices, best[S] is the
// smallest achievable maximum elimination degree within S, where eliminating
// v after S' costs |Q(S', v)| and Q(S', v) is the set of vertices outside
// S' + v reachable from v through S'. Treewidth = best[V]; the witnessing
// order reconstructs a tree decomposition of the same width.
inline TreewidthResult treewidth_exact(const Hypergraph& h, int cap = kDefaultTreewidthCap) {
  const Hypergraph g = h.is_graph() ? h : h.primal_graph();
  int n = g.n;
  if (n > cap)
    throw TooLarge("treewidth_exact: " + std::to_string(n) + " vertices exceeds cap " +
                   std::to_string(cap));
  TreewidthResult res;
  if (n == 0) {
    res.width = -1;
    res.td.node_names = {"t0"};
    res.td.bags = {{}};
    return res;
  }

  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& e : g.edges) {
    adj[e[0]] |= (1u << e[1]);
    adj[e[1]] |= (1u << e[0]);
  }

  // |Q(S', v)| via frontier expansion inside S' + v.
  auto q_size = [&](std::uint32_t sprime, int v) {
    std::uint32_t inside = sprime | (1u << v);
    std::uint32_t comp = (1u << v);
    std::uint32_t frontier = comp;
    std::uint32_t nb = 0;
    while (frontier) {
      std::uint32_t f = frontier;
      std::uint32_t reach = 0;
      while (f) {
        int u = std::countr_zero(f);
        f &= f - 1;
        reach |= adj[u];
      }
      nb |= reach;
      std::uint32_t grown = (comp | (reach & inside));
      frontier = grown ^ comp;
      comp = grown;
    }
    return std::popcount(nb & ~inside);
  };

  std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  std::vector<std::int8_t> best(static_cast<std::size_t>(full) + 1, 0);
  std::vector<std::int8_t> choice(static_cast<std::size_t>(full) + 1, -1);
  best[0] = -1;
  for (std::uint32_t s = 1; s <= full; ++s) {
    int b = n;  // widths never exceed n - 1
    int pick = -1;
    std::uint32_t it = s;
    while (it) {
      int v = std::countr_zero(it);
      it &= it - 1;
      std::uint32_t sp = s & ~(1u << v);
      int cost = std::max<int>(best[sp], q_size(sp, v));
      if (cost < b) {
        b = cost;
        pick = v;
      }
    }
    best[s] = static_cast<std::int8_t>(b);
    choice[s] = static_cast<std::int8_t>(pick);
    if (s == full) break;
  }
  res.width = best[full];

  // Reconstruct the elimination order (choice[S] is eliminated last in S).
  std::vector<int> order(n);
  std::uint32_t s = full;
  for (int i = n - 1; i >= 0; --i) {
    int v = choice[s];
    order[i] = v;
    s &= ~(1u << v);
  }
  res.elimination_order = order;

  // Build the decomposition by simulating the elimination with fill-in.
  std::vector<std::uint32_t> cur = adj;
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  std::uint32_t alive = full;
  res.td.bags.resize(n);
  std::vector<int> parent(n, -1);
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    std::uint32_t nb = cur[v] & alive & ~(1u << v);
    std::vector<int> bag{v};
    int first_nb = -1;
    std::uint32_t it = nb;
    while (it) {
      int u = std::countr_zero(it);
      it &= it - 1;
      bag.push_back(u);
      if (first_nb == -1 || pos[u] < pos[first_nb]) first_nb = u;
    }
    std::sort(bag.begin(), bag.end());
    res.td.bags[i] = std::move(bag);
    if (first_nb != -1) parent[i] = pos[first_nb];
    // make the neighborhood a clique, then drop v
    std::uint32_t nbit = nb;
    while (nbit) {
      int u = std::countr_zero(nbit);
      nbit &= nbit - 1;
      cur[u] |= nb & ~(1u << u);
    }
    alive &= ~(1u << v);
  }
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    if (parent[i] >= 0)
      res.td.edges.push_back({i, parent[i]});
    else
      roots.push_back(i);
  }
  // a disconnected input yields one root per component; chain them to keep a tree
  for (size_t r = 1; r < roots.size(); ++r) res.td.edges.push_back({roots[r - 1], roots[r]});
  for (int i = 0; i < n; ++i) res.td.node_names.push_back("t" + std::to_string(i));
  return res;
}

}  // namespace homfactor

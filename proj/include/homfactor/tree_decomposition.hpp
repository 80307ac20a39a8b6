#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/validation.hpp"

namespace homfactor {

// Tree decomposition of a hypergraph. Nodes are 0..node_count-1 with string
// names for serialization; bags hold vertex indices of the underlying
// hypergraph, sorted.
struct TreeDecomposition {
  std::vector<std::string> node_names;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> bags;

  int node_count() const { return static_cast<int>(bags.size()); }

  int width() const {
    int w = -1;
    for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
    return w;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(node_count());
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }

  static TreeDecomposition single_bag(std::vector<int> bag) {
    TreeDecomposition td;
    std::sort(bag.begin(), bag.end());
    bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
    td.node_names = {"t0"};
    td.bags = {std::move(bag)};
    return td;
  }
};

// Checks the three tree decomposition conditions plus well-formedness: the
// node graph is a tree, every vertex occurs in a nonempty connected set of
// bags, and every hyperedge fits inside some bag.
inline ValidationReport validate_td(const Hypergraph& h, const TreeDecomposition& td) {
  ValidationReport rep;
  int nn = td.node_count();
  if (nn == 0) {
    rep.violation("decomposition has no nodes");
    return rep;
  }
  if (td.node_names.size() != td.bags.size())
    rep.violation("node name list does not match bag count");
  for (auto [u, v] : td.edges)
    if (u < 0 || u >= nn || v < 0 || v >= nn) {
      rep.violation("tree edge endpoint out of range");
      return rep;
    }
  // tree: connected and |E| = |V| - 1
  if (static_cast<int>(td.edges.size()) != nn - 1)
    rep.violation("node graph has " + std::to_string(td.edges.size()) + " edges, a tree on " +
                  std::to_string(nn) + " nodes needs " + std::to_string(nn - 1));
  auto adj = td.adjacency();
  std::vector<char> seen(nn, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  if (reached != nn) rep.violation("node graph is not connected");
  for (const auto& b : td.bags)
    for (int v : b)
      if (v < 0 || v >= h.n) rep.violation("bag vertex out of range");
  if (!rep.ok()) return rep;

  // occurrence sets: nonempty and connected in the tree
  for (int v = 0; v < h.n; ++v) {
    std::vector<int> occ;
    for (int t = 0; t < nn; ++t)
      if (std::binary_search(td.bags[t].begin(), td.bags[t].end(), v)) occ.push_back(t);
    if (occ.empty()) {
      rep.violation("vertex " + h.label(v) + " occurs in no bag");
      continue;
    }
    std::set<int> occ_set(occ.begin(), occ.end());
    std::vector<int> st{occ[0]};
    std::set<int> vis{occ[0]};
    while (!st.empty()) {
      int t = st.back();
      st.pop_back();
      for (int u : adj[t])
        if (occ_set.count(u) && !vis.count(u)) {
          vis.insert(u);
          st.push_back(u);
        }
    }
    if (vis.size() != occ_set.size())
      rep.violation("occurrence set of vertex " + h.label(v) + " is not connected");
  }

  // edge coverage
  for (const auto& e : h.edges) {
    bool covered = false;
    for (const auto& b : td.bags)
      if (std::includes(b.begin(), b.end(), e.begin(), e.end())) {
        covered = true;
        break;
      }
    if (!covered) {
      std::string names;
      for (int v : e) names += (names.empty() ? "" : ",") + h.label(v);
      rep.violation("edge {" + names + "} fits in no bag");
    }
  }
  return rep;
}

}  // namespace homfactor

#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "homfactor/errors.hpp"

namespace homfactor {

// Hypergraph over vertices 0..n-1. Edges are sorted duplicate-free vertex
// lists; the edge list itself is kept sorted so iteration order is canonical.
// Optional labels carry the original element names for reporting.
struct Hypergraph {
  int n = 0;
  std::vector<std::vector<int>> edges;
  std::vector<std::string> labels;

  static Hypergraph from_edges(int n, std::vector<std::vector<int>> raw_edges) {
    Hypergraph h;
    h.n = n;
    std::set<std::vector<int>> dedup;
    for (auto& e : raw_edges) {
      std::sort(e.begin(), e.end());
      e.erase(std::unique(e.begin(), e.end()), e.end());
      if (e.empty()) continue;
      for (int v : e)
        if (v < 0 || v >= n) throw BadScope("hypergraph edge vertex out of range");
      dedup.insert(std::move(e));
    }
    h.edges.assign(dedup.begin(), dedup.end());
    return h;
  }

  std::string label(int v) const {
    if (v >= 0 && v < static_cast<int>(labels.size())) return labels[v];
    return "v" + std::to_string(v);
  }

  bool is_graph() const {
    for (const auto& e : edges)
      if (e.size() != 2) return false;
    return true;
  }

  // Co-occurrence adjacency (the Gaifman/primal graph of the hypergraph).
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::set<int>> adj(n);
    for (const auto& e : edges)
      for (size_t i = 0; i < e.size(); ++i)
        for (size_t j = i + 1; j < e.size(); ++j) {
          adj[e[i]].insert(e[j]);
          adj[e[j]].insert(e[i]);
        }
    std::vector<std::vector<int>> out(n);
    for (int v = 0; v < n; ++v) out[v].assign(adj[v].begin(), adj[v].end());
    return out;
  }

  // 2-uniform hypergraph on the same vertex set whose edges are all
  // co-occurring pairs. Self-loops never arise (pairs are of distinct
  // vertices by construction).
  Hypergraph primal_graph() const {
    std::vector<std::vector<int>> pairs;
    for (const auto& e : edges)
      for (size_t i = 0; i < e.size(); ++i)
        for (size_t j = i + 1; j < e.size(); ++j) pairs.push_back({e[i], e[j]});
    Hypergraph g = from_edges(n, std::move(pairs));
    g.labels = labels;
    return g;
  }

  // Connected components of the co-occurrence graph, each sorted; component
  // list ordered by smallest member.
  std::vector<std::vector<int>> components() const {
    auto adj = adjacency();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n; ++s) {
      if (comp[s] != -1) continue;
      int id = static_cast<int>(out.size());
      out.emplace_back();
      std::vector<int> stack{s};
      comp[s] = id;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        out[id].push_back(v);
        for (int w : adj[v])
          if (comp[w] == -1) {
            comp[w] = id;
            stack.push_back(w);
          }
      }
      std::sort(out[id].begin(), out[id].end());
    }
    return out;
  }

  bool connected() const { return n <= 1 || components().size() == 1; }
};

// Plain graph helpers used by the width and separator machinery.
inline void require_graph(const Hypergraph& g, const char* who) {
  if (!g.is_graph()) throw BadScope(std::string(who) + ": expected a 2-uniform hypergraph");
}

inline Hypergraph complete_graph(int k) {
  std::vector<std::vector<int>> e;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) e.push_back({i, j});
  return Hypergraph::from_edges(k, std::move(e));
}

inline Hypergraph grid_graph(int rows, int cols) {
  std::vector<std::vector<int>> e;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < rows) e.push_back({id(r, c), id(r + 1, c)});
    }
  return Hypergraph::from_edges(rows * cols, std::move(e));
}

inline Hypergraph path_graph(int k) {
  std::vector<std::vector<int>> e;
  for (int i = 0; i + 1 < k; ++i) e.push_back({i, i + 1});
  return Hypergraph::from_edges(k, std::move(e));
}

}  // namespace homfactor

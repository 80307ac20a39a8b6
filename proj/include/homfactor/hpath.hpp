#pragma once

#include <algorithm>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/hypergraph.hpp"

namespace homfactor {

// Paths are plain vertex sequences in the Gaifman graph of a hypergraph:
// consecutive vertices co-occur in some edge, all vertices distinct. Length
// is the number of vertices, so a single vertex is a path of length 1.
using HPath = std::vector<int>;

constexpr int kDefaultMaxPathLen = 6;
constexpr long long kDefaultPathBudget = 10'000'000;

// P is minimal when no proper subsequence with the same endpoints is still a
// path, which for simple paths is exactly the no-chord condition: vertices
// at distance >= 2 along P are never adjacent.
inline bool path_is_minimal(const std::vector<std::vector<char>>& adj, const HPath& p) {
  for (size_t i = 0; i + 2 < p.size(); ++i)
    for (size_t j = i + 2; j < p.size(); ++j)
      if (adj[p[i]][p[j]]) return false;
  return true;
}

namespace detail {

inline std::vector<std::vector<char>> gaifman_matrix(const Hypergraph& h) {
  std::vector<std::vector<char>> adj(h.n, std::vector<char>(h.n, 0));
  for (const auto& e : h.edges)
    for (size_t i = 0; i < e.size(); ++i)
      for (size_t j = i + 1; j < e.size(); ++j) adj[e[i]][e[j]] = adj[e[j]][e[i]] = 1;
  return adj;
}

inline std::vector<int> sorted_unique_vertices(const Hypergraph& h, const std::vector<int>& vs,
                                               const char* who) {
  std::vector<int> out = vs;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int v : out)
    if (v < 0 || v >= h.n) throw BadScope(std::string(who) + ": vertex out of range");
  return out;
}

}  // namespace detail

// All simple minimal (A,B)-paths of length <= max_len, in lexicographic
// order of the vertex sequence. Minimality is enforced during the DFS: a
// vertex may extend the path only when its sole neighbor on the path is the
// current endpoint, so every emitted sequence is chordless by construction.
inline std::vector<HPath> enumerate_paths(const Hypergraph& h, const std::vector<int>& A,
                                          const std::vector<int>& B,
                                          int max_len = kDefaultMaxPathLen,
                                          long long budget = kDefaultPathBudget) {
  if (max_len < 1) throw BadScope("enumerate_paths: max_len must be at least 1");
  std::vector<int> a = detail::sorted_unique_vertices(h, A, "enumerate_paths");
  std::vector<int> b = detail::sorted_unique_vertices(h, B, "enumerate_paths");
  auto adj = detail::gaifman_matrix(h);
  std::vector<char> in_b(h.n, 0);
  for (int v : b) in_b[v] = 1;

  std::vector<HPath> out;
  std::vector<char> on_path(h.n, 0);
  HPath path;
  long long nodes = 0;

  auto extendable = [&](int u) {
    if (on_path[u] || !adj[path.back()][u]) return false;
    for (size_t i = 0; i + 1 < path.size(); ++i)
      if (adj[path[i]][u]) return false;
    return true;
  };

  // recursive lambda; depth bounded by max_len
  auto dfs = [&](auto&& self) -> void {
    if (++nodes > budget) throw BudgetExceeded("path enumeration exceeded node budget");
    if (in_b[path.back()]) out.push_back(path);
    if (static_cast<int>(path.size()) == max_len) return;
    for (int u = 0; u < h.n; ++u) {
      if (!extendable(u)) continue;
      path.push_back(u);
      on_path[u] = 1;
      self(self);
      on_path[u] = 0;
      path.pop_back();
    }
  };

  for (int s : a) {
    path.assign(1, s);
    on_path[s] = 1;
    dfs(dfs);
    on_path[s] = 0;
  }
  return out;
}

}  // namespace homfactor

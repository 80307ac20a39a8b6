#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/hypergraph.hpp"

namespace homfactor {

// Result of the exhaustive balanced-separator search. `separator` holds a
// witnessing S when one exists; an empty optional is an exhaustion
// certificate: all subsets of size <= k were checked (subsets_checked many)
// and none was balanced.
struct SeparatorWitness {
  std::vector<int> W;
  int k = 0;
  std::optional<std::vector<int>> separator;
  unsigned long long subsets_checked = 0;

  bool balanced_separator_exists() const { return separator.has_value(); }
};

constexpr int kDefaultHcsCap = 14;
constexpr long long kDefaultSeparatorBudget = 50'000'000;

namespace detail {

inline std::vector<std::uint64_t> adjacency_masks(const Hypergraph& g) {
  require_graph(g, "separator search");
  if (g.n > 64) throw TooLarge("separator search supports at most 64 vertices");
  std::vector<std::uint64_t> adj(g.n, 0);
  for (const auto& e : g.edges) {
    adj[e[0]] |= (1ULL << e[1]);
    adj[e[1]] |= (1ULL << e[0]);
  }
  return adj;
}

// Is S balanced for W: every component C of G - S has 2|W cap C| <= |W|.
// Exact integer arithmetic; no rounding anywhere.
inline bool is_balanced_separator(const std::vector<std::uint64_t>& adj, int n,
                                  std::uint64_t w_mask, int w_size, std::uint64_t s_mask) {
  std::uint64_t alive = ((n == 64) ? ~0ULL : ((1ULL << n) - 1)) & ~s_mask;
  std::uint64_t todo = alive;
  while (todo) {
    int v = std::countr_zero(todo);
    std::uint64_t comp = 1ULL << v;
    std::uint64_t frontier = comp;
    while (frontier) {
      std::uint64_t reach = 0;
      std::uint64_t f = frontier;
      while (f) {
        int u = std::countr_zero(f);
        f &= f - 1;
        reach |= adj[u];
      }
      std::uint64_t grown = comp | (reach & alive);
      frontier = grown ^ comp;
      comp = grown;
    }
    if (2 * std::popcount(comp & w_mask) > w_size) return false;
    todo &= ~comp;
  }
  return true;
}

// Visit all size-r subsets of [n] in lexicographic order.
template <typename Visit>
bool for_each_subset(int n, int r, Visit&& visit) {
  if (r > n) return true;
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  for (;;) {
    if (!visit(idx)) return false;
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// Exhaustive search for a balanced k-separator of W: S with |S| <= k such
// that every component of G - S contains at most |W|/2 vertices of W.
// Candidates are tried in order of size, lexicographic within a size, so the
// returned separator is canonical.
inline SeparatorWitness has_balanced_separator(const Hypergraph& g, const std::vector<int>& W,
                                               int k, long long budget = kDefaultSeparatorBudget) {
  auto adj = detail::adjacency_masks(g);
  SeparatorWitness out;
  out.W = W;
  out.k = k;
  std::uint64_t w_mask = 0;
  for (int v : W) {
    if (v < 0 || v >= g.n) throw BadScope("has_balanced_separator: W vertex out of range");
    w_mask |= 1ULL << v;
  }
  int w_size = static_cast<int>(W.size());
  long long checked = 0;
  for (int size = 0; size <= k && !out.separator; ++size) {
    detail::for_each_subset(g.n, size, [&](const std::vector<int>& idx) {
      if (++checked > budget) throw BudgetExceeded("balanced separator search exceeded budget");
      std::uint64_t s_mask = 0;
      for (int v : idx) s_mask |= 1ULL << v;
      if (detail::is_balanced_separator(adj, g.n, w_mask, w_size, s_mask)) {
        out.separator = idx;
        return false;
      }
      return true;
    });
  }
  out.subsets_checked = static_cast<unsigned long long>(checked);
  return out;
}

struct HcsResult {
  std::optional<std::vector<int>> W;
  int k = 0;
  unsigned long long candidates_tried = 0;
};

// Search for a highly connected set: W of size 2k+1 with no balanced
// k-separator. Exhaustive over W candidates in lexicographic order; every
// negative answer rests on an exhausted separator search, so a returned W is
// a certificate. Graphs with treewidth > 3k always have one.
inline HcsResult find_hcs(const Hypergraph& g, int k, int cap = kDefaultHcsCap,
                          long long budget = kDefaultSeparatorBudget) {
  if (g.n > cap)
    throw TooLarge("find_hcs: " + std::to_string(g.n) + " vertices exceeds cap " +
                   std::to_string(cap));
  HcsResult res;
  res.k = k;
  int target = 2 * k + 1;
  if (target > g.n) return res;
  detail::for_each_subset(g.n, target, [&](const std::vector<int>& w) {
    ++res.candidates_tried;
    SeparatorWitness wit = has_balanced_separator(g, w, k, budget);
    if (!wit.balanced_separator_exists()) {
      res.W = w;
      return false;
    }
    return true;
  });
  return res;
}

}  // namespace homfactor

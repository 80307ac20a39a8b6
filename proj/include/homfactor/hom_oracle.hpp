#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/function_set.hpp"
#include "homfactor/structure.hpp"

namespace homfactor {

// Partial map universe(a) -> universe(b) with explicit domain; parallel
// arrays sorted by variable index.
struct Assignment {
  std::vector<int> vars;
  std::vector<int> vals;

  static Assignment total(const std::vector<int>& image) {
    Assignment h;
    h.vars.resize(image.size());
    for (size_t i = 0; i < image.size(); ++i) h.vars[i] = static_cast<int>(i);
    h.vals = image;
    return h;
  }
};

constexpr long long kDefaultOracleBudget = 100'000'000;  // search nodes

namespace detail {

// One constraint per tuple of a relation of `a`: check the image tuple's
// membership in the corresponding relation of `b` as soon as the last
// variable of the tuple gets a value.
struct OracleIndex {
  struct Check {
    int rel;
    const std::vector<int>* tuple;
  };
  std::vector<std::vector<Check>> by_level;  // keyed by the tuple's max variable

  explicit OracleIndex(const Structure& a) {
    by_level.resize(a.universe.size());
    for (size_t r = 0; r < a.relations.size(); ++r)
      for (const auto& t : a.relations[r]) {
        int level = *std::max_element(t.begin(), t.end());
        by_level[level].push_back({static_cast<int>(r), &t});
      }
  }
};

inline bool tuple_in_relation(const std::vector<std::vector<int>>& rel, const std::vector<int>& t) {
  auto it = std::lower_bound(rel.begin(), rel.end(), t);
  return it != rel.end() && *it == t;
}

// Backtracking enumeration in lexicographic order: variables in universe
// order of `a`, candidate values in universe order of `b`. Visit is called on
// every homomorphism; every attempted assignment costs one budget node.
template <typename Visit>
void search(const Structure& a, const Structure& b, long long budget, Visit&& visit) {
  require_same_signature(a, b, "homomorphism oracle");
  int n = a.size_of_universe();
  int m = b.size_of_universe();
  if (n == 0) {
    visit(std::vector<int>{});
    return;
  }
  if (m == 0) return;
  // Sorted copies of b's relations for binary-search membership; b may carry
  // file-ordered tuples.
  std::vector<std::vector<std::vector<int>>> brel = b.relations;
  for (auto& rel : brel) std::sort(rel.begin(), rel.end());
  OracleIndex index(a);
  std::vector<int> h(n, -1);
  std::vector<int> img;
  long long nodes = 0;
  auto checks_pass = [&](int level) {
    for (const auto& chk : index.by_level[level]) {
      img.clear();
      for (int v : *chk.tuple) img.push_back(h[v]);
      if (!tuple_in_relation(brel[chk.rel], img)) return false;
    }
    return true;
  };
  // Iterative DFS; cur[l] is the value currently tried at level l (-1: none).
  std::vector<int> cur(n, -1);
  int level = 0;
  while (true) {
    int v = cur[level] + 1;
    bool placed = false;
    while (v < m) {
      if (++nodes > budget) throw BudgetExceeded("homomorphism search exceeded node budget");
      h[level] = v;
      if (checks_pass(level)) {
        placed = true;
        break;
      }
      ++v;
    }
    cur[level] = v;
    if (!placed) {
      h[level] = -1;
      cur[level] = -1;
      if (level == 0) break;
      --level;
      continue;
    }
    if (level == n - 1) {
      visit(const_cast<const std::vector<int>&>(h));
      continue;
    }
    ++level;
  }
}

}  // namespace detail

// h must be total over universe(a); checks the homomorphism condition on
// every tuple of every relation.
inline bool is_homomorphism(const Assignment& h, const Structure& a, const Structure& b) {
  require_same_signature(a, b, "is_homomorphism");
  int n = a.size_of_universe();
  std::vector<int> total(n, -1);
  for (size_t i = 0; i < h.vars.size(); ++i) {
    if (h.vars[i] < 0 || h.vars[i] >= n) throw BadScope("is_homomorphism: variable out of range");
    total[h.vars[i]] = h.vals[i];
  }
  for (int v = 0; v < n; ++v)
    if (total[v] < 0)
      throw PartialAssignment("is_homomorphism: assignment leaves " + a.universe[v] + " unmapped");
  for (int val : total)
    if (val < 0 || val >= b.size_of_universe()) throw BadScope("is_homomorphism: value out of range");
  std::vector<std::vector<std::vector<int>>> brel = b.relations;
  for (auto& rel : brel) std::sort(rel.begin(), rel.end());
  std::vector<int> img;
  for (size_t r = 0; r < a.relations.size(); ++r)
    for (const auto& t : a.relations[r]) {
      img.clear();
      for (int v : t) img.push_back(total[v]);
      if (!detail::tuple_in_relation(brel[r], img)) return false;
    }
  return true;
}

// Ground truth for everything downstream: the full homomorphism set in
// lexicographic order (variables in universe order of a, values in universe
// order of b).
inline FunctionSet enumerate_homs(const Structure& a, const Structure& b,
                                  long long budget = kDefaultOracleBudget) {
  int n = a.size_of_universe();
  FunctionSet out;
  out.vars.resize(n);
  for (int v = 0; v < n; ++v) out.vars[v] = v;
  detail::search(a, b, budget, [&](const std::vector<int>& h) {
    for (int v : h) out.rows.push_back(v);
    ++out.nrows;
  });
  // rows arrive in lexicographic order already; nothing to normalize
  return out;
}

inline long long count_homs(const Structure& a, const Structure& b,
                            long long budget = kDefaultOracleBudget) {
  long long count = 0;
  detail::search(a, b, budget, [&](const std::vector<int>&) { ++count; });
  return count;
}

// Drop every tuple of b that no homomorphism a -> b uses. Hom(a, reduced) ==
// Hom(a, b) and the reduced structure is minimal with that property.
inline Structure reduce_structure(const Structure& a, const Structure& b,
                                  long long budget = kDefaultOracleBudget) {
  require_same_signature(a, b, "reduce_structure");
  std::vector<std::set<std::vector<int>>> used(b.relations.size());
  std::vector<int> img;
  detail::search(a, b, budget, [&](const std::vector<int>& h) {
    for (size_t r = 0; r < a.relations.size(); ++r)
      for (const auto& t : a.relations[r]) {
        img.clear();
        for (int v : t) img.push_back(h[v]);
        used[r].insert(img);
      }
  });
  Structure out = b;
  for (size_t r = 0; r < out.relations.size(); ++r) {
    std::vector<std::vector<int>> kept;
    for (const auto& t : out.relations[r])
      if (used[r].count(t)) kept.push_back(t);
    out.relations[r] = std::move(kept);
  }
  return out;
}

// dom(v) relative to a homomorphism set: the values v takes, sorted.
inline std::vector<int> dom_of(const FunctionSet& homs, int var) {
  auto it = std::lower_bound(homs.vars.begin(), homs.vars.end(), var);
  if (it == homs.vars.end() || *it != var) throw BadScope("dom_of: variable not in domain");
  size_t col = static_cast<size_t>(it - homs.vars.begin());
  std::set<int> vals;
  for (size_t i = 0; i < homs.nrows; ++i) vals.insert(homs.row(i)[col]);
  return {vals.begin(), vals.end()};
}

}  // namespace homfactor

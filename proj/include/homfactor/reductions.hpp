#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/function_set.hpp"
#include "homfactor/hom_oracle.hpp"
#include "homfactor/structure.hpp"

namespace homfactor {

namespace detail {

inline std::string color_name(const std::string& elem) { return "P_" + elem; }

// Index of element e's color class P_e if the structure carries it with the
// exact singleton content, -1 otherwise.
inline int color_index(const Structure& s, int e) {
  int idx = s.sig.index_of(color_name(s.universe[e]));
  if (idx < 0) return -1;
  if (s.sig.symbols[idx].arity != 1) return -1;
  const auto& rel = s.relations[idx];
  if (rel.size() != 1 || rel[0] != std::vector<int>{e}) return -1;
  return idx;
}

// Symbol indices that are not a color class of any element: the base
// signature that sparsification splits.
inline std::vector<int> base_symbols(const Structure& s) {
  std::vector<char> is_color(s.sig.symbols.size(), 0);
  for (int e = 0; e < s.size_of_universe(); ++e) {
    int idx = color_index(s, e);
    if (idx >= 0) is_color[idx] = 1;
  }
  std::vector<int> out;
  for (size_t r = 0; r < s.sig.symbols.size(); ++r)
    if (!is_color[r]) out.push_back(static_cast<int>(r));
  return out;
}

inline std::string sp_name(const Structure& s, const std::string& rel,
                           const std::vector<int>& tuple) {
  std::string name = rel + "[";
  for (size_t i = 0; i < tuple.size(); ++i) {
    if (i) name += ",";
    name += s.universe[tuple[i]];
  }
  return name + "]";
}

// Check a family of value sets for pairwise disjointness; on failure name the
// two variables sharing an element. The shared premise of the sparsify and
// order transforms ("coordinate respecting").
inline void require_disjoint_doms(const Structure& a, const Structure& d,
                                  const std::vector<std::vector<int>>& doms, const char* who) {
  std::vector<int> owner(d.size_of_universe(), -1);
  for (size_t v = 0; v < doms.size(); ++v)
    for (int y : doms[v]) {
      if (owner[y] >= 0)
        throw NotCoordinateRespecting(std::string(who) + ": element " + d.universe[y] +
                                      " lies in both dom(" + a.universe[owner[y]] + ") and dom(" +
                                      a.universe[v] + ")");
      owner[y] = static_cast<int>(v);
    }
}

}  // namespace detail

// True when every element carries its singleton color class P_e = {e}.
inline bool is_individualized(const Structure& s) {
  for (int e = 0; e < s.size_of_universe(); ++e)
    if (detail::color_index(s, e) < 0) return false;
  return true;
}

// Extend the signature with one unary color class per element. Colors pin
// each query variable to its own image set downstream, which is what makes
// the sparsified signature meaningful. Adding again is a no-op; a foreign
// relation squatting on a P_ name with other content is an error.
inline Structure individualize(const Structure& a) {
  ValidationReport rep = validate_structure(a);
  if (!rep.ok()) throw BadScope("individualize: " + rep.violations.front());
  Structure out = a;
  for (int e = 0; e < a.size_of_universe(); ++e) {
    std::string name = detail::color_name(a.universe[e]);
    int idx = out.sig.index_of(name);
    if (idx >= 0) {
      if (detail::color_index(out, e) != idx)
        throw BadScope("individualize: symbol " + name +
                       " already exists with content other than {" + a.universe[e] + "}");
      continue;
    }
    out.add_symbol(name, 1);
    out.add_tuple(name, {e});
  }
  return out;
}

namespace detail {

// a^sp plus, per base symbol, the split-symbol index of each of its tuples.
inline std::pair<Structure, std::vector<std::vector<int>>> sparsify_with_map(const Structure& a) {
  if (!is_individualized(a))
    throw BadScope("sparsify: expects an individualized structure (run individualize first)");
  require_connected(a, "sparsify");
  Structure sp;
  sp.universe = a.universe;
  std::vector<int> base = base_symbols(a);
  std::vector<std::vector<int>> where(a.sig.symbols.size());
  for (int r : base) {
    const auto& sym = a.sig.symbols[r];
    for (const auto& t : a.relations[r]) {
      std::string name = sp_name(a, sym.name, t);
      if (sp.sig.index_of(name) >= 0)
        throw BadScope("sparsify: split symbol name collision on " + name);
      where[r].push_back(static_cast<int>(sp.sig.symbols.size()));
      sp.add_symbol(name, sym.arity);
      sp.add_tuple(name, t);
    }
  }
  return {std::move(sp), std::move(where)};
}

}  // namespace detail

// The split signature: one singleton relation R_t per tuple t of each base
// relation of a. Color classes stay behind; their job passes to the
// coordinate-respect condition on the data side.
inline Structure sparsify_query(const Structure& a) { return detail::sparsify_with_map(a).first; }

struct SparsifyResult {
  Structure a_sp;
  Structure b;
};

// Given an individualized query a and data d over the split signature, undo
// the split: R^B collects the tuples of every R_t, and each color class P_e
// becomes dom(e), the values e takes across Hom(a^sp, d). Requires d to be
// coordinate respecting (doms pairwise disjoint) and reduced (every tuple
// realized by some homomorphism); under those two conditions Hom(a, B) and
// Hom(a^sp, d) coincide, and the oracle re-checks that equality before
// returning.
inline SparsifyResult sparsify_pair(const Structure& a, const Structure& d,
                                    long long budget = kDefaultOracleBudget) {
  auto [a_sp, where] = detail::sparsify_with_map(a);
  require_same_signature(a_sp, d, "sparsify_pair");

  FunctionSet homs = enumerate_homs(a_sp, d, budget);
  int n = a.size_of_universe();
  std::vector<std::vector<int>> doms(n);
  for (int v = 0; v < n; ++v) doms[v] = dom_of(homs, v);
  detail::require_disjoint_doms(a, d, doms, "sparsify_pair");

  // reduced: every data tuple must be the image of its query tuple under
  // some homomorphism
  std::vector<int> img;
  std::vector<std::set<std::vector<int>>> realized(d.relations.size());
  for (size_t r = 0; r < a_sp.relations.size(); ++r) {
    const auto& t = a_sp.relations[r][0];
    for (std::size_t i = 0; i < homs.size(); ++i) {
      const std::int32_t* h = homs.row(i);
      img.clear();
      for (int v : t) img.push_back(h[v]);
      realized[r].insert(img);
    }
  }
  for (size_t r = 0; r < d.relations.size(); ++r)
    for (const auto& t : d.relations[r])
      if (!realized[r].count(t))
        throw NotReduced("sparsify_pair: d is not reduced: a tuple of " + d.sig.symbols[r].name +
                         " is realized by no homomorphism");

  Structure b;
  b.universe = d.universe;
  for (const auto& sym : a.sig.symbols) b.add_symbol(sym.name, sym.arity);
  for (size_t r = 0; r < a.sig.symbols.size(); ++r)
    for (int split : where[r])
      for (const auto& t : d.relations[split]) b.add_tuple(a.sig.symbols[r].name, t);
  for (int e = 0; e < n; ++e) {
    int c = detail::color_index(a, e);
    for (int y : doms[e]) b.relations[c].push_back({y});
  }
  for (int e = 0; e < n; ++e) {
    int c = detail::color_index(a, e);
    std::sort(b.relations[c].begin(), b.relations[c].end());
  }

  if (!(enumerate_homs(a, b, budget) == homs))
    throw Error("sparsify_pair: internal check failed: Hom(a,B) differs from Hom(a^sp,d)");
  return {std::move(a_sp), std::move(b)};
}

namespace detail {

inline std::vector<int> order_ranks(const Structure& a, const std::vector<int>& order,
                                    const char* who) {
  int n = a.size_of_universe();
  if (static_cast<int>(order.size()) != n)
    throw BadScope(std::string(who) + ": order must list every universe element exactly once");
  std::vector<int> rank(n, -1);
  for (int i = 0; i < n; ++i) {
    int e = order[i];
    if (e < 0 || e >= n || rank[e] >= 0)
      throw BadScope(std::string(who) + ": order is not a permutation of the universe");
    rank[e] = i;
  }
  return rank;
}

inline void require_single_tuple(const Structure& a, const char* who) {
  for (size_t r = 0; r < a.relations.size(); ++r)
    if (a.relations[r].size() != 1)
      throw BadScope(std::string(who) + ": every relation must hold exactly one tuple (" +
                     a.sig.symbols[r].name + " holds " + std::to_string(a.relations[r].size()) +
                     ")");
}

// t sorted-deduplicated by rank: the distinct coordinates in <=-order.
inline std::vector<int> sorted_tuple(const std::vector<int>& t, const std::vector<int>& rank) {
  std::vector<int> s = t;
  std::sort(s.begin(), s.end(), [&](int x, int y) { return rank[x] < rank[y]; });
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace detail

// a^<=: each relation's unique tuple replaced by its distinct coordinates in
// <=-order, under a fresh symbol R_le of the (possibly smaller) arity.
inline Structure order_query(const Structure& a, const std::vector<int>& order) {
  ValidationReport rep = validate_structure(a);
  if (!rep.ok()) throw BadScope("order_query: " + rep.violations.front());
  detail::require_single_tuple(a, "order_query");
  std::vector<int> rank = detail::order_ranks(a, order, "order_query");
  Structure out;
  out.universe = a.universe;
  for (size_t r = 0; r < a.sig.symbols.size(); ++r) {
    std::vector<int> s = detail::sorted_tuple(a.relations[r][0], rank);
    std::string name = a.sig.symbols[r].name + "_le";
    if (out.sig.index_of(name) >= 0 || a.sig.index_of(name) >= 0)
      throw BadScope("order_query: symbol name collision on " + name);
    out.add_symbol(name, static_cast<int>(s.size()));
    out.add_tuple(name, s);
  }
  return out;
}

struct OrderResult {
  Structure a_le;
  Structure b;
};

// Undo the ordering: data d over the signature of a^<= comes back to the
// original arities through the coordinate-repetition map f (position j of
// R's tuple = position f(j) of the sorted tuple). d must be order respecting:
// the value blocks dom(x) are pairwise disjoint and every data tuple runs
// through them in strictly increasing <=-order of their variables. The
// oracle re-checks Hom(a, B) = Hom(a^<=, d) before returning.
inline OrderResult order_pair(const Structure& a, const std::vector<int>& order,
                              const Structure& d, long long budget = kDefaultOracleBudget) {
  Structure a_le = order_query(a, order);
  require_same_signature(a_le, d, "order_pair");
  std::vector<int> rank = detail::order_ranks(a, order, "order_pair");

  FunctionSet homs = enumerate_homs(a_le, d, budget);
  int n = a.size_of_universe();
  std::vector<std::vector<int>> doms(n);
  for (int v = 0; v < n; ++v) doms[v] = dom_of(homs, v);
  detail::require_disjoint_doms(a, d, doms, "order_pair");

  std::vector<int> var_of(d.size_of_universe(), -1);
  for (int v = 0; v < n; ++v)
    for (int y : doms[v]) var_of[y] = v;
  for (size_t r = 0; r < d.relations.size(); ++r)
    for (const auto& s : d.relations[r])
      for (size_t j = 0; j + 1 < s.size(); ++j) {
        int x1 = var_of[s[j]], x2 = var_of[s[j + 1]];
        if (x1 < 0 || x2 < 0)
          throw NotOrderRespecting("order_pair: d is not order respecting: a tuple of " +
                                   d.sig.symbols[r].name + " has a coordinate outside every dom");
        if (rank[x1] >= rank[x2])
          throw NotOrderRespecting("order_pair: d is not order respecting: a tuple of " +
                                   d.sig.symbols[r].name + " runs through dom(" + a.universe[x1] +
                                   ") and dom(" + a.universe[x2] + ") against the order");
      }

  Structure b;
  b.universe = d.universe;
  for (const auto& sym : a.sig.symbols) b.add_symbol(sym.name, sym.arity);
  std::vector<int> u;
  for (size_t r = 0; r < a.sig.symbols.size(); ++r) {
    const std::vector<int>& t = a.relations[r][0];
    std::vector<int> sorted = detail::sorted_tuple(t, rank);
    std::vector<int> f(t.size());
    for (size_t j = 0; j < t.size(); ++j)
      f[j] = static_cast<int>(std::find(sorted.begin(), sorted.end(), t[j]) - sorted.begin());
    for (const auto& s : d.relations[r]) {
      u.clear();
      for (size_t j = 0; j < t.size(); ++j) u.push_back(s[f[j]]);
      b.add_tuple(a.sig.symbols[r].name, u);
    }
  }

  if (!(enumerate_homs(a, b, budget) == homs))
    throw Error("order_pair: internal check failed: Hom(a,B) differs from Hom(a^<=,d)");
  return {std::move(a_le), std::move(b)};
}

}  // namespace homfactor

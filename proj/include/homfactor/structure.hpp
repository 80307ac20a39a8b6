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

struct RelationSymbol {
  std::string name;
  int arity = 0;

  bool operator==(const RelationSymbol&) const = default;
};

struct Signature {
  std::vector<RelationSymbol> symbols;

  bool operator==(const Signature&) const = default;

  int index_of(const std::string& name) const {
    for (size_t i = 0; i < symbols.size(); ++i)
      if (symbols[i].name == name) return static_cast<int>(i);
    return -1;
  }
};

// Finite relational structure. Universe elements are interned: tuples hold
// indices into `universe`, and all deterministic iteration follows universe
// order and stored tuple order. Tuple lists are sets; construction helpers
// keep them sorted and duplicate-free, while parsed files keep file order so
// serialization round-trips byte-exactly (validation flags duplicates).
struct Structure {
  Signature sig;
  std::vector<std::string> universe;
  std::vector<std::vector<std::vector<int>>> relations;  // per symbol, tuples of element indices

  int element_index(const std::string& name) const {
    for (size_t i = 0; i < universe.size(); ++i)
      if (universe[i] == name) return static_cast<int>(i);
    return -1;
  }

  int size_of_universe() const { return static_cast<int>(universe.size()); }

  // ||A||: total number of tuples across all relations.
  long long total_tuples() const {
    long long t = 0;
    for (const auto& rel : relations) t += static_cast<long long>(rel.size());
    return t;
  }

  void add_symbol(const std::string& name, int arity) {
    if (arity < 1) throw BadScope("relation arity must be positive: " + name);
    sig.symbols.push_back({name, arity});
    relations.emplace_back();
  }

  // Insert keeping the relation sorted and duplicate-free.
  void add_tuple(const std::string& rel_name, const std::vector<int>& tuple) {
    int r = sig.index_of(rel_name);
    if (r < 0) throw BadScope("unknown relation symbol: " + rel_name);
    if (static_cast<int>(tuple.size()) != sig.symbols[r].arity)
      throw BadScope("tuple arity mismatch for " + rel_name);
    for (int e : tuple)
      if (e < 0 || e >= size_of_universe()) throw BadScope("tuple element out of range in " + rel_name);
    auto& rel = relations[r];
    auto it = std::lower_bound(rel.begin(), rel.end(), tuple);
    if (it == rel.end() || *it != tuple) rel.insert(it, tuple);
  }

  void add_tuple_by_name(const std::string& rel_name, const std::vector<std::string>& names) {
    std::vector<int> t;
    t.reserve(names.size());
    for (const auto& n : names) {
      int e = element_index(n);
      if (e < 0) throw BadScope("unknown element: " + n);
      t.push_back(e);
    }
    add_tuple(rel_name, t);
  }

  bool operator==(const Structure&) const = default;
};

inline ValidationReport validate_structure(const Structure& s) {
  ValidationReport rep;
  std::set<std::string> sym_names;
  for (const auto& sym : s.sig.symbols) {
    if (sym.arity < 1) rep.violation("relation " + sym.name + " has arity < 1");
    if (!sym_names.insert(sym.name).second) rep.violation("duplicate relation symbol " + sym.name);
  }
  std::set<std::string> elt_names;
  for (const auto& e : s.universe)
    if (!elt_names.insert(e).second) rep.violation("duplicate universe element " + e);
  if (s.relations.size() != s.sig.symbols.size()) {
    rep.violation("relation list does not match signature length");
    return rep;
  }
  for (size_t r = 0; r < s.relations.size(); ++r) {
    const auto& sym = s.sig.symbols[r];
    std::set<std::vector<int>> seen;
    for (const auto& t : s.relations[r]) {
      if (static_cast<int>(t.size()) != sym.arity)
        rep.violation("tuple of wrong arity in " + sym.name);
      for (int e : t)
        if (e < 0 || e >= s.size_of_universe())
          rep.violation("tuple element out of universe in " + sym.name);
      if (!seen.insert(t).second) rep.violation("duplicate tuple in " + sym.name);
    }
  }
  return rep;
}

// Hypergraph of a structure: vertex set = universe, one edge per distinct
// tuple support set. A tuple like R(x,x) yields the singleton edge {x}.
inline Hypergraph hypergraph_of(const Structure& s) {
  std::vector<std::vector<int>> edges;
  for (const auto& rel : s.relations)
    for (const auto& t : rel) edges.push_back(t);
  Hypergraph h = Hypergraph::from_edges(s.size_of_universe(), std::move(edges));
  h.labels = s.universe;
  return h;
}

// Gaifman graph: co-occurrence pairs, no self-loops.
inline Hypergraph gaifman_graph(const Structure& s) { return hypergraph_of(s).primal_graph(); }

inline bool is_connected(const Structure& s) { return hypergraph_of(s).connected(); }

inline void require_connected(const Structure& s, const char* who) {
  if (!is_connected(s))
    throw DisconnectedQuery(std::string(who) + ": query structure must be connected");
}

inline void require_same_signature(const Structure& a, const Structure& b, const char* who) {
  if (!(a.sig == b.sig))
    throw SignatureMismatch(std::string(who) + ": structures must share a signature");
}

// Structure encoding of an undirected graph: one binary symbol E holding both
// orientations of every edge, so structure homomorphisms are exactly graph
// homomorphisms.
inline Structure structure_of_graph(const Hypergraph& g, const std::string& rel_name = "E") {
  require_graph(g, "structure_of_graph");
  Structure s;
  for (int v = 0; v < g.n; ++v) s.universe.push_back(g.label(v));
  s.add_symbol(rel_name, 2);
  for (const auto& e : g.edges) {
    s.add_tuple(rel_name, {e[0], e[1]});
    s.add_tuple(rel_name, {e[1], e[0]});
  }
  return s;
}

}  // namespace homfactor

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "homfactor/circuit.hpp"
#include "homfactor/circuit_eval.hpp"
#include "homfactor/errors.hpp"
#include "homfactor/function_set.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/rational.hpp"
#include "homfactor/rectangle.hpp"

namespace homfactor {

// Balanced rectangle covers extracted from circuits. Every gate g of a valid
// circuit induces the rectangle S(g) x comp(g) over the split
// (var(g), X \ var(g)), where comp(g) collects the ways a partial function
// computed at g extends to a full member of S(C). Keeping the rectangles of
// exactly the f-balanced gates yields a cover of S(C) of size at most |C|.

struct RectangleCover {
  std::vector<Rectangle> rects;
  FunctionSet target;  // S(C), what the rectangles jointly cover
};

// Completion sets for every gate, by pushing contexts down from the sink:
// comp(sink) = {empty function}; a union gate passes its context through
// unchanged (smoothness keeps the var sets equal); a times gate extends the
// context of each child by the sibling's computed set. A gate the sink cannot
// reach keeps an empty completion set. Assumes the circuit is structurally
// sound (ids in range, acyclic); run validate_circuit first when in doubt.
namespace detail {

// Bottom-up per-gate sets like eval_circuit computes, but tolerating gates
// the sink cannot reach (the completion recurrence is defined for those too:
// they complete to nothing). Acyclicity and child ranges are still enforced.
inline std::vector<FunctionSet> all_gate_sets(const Circuit& c, long long cell_budget) {
  int n = c.size();
  for (int i = 0; i < n; ++i) {
    const Gate& g = c.gates[i];
    if (g.kind == Gate::Kind::Input) {
      if (g.a < 0 || g.a >= c.nvars() || g.b < 0)
        throw BadScope("completion_sets: malformed input gate " + std::to_string(i));
    } else if (g.a < 0 || g.a >= n || g.b < 0 || g.b >= n) {
      throw BadScope("completion_sets: gate " + std::to_string(i) + " child out of range");
    }
  }
  std::vector<FunctionSet> sets(n);
  long long cells = 0;
  for (int g : topo_order(c)) {
    const Gate& gate = c.gates[g];
    if (gate.kind == Gate::Kind::Input) {
      sets[g].vars = {gate.a};
      sets[g].push_row({gate.b});
    } else if (gate.kind == Gate::Kind::Times) {
      sets[g] = set_product(sets[gate.a], sets[gate.b]);
    } else {
      sets[g] = set_union(sets[gate.a], sets[gate.b]);
    }
    cells += static_cast<long long>(sets[g].size()) *
             static_cast<long long>(std::max<std::size_t>(sets[g].arity(), 1));
    if (cells > cell_budget) throw BudgetExceeded("completion_sets: cell budget exhausted");
  }
  return sets;
}

inline std::vector<FunctionSet> completion_sets_from(const Circuit& c,
                                                     const std::vector<FunctionSet>& sets,
                                                     long long cell_budget) {
  std::vector<std::uint64_t> mask = var_masks(c);
  std::uint64_t full = c.nvars() == 64 ? ~0ULL : (1ULL << c.nvars()) - 1;
  if (mask[c.output] != full)
    throw BadScope("completion_sets: output gate does not cover all variables");

  std::vector<FunctionSet> comp(c.gates.size());
  for (int g = 0; g < c.size(); ++g)
    comp[g] = FunctionSet::empty_set(vars_of_mask(full & ~mask[g]));
  comp[c.output] = FunctionSet::unit();

  long long cells = 0;
  auto charge = [&](const FunctionSet& f) {
    cells += static_cast<long long>(f.size()) * static_cast<long long>(std::max<std::size_t>(
                                                    f.arity(), 1));
    if (cells > cell_budget) throw BudgetExceeded("completion_sets: cell budget exhausted");
  };

  std::vector<int> order = topo_order(c);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int p = *it;
    const Gate& g = c.gates[p];
    if (g.kind == Gate::Kind::Input) continue;
    if (comp[p].empty()) continue;  // unreachable from the sink
    if (g.kind == Gate::Kind::Union) {
      set_union_into(comp[g.a], comp[p]);
      set_union_into(comp[g.b], comp[p]);
    } else {
      set_union_into(comp[g.a], set_product(comp[p], sets[g.b]));
      set_union_into(comp[g.b], set_product(comp[p], sets[g.a]));
    }
    charge(comp[g.a]);
    charge(comp[g.b]);
  }
  return comp;
}

}  // namespace detail

inline std::vector<FunctionSet> completion_sets(const Circuit& c,
                                                long long cell_budget = kDefaultEvalBudget) {
  return detail::completion_sets_from(c, detail::all_gate_sets(c, cell_budget), cell_budget);
}

// comp(g) alone; see completion_sets. S(g) x comp(g) is always a subset of
// S(C).
inline FunctionSet completion_set(const Circuit& c, int gate,
                                  long long cell_budget = kDefaultEvalBudget) {
  if (gate < 0 || gate >= c.size())
    throw BadScope("completion_set: gate " + std::to_string(gate) + " out of range");
  return completion_sets(c, cell_budget)[gate];
}

namespace detail {

inline Rational weight_of_mask(const WeightFunction& f, std::uint64_t mask) {
  Rational t = 0;
  for (int v = 0; v < f.nvertices(); ++v)
    if (mask >> v & 1) t += f.w[v];
  return t;
}

}  // namespace detail

// Top-down descent to a gate whose variable weight lands in
// [f(X)/3, 2f(X)/3]. From the sink: stop as soon as the window is hit; at a
// union gate descend to the first child (both sides carry the same
// variables); at a times gate descend to the child with the larger weight,
// ties to the first. The single-vertex cap f({a}) <= 2f(X)/3 guarantees the
// descent cannot step over the window.
inline int find_f_balanced_gate(const Circuit& c, const WeightFunction& f) {
  if (f.nvertices() != c.nvars())
    throw BadScope("find_f_balanced_gate: weight function covers " +
                   std::to_string(f.nvertices()) + " vertices, circuit has " +
                   std::to_string(c.nvars()));
  f.require_descent_safe("find_f_balanced_gate");

  std::vector<std::uint64_t> mask = var_masks(c);
  Rational total = f.total();
  std::vector<Rational> fw(c.gates.size());
  for (int g = 0; g < c.size(); ++g) fw[g] = detail::weight_of_mask(f, mask[g]);

  int g = c.output;
  while (3 * fw[g] > 2 * total) {
    const Gate& gate = c.gates[g];
    if (gate.kind == Gate::Kind::Input)
      throw Error("find_f_balanced_gate: descent stuck at an input gate");
    if (gate.kind == Gate::Kind::Union)
      g = gate.a;
    else
      g = fw[gate.b] > fw[gate.a] ? gate.b : gate.a;
  }
  return g;
}

// The cover made of the rectangles of all f-balanced gates. Every member of
// S(C) has a derivation in the circuit, and the descent argument applied to
// that derivation lands on a balanced gate whose rectangle contains it, so
// the rectangles jointly cover S(C). Size is at most |C| by construction.
inline RectangleCover extract_cover(const Circuit& c, const WeightFunction& f,
                                    long long cell_budget = kDefaultEvalBudget) {
  ValidationReport rep = validate_circuit(c);
  if (!rep.ok()) throw BadScope("extract_cover: invalid circuit: " + rep.violations.front());
  if (f.nvertices() != c.nvars())
    throw BadScope("extract_cover: weight function covers " + std::to_string(f.nvertices()) +
                   " vertices, circuit has " + std::to_string(c.nvars()));
  f.require_descent_safe("extract_cover");

  std::vector<FunctionSet> sets = detail::all_gate_sets(c, cell_budget);
  std::vector<FunctionSet> comp = detail::completion_sets_from(c, sets, cell_budget);

  std::vector<std::uint64_t> mask = var_masks(c);
  std::uint64_t full = c.nvars() == 64 ? ~0ULL : (1ULL << c.nvars()) - 1;
  Rational total = f.total();

  RectangleCover cover;
  cover.target = sets[c.output];
  for (int g = 0; g < c.size(); ++g) {
    Rational fw = detail::weight_of_mask(f, mask[g]);
    if (3 * fw < total || 3 * fw > 2 * total) continue;
    Rectangle r;
    r.part.x = detail::vars_of_mask(mask[g]);
    r.part.y = detail::vars_of_mask(full & ~mask[g]);
    r.left = sets[g];
    r.right = comp[g];
    r.gate = g;
    cover.rects.push_back(std::move(r));
  }
  return cover;
}

inline RectangleCover extract_cover(const CircuitOrEmpty& c, const WeightFunction& f,
                                    long long cell_budget = kDefaultEvalBudget) {
  if (std::holds_alternative<EmptyResult>(c))
    return RectangleCover{{}, FunctionSet::empty_set({})};
  return extract_cover(std::get<Circuit>(c), f, cell_budget);
}

// Verdict of checking one extracted cover against the hard-instance
// rectangle bound n^(t - floor(k/3)) * (3 log2 n)^(floor(k/3)).
struct RectBoundReport {
  struct Entry {
    int gate = -1;
    bool w_balanced = false;
    BigInt size;
    bool within_bound = false;  // meaningful only when w_balanced
  };
  std::vector<Entry> entries;
  long double bound = 0;       // the rectangle-size threshold above
  BigInt max_balanced_size;    // largest W-balanced rectangle seen
  BigInt hom_count;            // |target| of the cover
  Rational certificate;        // hom_count / max_balanced_size; a cover-size lower bound
  bool all_within = true;      // every W-balanced rectangle within the bound

  std::string summary() const {
    return "W-balanced rectangles max " + max_balanced_size.str() + " vs bound " +
           std::to_string(static_cast<double>(bound)) + "; cover lower bound " +
           to_string(certificate);
  }
};

// Check an extracted cover against the rectangle bound for a pattern graph g
// with highly connected set W (|W| = 2k+1) mapped into an n-vertex target.
// A rectangle counts as W-balanced when both sides of its split meet W in at
// least |W|/3 vertices; each such rectangle must obey the size bound, and
// |Hom| / max-rectangle then lower-bounds the size of any balanced cover,
// hence of any circuit. Expects the cover extracted with f = |vars ^ W|.
inline RectBoundReport rectangle_bound_check(const RectangleCover& cover, const Hypergraph& g,
                                             const std::vector<int>& W, int k, int n) {
  require_graph(g, "rectangle_bound_check");
  for (int v : W)
    if (v < 0 || v >= g.n)
      throw BadScope("rectangle_bound_check: W vertex " + std::to_string(v) + " out of range");
  if (n < 2) throw BadScope("rectangle_bound_check: target needs at least 2 vertices");

  int t = g.n;
  int m = k / 3;
  RectBoundReport rep;
  rep.bound = std::pow(static_cast<long double>(n), t - m) *
              std::pow(3.0L * std::log2(static_cast<long double>(n)), m);
  rep.hom_count = BigInt(cover.target.size());

  std::vector<char> in_w(g.n, 0);
  for (int v : W) in_w[v] = 1;
  int wsize = 0;
  for (int v = 0; v < g.n; ++v) wsize += in_w[v];

  for (const Rectangle& r : cover.rects) {
    RectBoundReport::Entry e;
    e.gate = r.gate;
    e.size = r.size();
    int wx = 0, wy = 0;
    for (int v : r.part.x) wx += in_w[v];
    for (int v : r.part.y) wy += in_w[v];
    e.w_balanced = 3 * std::min(wx, wy) >= wsize;
    if (e.w_balanced) {
      e.within_bound = static_cast<long double>(e.size) <= rep.bound;
      if (!e.within_bound) rep.all_within = false;
      if (e.size > rep.max_balanced_size) rep.max_balanced_size = e.size;
    }
    rep.entries.push_back(std::move(e));
  }
  if (rep.max_balanced_size > 0) rep.certificate = Rational(rep.hom_count, rep.max_balanced_size);
  return rep;
}

}  // namespace homfactor

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "homfactor/circuit.hpp"
#include "homfactor/errors.hpp"
#include "homfactor/function_set.hpp"
#include "homfactor/rational.hpp"

namespace homfactor {

constexpr long long kDefaultEvalBudget = 200'000'000;  // row cells

struct EvalOptions {
  long long cell_budget = kDefaultEvalBudget;
  bool track_collisions = false;   // record whether any union children overlap
  std::vector<char> keep;          // per gate: retain S(g) in the result
};

struct EvalResult {
  FunctionSet sink;
  std::vector<FunctionSet> kept;   // indexed by gate id; empty unless requested
  bool union_collision = false;    // some union gate had intersecting children
};

namespace detail {

inline std::vector<int> vars_of_mask(std::uint64_t mask) {
  std::vector<int> vars;
  for (int v = 0; v < 64; ++v)
    if (mask >> v & 1) vars.push_back(v);
  return vars;
}

}  // namespace detail

// Bottom-up exact semantics. Per-gate sets are freed as soon as their last
// parent has consumed them (unless kept), so peak memory tracks the active
// frontier rather than the whole circuit. The budget counts materialized
// row cells across all gates.
inline EvalResult eval_circuit(const Circuit& c, const EvalOptions& opt = {}) {
  require_valid(c, "eval_circuit");
  std::vector<std::uint64_t> mask = var_masks(c);
  std::vector<int> order = detail::topo_order(c);
  int n = c.size();
  std::vector<int> pending(n, 0);  // parents not yet evaluated
  for (const Gate& g : c.gates)
    if (g.kind != Gate::Kind::Input) {
      ++pending[g.a];
      ++pending[g.b];
    }
  EvalResult res;
  res.kept.resize(n);
  std::vector<FunctionSet> sets(n);
  long long cells = 0;
  auto charge = [&](const FunctionSet& f) {
    cells += static_cast<long long>(f.size()) * std::max<std::size_t>(1, f.arity());
    if (cells > opt.cell_budget) throw BudgetExceeded("circuit evaluation exceeded cell budget");
  };
  auto release = [&](int g) {
    if (--pending[g] == 0) {
      if (!opt.keep.empty() && opt.keep[g]) res.kept[g] = std::move(sets[g]);
      sets[g] = FunctionSet();
    }
  };
  for (int g : order) {
    const Gate& gate = c.gates[g];
    if (gate.kind == Gate::Kind::Input) {
      FunctionSet f;
      f.vars = {gate.a};
      f.push_row({gate.b});
      sets[g] = std::move(f);
    } else if (gate.kind == Gate::Kind::Times) {
      // predict the product size so a huge gate fails before allocating
      long long predicted = static_cast<long long>(sets[gate.a].size()) *
                            static_cast<long long>(sets[gate.b].size()) *
                            std::max<long long>(1, static_cast<long long>(sets[gate.a].arity()) +
                                                       static_cast<long long>(sets[gate.b].arity()));
      if (cells + predicted > opt.cell_budget)
        throw BudgetExceeded("circuit evaluation exceeded cell budget");
      sets[g] = set_product(sets[gate.a], sets[gate.b]);
      release(gate.a);
      release(gate.b);
    } else {
      bool collided = false;
      sets[g] = set_union(sets[gate.a], sets[gate.b], &collided);
      if (collided) res.union_collision = true;
      release(gate.a);
      release(gate.b);
    }
    // every function in S(g) has domain var(g)
    if (sets[g].vars != detail::vars_of_mask(mask[g]))
      throw Error("internal: computed set domain differs from var(g)");
    charge(sets[g]);
  }
  if (!opt.keep.empty() && opt.keep[c.output]) res.kept[c.output] = sets[c.output];
  res.sink = std::move(sets[c.output]);
  return res;
}

// True iff every union gate's children compute disjoint sets.
inline bool check_deterministic(const Circuit& c, long long cell_budget = kDefaultEvalBudget) {
  EvalOptions opt;
  opt.cell_budget = cell_budget;
  opt.track_collisions = true;
  return !eval_circuit(c, opt).union_collision;
}

// Single bottom-up counting pass: inputs 1, unions add, times multiply.
// Equals |S(c)| exactly when the circuit is deterministic; an upper bound
// otherwise. With check = true the determinism premise is verified first.
inline BigInt count_deterministic(const Circuit& c, bool check = false,
                                  long long cell_budget = kDefaultEvalBudget) {
  require_valid(c, "count_deterministic");
  if (check && !check_deterministic(c, cell_budget))
    throw NotDeterministic("count_deterministic: a union gate has overlapping children");
  std::vector<BigInt> cnt(c.size());
  for (int g : detail::topo_order(c)) {
    const Gate& gate = c.gates[g];
    if (gate.kind == Gate::Kind::Input)
      cnt[g] = 1;
    else if (gate.kind == Gate::Kind::Union)
      cnt[g] = cnt[gate.a] + cnt[gate.b];
    else
      cnt[g] = cnt[gate.a] * cnt[gate.b];
  }
  return cnt[c.output];
}

}  // namespace homfactor

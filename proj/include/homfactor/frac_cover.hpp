#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/rational.hpp"
#include "homfactor/simplex.hpp"
#include "homfactor/tree_decomposition.hpp"

namespace homfactor {

struct FracCover {
  Rational value;
  std::vector<Rational> edge_weights;  // aligned with h.edges
};

struct FracIndependentSet {
  Rational value;
  std::vector<Rational> vertex_weights;  // aligned with vertices, zero off X
};

// rho*(X): minimum total weight of s : E -> [0,1] with sum_{e contains v}
// s(e) >= 1 for every v in X. Exact LP optimum.
inline FracCover frac_edge_cover_number(const Hypergraph& h, const std::vector<int>& X) {
  for (int v : X) {
    if (v < 0 || v >= h.n) throw BadScope("frac_edge_cover_number: vertex out of range");
    bool in_edge = false;
    for (const auto& e : h.edges)
      if (std::binary_search(e.begin(), e.end(), v)) {
        in_edge = true;
        break;
      }
    if (!in_edge)
      throw Infeasible("frac_edge_cover_number: vertex " + h.label(v) + " lies in no edge");
  }
  LinearProgram lp;
  std::vector<int> var(h.edges.size());
  for (size_t e = 0; e < h.edges.size(); ++e) {
    var[e] = lp.add_variable();
    lp.add_constraint({{var[e], Rational(1)}}, LinearProgram::Rel::Le, Rational(1));
  }
  for (int v : X) {
    std::vector<std::pair<int, Rational>> terms;
    for (size_t e = 0; e < h.edges.size(); ++e)
      if (std::binary_search(h.edges[e].begin(), h.edges[e].end(), v))
        terms.push_back({var[e], Rational(1)});
    lp.add_constraint(std::move(terms), LinearProgram::Rel::Ge, Rational(1));
  }
  std::vector<std::pair<int, Rational>> obj;
  for (size_t e = 0; e < h.edges.size(); ++e) obj.push_back({var[e], Rational(1)});
  lp.set_objective(LinearProgram::Sense::Minimize, std::move(obj));
  LpSolution sol = solve_lp(lp);
  FracCover out;
  out.value = sol.value;
  out.edge_weights.assign(sol.x.begin(), sol.x.begin() + h.edges.size());
  return out;
}

// The dual optimum: a fractional independent set supported on X (y >= 0,
// sum_{v in e, v in X} y_v <= 1 per edge) of maximum total weight. By LP
// duality its value equals rho*(X), which certifies both optima exactly.
inline FracIndependentSet frac_independent_set(const Hypergraph& h, const std::vector<int>& X) {
  LinearProgram lp;
  std::vector<int> var(h.n, -1);
  std::vector<char> in_x(h.n, 0);
  for (int v : X) {
    if (v < 0 || v >= h.n) throw BadScope("frac_independent_set: vertex out of range");
    in_x[v] = 1;
  }
  for (int v = 0; v < h.n; ++v)
    if (in_x[v]) var[v] = lp.add_variable();
  for (const auto& e : h.edges) {
    std::vector<std::pair<int, Rational>> terms;
    for (int v : e)
      if (in_x[v]) terms.push_back({var[v], Rational(1)});
    if (!terms.empty()) lp.add_constraint(std::move(terms), LinearProgram::Rel::Le, Rational(1));
  }
  std::vector<std::pair<int, Rational>> obj;
  for (int v = 0; v < h.n; ++v)
    if (in_x[v]) obj.push_back({var[v], Rational(1)});
  lp.set_objective(LinearProgram::Sense::Maximize, std::move(obj));
  LpSolution sol = solve_lp(lp);
  FracIndependentSet out;
  out.value = sol.value;
  out.vertex_weights.assign(h.n, Rational(0));
  for (int v = 0; v < h.n; ++v)
    if (in_x[v]) out.vertex_weights[v] = sol.x[var[v]];
  return out;
}

// Fractional hypertree width of a fixed decomposition: the maximum rho* over
// its bags. The empty decomposition of the empty hypergraph has width 0.
inline Rational fhtw_of_td(const Hypergraph& h, const TreeDecomposition& td) {
  ValidationReport rep = validate_td(h, td);
  if (!rep.ok()) throw BadScope("fhtw_of_td: invalid decomposition: " + rep.summary());
  Rational best(0);
  for (const auto& bag : td.bags) {
    if (bag.empty()) continue;
    Rational r = frac_edge_cover_number(h, bag).value;
    if (r > best) best = r;
  }
  return best;
}

}  // namespace homfactor

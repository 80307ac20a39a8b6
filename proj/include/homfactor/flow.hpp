#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/hpath.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/rational.hpp"
#include "homfactor/simplex.hpp"
#include "homfactor/validation.hpp"

namespace homfactor {

// Sparse path flow: parallel arrays, zero-weight paths dropped. value is the
// total weight (the flow value for (A,B)-flows).
struct Flow {
  std::vector<HPath> paths;
  std::vector<Rational> weights;
  Rational value = Rational(0);
};

// Uniform concurrent flow on a clique partition: one (K_i,K_j)-flow per
// unordered pair, each of value exactly epsilon, jointly satisfying the edge
// constraints.
struct ConcurrentFlow {
  std::vector<std::vector<int>> cliques;
  std::vector<std::pair<int, int>> pairs;  // (i, j) with i < j, indexes cliques
  std::vector<Flow> pair_flows;            // parallel to pairs
  Rational epsilon = Rational(0);
};

// Vertex weighting derived from a flow (tag "mu" or "alpha"); total is the
// sum, which for mu is the exponent t.
struct VertexWeights {
  std::string tag;
  std::vector<Rational> w;
  Rational total = Rational(0);
};

namespace detail {

inline bool path_intersects_edge(const HPath& p, const std::vector<int>& edge) {
  for (int v : p)
    if (std::binary_search(edge.begin(), edge.end(), v)) return true;
  return false;
}

inline void check_path_shape(const Hypergraph& h, const std::vector<std::vector<char>>& adj,
                             const HPath& p, size_t idx, ValidationReport& rep) {
  if (p.empty()) {
    rep.violation("path " + std::to_string(idx) + " is empty");
    return;
  }
  std::vector<int> seen;
  for (int v : p) {
    if (v < 0 || v >= h.n) {
      rep.violation("path " + std::to_string(idx) + " has vertex out of range");
      return;
    }
    seen.push_back(v);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    rep.violation("path " + std::to_string(idx) + " repeats a vertex");
  for (size_t i = 0; i + 1 < p.size(); ++i)
    if (!adj[p[i]][p[i + 1]])
      rep.violation("path " + std::to_string(idx) + " has non-co-occurring consecutive vertices");
  if (rep.ok() && !path_is_minimal(adj, p))
    rep.violation("path " + std::to_string(idx) + " is not minimal");
}

}  // namespace detail

// Exact load of every hyperedge under F: sum of F(P) over paths touching the
// edge. The flow constraint is load <= 1 per edge.
inline std::vector<Rational> edge_loads(const Hypergraph& h, const Flow& f) {
  std::vector<Rational> load(h.edges.size(), Rational(0));
  for (size_t e = 0; e < h.edges.size(); ++e)
    for (size_t p = 0; p < f.paths.size(); ++p)
      if (detail::path_intersects_edge(f.paths[p], h.edges[e])) load[e] += f.weights[p];
  return load;
}

inline ValidationReport validate_flow(const Hypergraph& h, const Flow& f) {
  ValidationReport rep;
  if (f.paths.size() != f.weights.size()) {
    rep.violation("paths and weights differ in length");
    return rep;
  }
  auto adj = detail::gaifman_matrix(h);
  Rational total(0);
  for (size_t i = 0; i < f.paths.size(); ++i) {
    detail::check_path_shape(h, adj, f.paths[i], i, rep);
    if (f.weights[i] < 0) rep.violation("path " + std::to_string(i) + " has negative weight");
    total += f.weights[i];
  }
  if (total != f.value) rep.violation("stored value does not match the weight sum");
  std::vector<Rational> load = edge_loads(h, f);
  size_t worst = 0;
  for (size_t e = 0; e < load.size(); ++e)
    if (load[e] > load[worst]) worst = e;
  for (size_t e = 0; e < load.size(); ++e)
    if (load[e] > 1)
      rep.violation("edge " + std::to_string(e) + " overloaded: " + to_string(load[e]));
  if (!load.empty() && load[worst] > 1)
    rep.warn("worst edge " + std::to_string(worst) + " at load " + to_string(load[worst]));
  return rep;
}

// Maximum (A,B)-flow over the enumerated minimal paths: one LP variable per
// path, one constraint per hyperedge.
inline Flow max_ab_flow(const Hypergraph& h, const std::vector<int>& A, const std::vector<int>& B,
                        int max_len = kDefaultMaxPathLen, long long budget = kDefaultPathBudget) {
  std::vector<HPath> paths = enumerate_paths(h, A, B, max_len, budget);
  Flow out;
  if (paths.empty()) return out;
  LinearProgram lp;
  std::vector<int> var(paths.size());
  for (size_t p = 0; p < paths.size(); ++p) var[p] = lp.add_variable();
  for (const auto& e : h.edges) {
    std::vector<std::pair<int, Rational>> terms;
    for (size_t p = 0; p < paths.size(); ++p)
      if (detail::path_intersects_edge(paths[p], e)) terms.push_back({var[p], Rational(1)});
    if (!terms.empty()) lp.add_constraint(std::move(terms), LinearProgram::Rel::Le, 1);
  }
  std::vector<std::pair<int, Rational>> obj;
  for (size_t p = 0; p < paths.size(); ++p) obj.push_back({var[p], Rational(1)});
  lp.set_objective(LinearProgram::Sense::Maximize, std::move(obj));
  LpSolution sol = solve_lp(lp);
  out.value = sol.value;
  for (size_t p = 0; p < paths.size(); ++p)
    if (sol.x[var[p]] != 0) {
      out.paths.push_back(paths[p]);
      out.weights.push_back(sol.x[var[p]]);
    }
  return out;
}

// Maximize the common value epsilon of a uniform concurrent flow on the
// given clique partition. Each pair (i, j) draws on minimal (K_i,K_j)-paths
// that meet K_i and K_j exactly once; restricting to those loses no value (a
// path re-entering a clique could be shortened) and makes alpha(K_i) land on
// delta exactly.
inline ConcurrentFlow max_uniform_concurrent_flow(const Hypergraph& h,
                                                  const std::vector<std::vector<int>>& cliques,
                                                  int max_len = kDefaultMaxPathLen,
                                                  long long budget = kDefaultPathBudget) {
  int k = static_cast<int>(cliques.size());
  if (k < 2) throw BadPartition("concurrent flow needs at least two cliques");
  std::vector<char> used(h.n, 0);
  for (const auto& ki : cliques) {
    if (ki.empty()) throw BadPartition("empty clique");
    for (int v : ki) {
      if (v < 0 || v >= h.n) throw BadPartition("clique vertex out of range");
      if (used[v]) throw BadPartition("cliques are not pairwise disjoint");
      used[v] = 1;
    }
    std::vector<int> sorted = ki;
    std::sort(sorted.begin(), sorted.end());
    bool inside = false;
    for (const auto& e : h.edges)
      if (std::includes(e.begin(), e.end(), sorted.begin(), sorted.end())) inside = true;
    if (!inside) throw BadPartition("clique not contained in any edge");
  }

  ConcurrentFlow out;
  out.cliques = cliques;
  std::vector<std::vector<HPath>> pair_paths;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      out.pairs.push_back({i, j});
      std::vector<HPath> ps = enumerate_paths(h, cliques[i], cliques[j], max_len, budget);
      std::vector<HPath> kept;
      for (const auto& p : ps) {
        int in_i = 0, in_j = 0;
        for (int v : p) {
          in_i += std::count(cliques[i].begin(), cliques[i].end(), v);
          in_j += std::count(cliques[j].begin(), cliques[j].end(), v);
        }
        if (in_i == 1 && in_j == 1) kept.push_back(p);
      }
      pair_paths.push_back(std::move(kept));
    }

  LinearProgram lp;
  int eps = lp.add_variable();
  std::vector<std::vector<int>> var(pair_paths.size());
  for (size_t q = 0; q < pair_paths.size(); ++q) {
    var[q].resize(pair_paths[q].size());
    for (size_t p = 0; p < pair_paths[q].size(); ++p) var[q][p] = lp.add_variable();
    std::vector<std::pair<int, Rational>> eq;
    for (int v : var[q]) eq.push_back({v, Rational(1)});
    eq.push_back({eps, Rational(-1)});
    lp.add_constraint(std::move(eq), LinearProgram::Rel::Eq, 0);
  }
  for (const auto& e : h.edges) {
    std::vector<std::pair<int, Rational>> terms;
    for (size_t q = 0; q < pair_paths.size(); ++q)
      for (size_t p = 0; p < pair_paths[q].size(); ++p)
        if (detail::path_intersects_edge(pair_paths[q][p], e))
          terms.push_back({var[q][p], Rational(1)});
    if (!terms.empty()) lp.add_constraint(std::move(terms), LinearProgram::Rel::Le, 1);
  }
  lp.set_objective(LinearProgram::Sense::Maximize, {{eps, Rational(1)}});
  LpSolution sol = solve_lp(lp);
  out.epsilon = sol.value;
  for (size_t q = 0; q < pair_paths.size(); ++q) {
    Flow f;
    f.value = sol.value;
    for (size_t p = 0; p < pair_paths[q].size(); ++p)
      if (sol.x[var[q][p]] != 0) {
        f.paths.push_back(pair_paths[q][p]);
        f.weights.push_back(sol.x[var[q][p]]);
      }
    out.pair_flows.push_back(std::move(f));
  }
  return out;
}

// Joint validation: every pair flow is a well-formed (K_i,K_j)-flow of value
// epsilon, and the summed loads respect every edge constraint.
inline ValidationReport validate_concurrent_flow(const Hypergraph& h, const ConcurrentFlow& cf) {
  ValidationReport rep;
  if (cf.pairs.size() != cf.pair_flows.size()) {
    rep.violation("pairs and pair_flows differ in length");
    return rep;
  }
  auto adj = detail::gaifman_matrix(h);
  std::vector<Rational> load(h.edges.size(), Rational(0));
  for (size_t q = 0; q < cf.pairs.size(); ++q) {
    const Flow& f = cf.pair_flows[q];
    auto [i, j] = cf.pairs[q];
    if (i < 0 || j < 0 || i >= static_cast<int>(cf.cliques.size()) ||
        j >= static_cast<int>(cf.cliques.size()) || i >= j) {
      rep.violation("pair " + std::to_string(q) + " malformed");
      continue;
    }
    Rational total(0);
    for (size_t p = 0; p < f.paths.size(); ++p) {
      detail::check_path_shape(h, adj, f.paths[p], p, rep);
      if (f.weights[p] < 0) rep.violation("negative weight in pair " + std::to_string(q));
      total += f.weights[p];
      if (f.paths[p].empty()) continue;
      if (!std::count(cf.cliques[i].begin(), cf.cliques[i].end(), f.paths[p].front()))
        rep.violation("pair " + std::to_string(q) + " path does not start in its clique");
      if (!std::count(cf.cliques[j].begin(), cf.cliques[j].end(), f.paths[p].back()))
        rep.violation("pair " + std::to_string(q) + " path does not end in its clique");
    }
    if (total != cf.epsilon)
      rep.violation("pair " + std::to_string(q) + " has value " + to_string(total) +
                    ", expected " + to_string(cf.epsilon));
    std::vector<Rational> l = edge_loads(h, f);
    for (size_t e = 0; e < l.size(); ++e) load[e] += l[e];
  }
  for (size_t e = 0; e < load.size(); ++e)
    if (load[e] > 1)
      rep.violation("joint load on edge " + std::to_string(e) + " is " + to_string(load[e]));
  return rep;
}

// mu(v) = half the total flow through v; total is the exponent t.
inline VertexWeights mu_of_flow(const Hypergraph& h, const Flow& f) {
  VertexWeights out;
  out.tag = "mu";
  out.w.assign(h.n, Rational(0));
  for (size_t p = 0; p < f.paths.size(); ++p)
    for (int v : f.paths[p]) out.w[v] += f.weights[p] / 2;
  for (const auto& x : out.w) out.total += x;
  return out;
}

inline VertexWeights mu_of_flow(const Hypergraph& h, const ConcurrentFlow& cf) {
  VertexWeights out;
  out.tag = "mu";
  out.w.assign(h.n, Rational(0));
  for (const auto& f : cf.pair_flows)
    for (size_t p = 0; p < f.paths.size(); ++p)
      for (int v : f.paths[p]) out.w[v] += f.weights[p] / 2;
  for (const auto& x : out.w) out.total += x;
  return out;
}

// alpha(v) for v in K_i: half the flow of paths through v across all pairs
// involving K_i; zero off W. Requires W = union of the cliques.
inline VertexWeights alpha_of_flow(const Hypergraph& h, const ConcurrentFlow& cf,
                                   const std::vector<int>& W) {
  std::vector<int> uni;
  for (const auto& ki : cf.cliques) uni.insert(uni.end(), ki.begin(), ki.end());
  std::sort(uni.begin(), uni.end());
  std::vector<int> w_sorted = W;
  std::sort(w_sorted.begin(), w_sorted.end());
  if (uni != w_sorted) throw BadScope("alpha_of_flow: W must be the union of the cliques");

  std::vector<int> clique_of(h.n, -1);
  for (size_t i = 0; i < cf.cliques.size(); ++i)
    for (int v : cf.cliques[i]) clique_of[v] = static_cast<int>(i);

  VertexWeights out;
  out.tag = "alpha";
  out.w.assign(h.n, Rational(0));
  for (size_t q = 0; q < cf.pairs.size(); ++q) {
    auto [i, j] = cf.pairs[q];
    const Flow& f = cf.pair_flows[q];
    for (size_t p = 0; p < f.paths.size(); ++p)
      for (int v : f.paths[p])
        if (clique_of[v] == i || clique_of[v] == j) out.w[v] += f.weights[p] / 2;
  }
  for (const auto& x : out.w) out.total += x;
  return out;
}

// Where the alpha mass of each clique falls across a variable partition
// (X, complement). A clique is balanced when both sides carry at least a
// tenth of its mass delta; light_in_x and light_in_y hold the cliques whose
// mass on that side falls strictly below delta/10 (so a light_in_x clique
// lives almost entirely in Y). The dichotomy driving the lower bound: either
// many cliques are balanced, or light_in_x and light_in_y are both large.
struct AlphaBalanceReport {
  Rational delta;
  std::vector<int> balanced, light_in_x, light_in_y;
  std::vector<std::pair<Rational, Rational>> masses;  // per clique: (X side, Y side)

  BigInt light_product() const {
    return BigInt(light_in_x.size()) * BigInt(light_in_y.size());
  }

  std::string summary() const {
    return std::to_string(balanced.size()) + " balanced / " +
           std::to_string(light_in_x.size()) + " light in X / " +
           std::to_string(light_in_y.size()) + " light in Y, delta " + to_string(delta);
  }
};

inline AlphaBalanceReport alpha_balance_report(const Hypergraph& h, const ConcurrentFlow& cf,
                                               const VertexWeights& alpha,
                                               const std::vector<int>& X) {
  std::vector<char> in_x(h.n, 0);
  for (int v : X) {
    if (v < 0 || v >= h.n) throw BadScope("alpha_balance_report: vertex out of range");
    in_x[v] = 1;
  }
  AlphaBalanceReport rep;
  int k = static_cast<int>(cf.cliques.size());
  rep.delta = cf.epsilon * (k - 1) / 2;
  for (int i = 0; i < k; ++i) {
    Rational mx(0), my(0);
    for (int v : cf.cliques[i]) (in_x[v] ? mx : my) += alpha.w[v];
    rep.masses.push_back({mx, my});
    if (10 * std::min(mx, my) >= rep.delta) rep.balanced.push_back(i);
    if (10 * mx < rep.delta) rep.light_in_x.push_back(i);
    if (10 * my < rep.delta) rep.light_in_y.push_back(i);
  }
  return rep;
}

}  // namespace homfactor

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/function_set.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/rational.hpp"

namespace homfactor {

// Combinatorial rectangles over a split of the variable set, plus the
// weighting machinery that decides which splits count as balanced. A set of
// functions R with domain X is a (Y,Z)-rectangle when R equals the product of
// its own restrictions to the two sides; the lower-bound argument only cares
// about rectangles whose split is balanced under a weight function.

// An ordered two-block partition (x | y) of the vertices 0..n-1.
struct Partition {
  std::vector<int> x;
  std::vector<int> y;

  bool operator==(const Partition&) const = default;
};

namespace detail {

// Side lookup: 0 for x, 1 for y, after checking that the two blocks are
// disjoint and together cover exactly 0..n-1.
inline std::vector<char> partition_sides(const Partition& p, int n, const char* who) {
  std::vector<char> side(n, -1);
  auto place = [&](const std::vector<int>& block, char tag) {
    for (int v : block) {
      if (v < 0 || v >= n)
        throw BadScope(std::string(who) + ": vertex " + std::to_string(v) + " out of range");
      if (side[v] != -1)
        throw BadScope(std::string(who) + ": vertex " + std::to_string(v) +
                       " appears in both blocks");
      side[v] = tag;
    }
  };
  place(p.x, 0);
  place(p.y, 1);
  for (int v = 0; v < n; ++v)
    if (side[v] == -1)
      throw BadScope(std::string(who) + ": vertex " + std::to_string(v) + " is in neither block");
  return side;
}

}  // namespace detail

// Vertex-additive weight function: f(S) = sum of the per-vertex weights over
// S. Additivity gives subadditivity on disjoint sets for free, which is what
// the balanced-gate descent needs. All weights used in anger (indicator of a
// highly connected set, the flow weightings) are of this form.
struct WeightFunction {
  std::vector<Rational> w;

  int nvertices() const { return static_cast<int>(w.size()); }

  Rational total() const {
    Rational t = 0;
    for (const Rational& v : w) t += v;
    return t;
  }

  Rational of(const std::vector<int>& s) const {
    Rational t = 0;
    for (int v : s) {
      if (v < 0 || v >= nvertices())
        throw BadScope("WeightFunction: vertex " + std::to_string(v) + " out of range");
      t += w[v];
    }
    return t;
  }

  static WeightFunction uniform(int n) { return {std::vector<Rational>(n, Rational(1))}; }

  // f(S) = |S intersect W|.
  static WeightFunction indicator(int n, const std::vector<int>& W) {
    WeightFunction f{std::vector<Rational>(n, Rational(0))};
    for (int v : W) {
      if (v < 0 || v >= n)
        throw BadScope("WeightFunction::indicator: vertex " + std::to_string(v) +
                       " out of range");
      f.w[v] = 1;
    }
    return f;
  }

  // The descent precondition: nonnegative weights, no single vertex heavier
  // than 2f(A)/3. Throws WeightViolation otherwise.
  void require_descent_safe(const char* who) const {
    Rational t = total();
    for (int v = 0; v < nvertices(); ++v) {
      if (w[v] < 0)
        throw WeightViolation(std::string(who) + ": negative weight on vertex " +
                              std::to_string(v));
      if (3 * w[v] > 2 * t)
        throw WeightViolation(std::string(who) + ": vertex " + std::to_string(v) +
                              " carries weight " + to_string(w[v]) + " > 2/3 of total " +
                              to_string(t));
    }
  }
};

// A (x|y)-rectangle: left spans the x-block, right the y-block, and the
// realized set is their product.
struct Rectangle {
  Partition part;
  FunctionSet left;
  FunctionSet right;
  int gate = -1;  // originating circuit gate, when extracted from a circuit

  BigInt size() const { return BigInt(left.size()) * BigInt(right.size()); }

  FunctionSet realized() const { return set_product(left, right); }
};

// Exact rectangle test: F is a (x|y)-rectangle iff |F| = |F|x| * |F|y| (every
// recombination of a left part with a right part lands back in F). part must
// split the domain of F.
inline bool is_rectangle(const FunctionSet& f, const Partition& part) {
  std::vector<int> dom = part.x;
  dom.insert(dom.end(), part.y.begin(), part.y.end());
  std::sort(dom.begin(), dom.end());
  if (dom != f.vars) throw BadScope("is_rectangle: partition does not split the domain");
  FunctionSet lx = restrict_set(f, part.x);
  FunctionSet ly = restrict_set(f, part.y);
  return lx.size() * ly.size() == f.size();
}

// Product of the per-variable projections, an upper bound on |F|. Tight
// exactly when F is a rectangle along every split.
inline BigInt projection_bound(const FunctionSet& f) {
  BigInt bound = 1;
  for (int v : f.vars) bound *= BigInt(restrict_set(f, {v}).size());
  if (BigInt(f.size()) > bound)
    throw Error("projection_bound: set larger than its projection product");
  return bound;
}

// Greedy crossing matching: scan the edges in stored order, take each edge
// with one free endpoint on either side of the partition, and retire both
// endpoints. Returns (x-side, y-side) pairs. Deterministic given the edge
// order, and maximal under this greedy rule.
inline std::vector<std::pair<int, int>> greedy_matching(const Hypergraph& g,
                                                        const Partition& part) {
  require_graph(g, "greedy_matching");
  std::vector<char> side = detail::partition_sides(part, g.n, "greedy_matching");
  std::vector<char> used(g.n, 0);
  std::vector<std::pair<int, int>> matching;
  for (const std::vector<int>& e : g.edges) {
    int u = e[0], v = e[1];
    if (used[u] || used[v] || side[u] == side[v]) continue;
    used[u] = used[v] = 1;
    if (side[u] == 0)
      matching.emplace_back(u, v);
    else
      matching.emplace_back(v, u);
  }
  return matching;
}

}  // namespace homfactor

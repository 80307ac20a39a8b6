#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "homfactor/circuit.hpp"
#include "homfactor/circuit_build.hpp"
#include "homfactor/errors.hpp"
#include "homfactor/structure.hpp"

namespace homfactor {

struct KPartitePair {
  Structure g;  // the clique K_k, one variable per vertex
  Structure h;  // complete k-partite graph, parts of size n
  Circuit circuit;
};

// The separation pair: Hom(K_k, complete k-partite H) has k! n^k members but
// a circuit of size linear in n, because each branch fixes only which part
// each variable lands in. One branch per permutation: the product over parts
// i of the union of inputs x_{sigma(i)} -> v for v in part i. The per-(var,
// part) unions are shared across branches, so the n-dependent gate count is
// exactly k^2 (2n - 1).
inline KPartitePair kpartite_pair(int k, int n) {
  if (k < 1) throw BadScope("kpartite_pair: k must be at least 1");
  if (k > 5) throw TooLarge("kpartite_pair: k=" + std::to_string(k) + " above the cap of 5");
  if (n < 1) throw BadScope("kpartite_pair: n must be at least 1");
  if (n > 100'000) throw TooLarge("kpartite_pair: n=" + std::to_string(n));

  Structure g;
  for (int i = 0; i < k; ++i) g.universe.push_back("x" + std::to_string(i));
  g.add_symbol("E", 2);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) g.add_tuple("E", {i, j});

  Structure h;
  for (int p = 0; p < k; ++p)
    for (int j = 0; j < n; ++j)
      h.universe.push_back("p" + std::to_string(p) + "." + std::to_string(j));
  h.add_symbol("E", 2);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) {
      if (p == q) continue;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h.add_tuple("E", {p * n + i, q * n + j});
    }

  CircuitBuilder cb(g.universe);
  std::vector<std::vector<int>> part_union(k, std::vector<int>(k));
  for (int var = 0; var < k; ++var)
    for (int p = 0; p < k; ++p) {
      std::vector<int> ins;
      for (int j = 0; j < n; ++j) ins.push_back(cb.input(var, p * n + j));
      part_union[var][p] = cb.union_chain(ins);
    }

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> branches;
  do {
    std::vector<int> factors;
    for (int p = 0; p < k; ++p) factors.push_back(part_union[perm[p]][p]);
    branches.push_back(cb.times_chain(factors));
  } while (std::next_permutation(perm.begin(), perm.end()));
  Circuit c = cb.finish(cb.union_chain(branches));

  return {std::move(g), std::move(h), std::move(c)};
}

}  // namespace homfactor

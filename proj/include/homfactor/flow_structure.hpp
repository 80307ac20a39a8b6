#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/flow.hpp"
#include "homfactor/hom_oracle.hpp"
#include "homfactor/rational.hpp"
#include "homfactor/reductions.hpp"
#include "homfactor/rng.hpp"
#include "homfactor/structure.hpp"

namespace homfactor {

constexpr long long kDefaultScatterBudget = 20'000'000;

namespace detail {

// ceil(N^mu) computed exactly: the smallest m with m^q >= N^p for mu = p/q.
// No floating point, so dom sizes are identical on every platform.
inline int ceil_pow_frac(int N, const Rational& mu, const char* who) {
  if (mu < 0) throw WeightViolation(std::string(who) + ": negative exponent");
  if (mu > 1)
    throw WeightViolation(std::string(who) + ": exponent " + to_string(mu) +
                          " above 1 (edge feasibility rules this out)");
  BigInt p = numerator(mu), q = denominator(mu);
  if (p == 0) return 1;
  if (p > 64 || q > 64) throw TooLarge(std::string(who) + ": exponent " + to_string(mu));
  unsigned long up = p.convert_to<unsigned long>(), uq = q.convert_to<unsigned long>();
  BigInt target = pow_bigint(BigInt(N), up);
  int lo = 1, hi = N;  // mu <= 1 keeps the answer within [1, N]
  while (lo < hi) {
    int mid = lo + (hi - lo) / 2;
    if (pow_bigint(BigInt(mid), uq) >= target)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

// floor(3 log2 N), the largest side a grid may keep.
inline int scatter_side_cap(int N) {
  return static_cast<int>(floor_log2_pow(static_cast<unsigned long>(N), 3));
}

}  // namespace detail

// The scatteredness test from the lower-bound machinery: a relation is
// N-scattered when for every split (U, V) of its scope, every combinatorial
// grid S x T inside it has a side of at most 3 log2 N. Checked exactly: per
// split, search for floor(3 log2 N) + 1 rows of the bipartite incidence whose
// common neighborhood has that many columns. scope_doms gives the value block
// of each scope position; tuples must draw coordinate i from scope_doms[i].
inline bool is_n_scattered(const std::vector<std::vector<int>>& tuples,
                           const std::vector<std::vector<int>>& scope_doms, int N,
                           long long budget = kDefaultScatterBudget) {
  int r = static_cast<int>(scope_doms.size());
  if (N < 2) throw BadScope("is_n_scattered: N must be at least 2");
  if (N > (1 << 20)) throw TooLarge("is_n_scattered: N=" + std::to_string(N));
  if (r < 1) throw BadScope("is_n_scattered: empty scope");
  if (r > 4)
    throw TooLarge("is_n_scattered: scope arity " + std::to_string(r) +
                   " above the exhaustive-partition cap of 4");
  std::set<int> seen;
  for (int i = 0; i < r; ++i) {
    if (scope_doms[i].empty()) throw BadScope("is_n_scattered: empty dom in the scope");
    for (int y : scope_doms[i])
      if (!seen.insert(y).second)
        throw BadScope("is_n_scattered: scope doms are not pairwise disjoint");
  }
  for (const auto& t : tuples) {
    if (static_cast<int>(t.size()) != r) throw BadScope("is_n_scattered: tuple arity mismatch");
    for (int i = 0; i < r; ++i)
      if (std::find(scope_doms[i].begin(), scope_doms[i].end(), t[i]) == scope_doms[i].end())
        throw BadScope("is_n_scattered: tuple coordinate outside its scope dom");
  }

  int cap = detail::scatter_side_cap(N);
  int M = cap + 1;  // both sides at M would violate the definition
  std::vector<std::vector<int>> uniq(tuples.begin(), tuples.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (static_cast<int>(uniq.size()) < M * M) return true;  // a grid needs M*M tuples

  long long nodes = 0;
  // mask over positions, position 0 pinned to U: (U,V) and (V,U) transpose
  for (int mask = 1; mask < (1 << r) - 1; mask += 2) {
    std::map<std::vector<int>, int> row_id, col_id;
    std::vector<std::pair<int, int>> inc;
    std::vector<int> pu, pv;
    for (const auto& t : uniq) {
      pu.clear();
      pv.clear();
      for (int i = 0; i < r; ++i) (mask >> i & 1 ? pu : pv).push_back(t[i]);
      int ri = row_id.emplace(pu, static_cast<int>(row_id.size())).first->second;
      int ci = col_id.emplace(pv, static_cast<int>(col_id.size())).first->second;
      inc.emplace_back(ri, ci);
    }
    int nrow = static_cast<int>(row_id.size()), ncol = static_cast<int>(col_id.size());
    if (nrow < M || ncol < M) continue;
    // enumerate subsets on the smaller side
    if (ncol < nrow) {
      for (auto& e : inc) std::swap(e.first, e.second);
      std::swap(nrow, ncol);
    }
    int words = (ncol + 63) / 64;
    std::vector<std::uint64_t> adj(static_cast<size_t>(nrow) * words, 0);
    for (const auto& [ri, ci] : inc) adj[static_cast<size_t>(ri) * words + ci / 64] |= 1ULL << (ci % 64);
    auto popcnt = [&](const std::uint64_t* w) {
      int c = 0;
      for (int x = 0; x < words; ++x) c += std::popcount(w[x]);
      return c;
    };
    std::vector<std::uint64_t> stack(static_cast<size_t>(M + 1) * words, ~0ULL);
    auto search = [&](auto&& self, int start, int depth) -> bool {
      if (depth == M) return true;  // invariant: common stayed >= M throughout
      const std::uint64_t* common = stack.data() + static_cast<size_t>(depth) * words;
      for (int i = start; nrow - i >= M - depth; ++i) {
        if (++nodes > budget)
          throw BudgetExceeded("is_n_scattered: grid search budget exhausted");
        std::uint64_t* next = stack.data() + static_cast<size_t>(depth + 1) * words;
        for (int x = 0; x < words; ++x)
          next[x] = common[x] & adj[static_cast<size_t>(i) * words + x];
        if (popcnt(next) < M) continue;
        if (self(self, i + 1, depth + 1)) return true;
      }
      return false;
    };
    if (search(search, 0, 0)) return false;
  }
  return true;
}

// One accepted draw of the flow-induced random structure, together with
// everything needed to reproduce and to read it: the value blocks dom(v),
// the exponent t = sum of mu, and the acceptance data.
struct FlowStructure {
  Structure b;
  std::vector<std::vector<int>> dom;  // per query vertex, element ids of b
  int N = 0;
  std::uint64_t seed = 0;
  int attempts = 0;
  VertexWeights mu;
  Rational t_exponent;
  long long hom_count = 0;
  Rational hom_bar;  // expectation/8 acceptance bar

  std::string summary() const {
    return "B(N=" + std::to_string(N) + "): " + std::to_string(b.size_of_universe()) +
           " elements, ||B||=" + std::to_string(b.total_tuples()) + ", |Hom|=" +
           std::to_string(hom_count) + " >= " + to_string(hom_bar) + ", t=" +
           to_string(t_exponent) + ", attempt " + std::to_string(attempts);
  }
};

// Sample the random structure induced by a vertex weighting mu on a
// single-tuple, order-respecting query: disjoint value blocks dom(v) of size
// ceil(N^mu(v)), each relation an independent-coin-1/2 subset of the block
// product over its scope. A draw is accepted when every relation stays within
// N tuples, every relation is N-scattered, and the homomorphism count clears
// the expectation/8 bar; otherwise the whole instance is resampled (no local
// repair, matching the probabilistic argument the construction comes from).
inline FlowStructure gen_flow_structure(const Structure& a, const VertexWeights& mu, int N,
                                        std::uint64_t seed, int max_retries = 64,
                                        long long oracle_budget = kDefaultOracleBudget,
                                        long long scatter_budget = kDefaultScatterBudget) {
  ValidationReport vrep = validate_structure(a);
  if (!vrep.ok()) throw BadScope("gen_flow_structure: " + vrep.violations.front());
  if (N < 2) throw BadScope("gen_flow_structure: N must be at least 2");
  int n = a.size_of_universe();
  if (static_cast<int>(mu.w.size()) != n)
    throw BadScope("gen_flow_structure: mu has " + std::to_string(mu.w.size()) +
                   " weights for a universe of " + std::to_string(n));
  require_connected(a, "gen_flow_structure");
  detail::require_single_tuple(a, "gen_flow_structure");

  for (size_t r = 0; r < a.relations.size(); ++r) {
    const auto& t = a.relations[r][0];
    for (size_t j = 0; j + 1 < t.size(); ++j)
      if (t[j] >= t[j + 1])
        throw BadScope("gen_flow_structure: query is not order respecting: the tuple of " +
                       a.sig.symbols[r].name + " is not strictly increasing in universe order");
    Rational s(0);
    for (int v : t) s += mu.w[v];
    if (s > 1)
      throw WeightViolation("gen_flow_structure: mu is not edge feasible: its sum over the scope of " +
                            a.sig.symbols[r].name + " is " + to_string(s));
  }

  std::vector<int> sizes(n);
  BigInt prod_all = 1;
  for (int v = 0; v < n; ++v) {
    sizes[v] = detail::ceil_pow_frac(N, mu.w[v], "gen_flow_structure");
    prod_all *= sizes[v];
  }
  for (const auto& rel : a.relations) {
    BigInt cand = 1;
    for (int v : rel[0]) cand *= sizes[v];
    if (cand > 50'000'000)
      throw TooLarge("gen_flow_structure: a relation has " + to_string(cand) +
                     " candidate tuples");
  }
  long long norm_a = a.total_tuples();
  if (norm_a > 1000) throw TooLarge("gen_flow_structure: ||a|| too large for the acceptance bar");
  Rational bar(prod_all, BigInt(1) << static_cast<unsigned>(norm_a + 3));

  std::vector<int> offset(n + 1, 0);
  for (int v = 0; v < n; ++v) offset[v + 1] = offset[v] + sizes[v];

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(Rng::child_seed(seed, attempt));
    Structure b;
    for (int v = 0; v < n; ++v)
      for (int j = 0; j < sizes[v]; ++j)
        b.universe.push_back(a.universe[v] + "." + std::to_string(j));
    for (const auto& sym : a.sig.symbols) b.add_symbol(sym.name, sym.arity);

    bool ok = true;
    for (size_t r = 0; r < a.relations.size() && ok; ++r) {
      const auto& scope = a.relations[r][0];
      int ar = static_cast<int>(scope.size());
      std::vector<int> idx(ar, 0), tup(ar);
      long long kept = 0;
      for (bool done = false; !done;) {
        if (rng.coin()) {
          for (int i = 0; i < ar; ++i) tup[i] = offset[scope[i]] + idx[i];
          b.relations[r].push_back(tup);
          if (++kept > N) {
            ok = false;  // relation outgrew its N-tuple allowance
            break;
          }
        }
        // odometer, last position fastest
        int i = ar - 1;
        while (i >= 0 && ++idx[i] == sizes[scope[i]]) idx[i--] = 0;
        done = i < 0;
      }
    }
    if (!ok) continue;

    std::vector<std::vector<int>> doms(n);
    for (int v = 0; v < n; ++v)
      for (int j = 0; j < sizes[v]; ++j) doms[v].push_back(offset[v] + j);

    for (size_t r = 0; r < a.relations.size() && ok; ++r) {
      std::vector<std::vector<int>> scope_doms;
      for (int v : a.relations[r][0]) scope_doms.push_back(doms[v]);
      if (!is_n_scattered(b.relations[r], scope_doms, N, scatter_budget)) ok = false;
    }
    if (!ok) continue;

    long long count = count_homs(a, b, oracle_budget);
    if (Rational(count) < bar) continue;

    if (b.total_tuples() > norm_a * static_cast<long long>(N))
      throw Error("gen_flow_structure: internal check failed: ||B|| above ||a||*N");
    FlowStructure fs;
    fs.b = std::move(b);
    fs.dom = std::move(doms);
    fs.N = N;
    fs.seed = seed;
    fs.attempts = attempt + 1;
    fs.mu = mu;
    for (const auto& w : mu.w) fs.t_exponent += w;
    fs.hom_count = count;
    fs.hom_bar = bar;
    return fs;
  }
  throw RetriesExhausted("gen_flow_structure: no acceptable sample in " +
                         std::to_string(max_retries) + " attempts (bar " + to_string(bar) +
                         "; try a larger N or more retries)");
}

}  // namespace homfactor

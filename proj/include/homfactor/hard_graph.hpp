#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/rational.hpp"
#include "homfactor/rng.hpp"

namespace homfactor {

constexpr long long kDefaultBicliqueBudget = 20'000'000;

namespace detail {

// Row-major adjacency bitset. Clique expansion and the biclique search both
// live on word-wise neighborhood intersections.
struct AdjBits {
  int n = 0;
  int words = 0;
  std::vector<std::uint64_t> bits;

  explicit AdjBits(const Hypergraph& g)
      : n(g.n), words((g.n + 63) / 64), bits(static_cast<size_t>(g.n) * words, 0) {
    for (const auto& e : g.edges) {
      set(e[0], e[1]);
      set(e[1], e[0]);
    }
  }

  void set(int u, int v) { bits[static_cast<size_t>(u) * words + v / 64] |= 1ULL << (v % 64); }
  const std::uint64_t* row(int u) const { return bits.data() + static_cast<size_t>(u) * words; }

  int degree(int u) const {
    int d = 0;
    for (int w = 0; w < words; ++w) d += std::popcount(row(u)[w]);
    return d;
  }
};

}  // namespace detail

// Exact number of t-cliques by ordered expansion: extend v1 < v2 < ... < vt,
// intersecting the candidate set with each new vertex's neighborhood. The cap
// keeps the count honest at desk scale; raise it only with a profiler open.
inline long long count_t_cliques(const Hypergraph& g, int t) {
  require_graph(g, "count_t_cliques");
  if (t < 0) throw BadScope("count_t_cliques: t must be nonnegative");
  if (t > 6)
    throw TooLarge("count_t_cliques: t=" + std::to_string(t) + " above the exact-count cap of 6");
  if (t == 0) return 1;
  if (t == 1) return g.n;

  detail::AdjBits adj(g);
  long long count = 0;
  std::vector<std::uint64_t> buf(static_cast<size_t>(t) * adj.words, 0);
  auto expand = [&](auto&& self, int depth, const std::uint64_t* live) -> void {
    std::uint64_t* next = buf.data() + static_cast<size_t>(depth) * adj.words;
    for (int w = 0; w < adj.words; ++w) {
      std::uint64_t m = live[w];
      while (m) {
        int v = w * 64 + std::countr_zero(m);
        m &= m - 1;
        if (depth + 1 == t) {
          ++count;
          continue;
        }
        // candidates after v: neighbors of v, above v, still live
        for (int x = 0; x < adj.words; ++x) next[x] = live[x] & adj.row(v)[x];
        for (int x = 0; x < w; ++x) next[x] = 0;
        next[w] &= ~((v % 64 == 63) ? ~0ULL : ((1ULL << (v % 64 + 1)) - 1));
        self(self, depth + 1, next);
      }
    }
  };
  std::vector<std::uint64_t> all(adj.words, 0);
  for (int v = 0; v < g.n; ++v) all[v / 64] |= 1ULL << (v % 64);
  expand(expand, 0, all.data());
  return count;
}

// Outcome of the K_{a,a} search. Both certain outcomes are sound: Verified
// means the exhaustive search finished with no grid, Violation carries the
// grid itself (side_s, side_t disjoint, every cross pair an edge). Running
// out of budget degrades to Inconclusive, never to a wrong answer.
struct BicliqueCheck {
  enum class Outcome { Verified, Violation, Inconclusive };
  Outcome outcome = Outcome::Verified;
  std::vector<int> side_s, side_t;
  long long nodes = 0;
};

inline BicliqueCheck verify_biclique_free(const Hypergraph& g, int a,
                                          long long budget = kDefaultBicliqueBudget) {
  require_graph(g, "verify_biclique_free");
  if (a < 1) throw BadScope("verify_biclique_free: a must be at least 1");
  BicliqueCheck out;
  if (2 * a > g.n) return out;

  detail::AdjBits adj(g);

  // Peel to the a-core: every vertex of either side needs a neighbors that
  // themselves survive, so iterate the degree filter to a fixpoint.
  std::vector<char> alive(g.n, 1);
  for (bool changed = true; changed;) {
    changed = false;
    for (int v = 0; v < g.n; ++v) {
      if (!alive[v]) continue;
      int d = 0;
      for (int u = 0; u < g.n; ++u)
        if (alive[u] && u != v && (adj.row(v)[u / 64] >> (u % 64) & 1)) ++d;
      if (d < a) {
        alive[v] = 0;
        changed = true;
      }
    }
  }
  std::vector<int> core;
  for (int v = 0; v < g.n; ++v)
    if (alive[v]) core.push_back(v);
  int m = static_cast<int>(core.size());
  if (m < 2 * a) return out;

  // Local adjacency over the core, rows ordered by degree descending so the
  // common-neighborhood popcount prunes early.
  std::sort(core.begin(), core.end(),
            [&](int x, int y) { return adj.degree(x) != adj.degree(y) ? adj.degree(x) > adj.degree(y) : x < y; });
  int words = (m + 63) / 64;
  std::vector<std::uint64_t> local(static_cast<size_t>(m) * words, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (adj.row(core[i])[core[j] / 64] >> (core[j] % 64) & 1)
        local[static_cast<size_t>(i) * words + j / 64] |= 1ULL << (j % 64);

  auto popcnt = [&](const std::uint64_t* w) {
    int c = 0;
    for (int x = 0; x < words; ++x) c += std::popcount(w[x]);
    return c;
  };

  std::vector<int> chosen;
  std::vector<std::uint64_t> stack(static_cast<size_t>(a + 1) * words, ~0ULL);
  bool truncated = false;
  auto search = [&](auto&& self, int start, int depth) -> bool {
    const std::uint64_t* common = stack.data() + static_cast<size_t>(depth) * words;
    if (depth == a) {
      // common neighborhood already checked >= a below; read off a grid
      for (int i = 0; i < m && static_cast<int>(out.side_t.size()) < a; ++i)
        if (common[i / 64] >> (i % 64) & 1) out.side_t.push_back(core[i]);
      out.side_s = chosen;
      return true;
    }
    for (int i = start; m - i >= a - depth; ++i) {
      if (++out.nodes > budget) {
        truncated = true;
        return false;
      }
      std::uint64_t* next = stack.data() + static_cast<size_t>(depth + 1) * words;
      for (int x = 0; x < words; ++x)
        next[x] = common[x] & local[static_cast<size_t>(i) * words + x];
      if (popcnt(next) < a) continue;
      chosen.push_back(core[i]);
      if (self(self, i + 1, depth + 1)) return true;
      chosen.pop_back();
      if (truncated) return false;
    }
    return false;
  };
  // depth 0 starts from the all-ones column mask (padding bits beyond m are
  // harmless: no row has them set, so the first intersection clears them)
  bool found = search(search, 0, 0);
  if (found)
    out.outcome = BicliqueCheck::Outcome::Violation;
  else if (truncated)
    out.outcome = BicliqueCheck::Outcome::Inconclusive;
  return out;
}

// Certificate sheet for one accepted sample of H(t,n). The generator only
// returns accepted instances, so the booleans are true by construction; they
// are kept explicit because the certificate travels in output files.
struct HardGraphCert {
  Hypergraph graph;
  int n = 0;
  int t = 0;
  std::uint64_t seed = 0;
  int attempts = 0;

  long long edge_count = 0;
  bool edges_ok = false;  // 8 * edge_count >= n^2
  long long t_clique_count = 0;
  Rational t_clique_threshold;  // C(n,t) / 2^{C(t,2)+1}, half the G(n,1/2) expectation
  bool cliques_ok = false;

  enum class Biclique { Verified, Probabilistic };
  Biclique biclique_status = Biclique::Verified;
  int biclique_a = 0;  // ceil(3 log2 n)
  long double biclique_failure_bound = 0.0L;  // per partition pair, probabilistic case only

  std::string summary() const {
    std::string s = "H(" + std::to_string(t) + "," + std::to_string(n) + "): " +
                    std::to_string(edge_count) + " edges, " + std::to_string(t_clique_count) +
                    " " + std::to_string(t) + "-cliques >= " + to_string(t_clique_threshold) +
                    ", K_{a,a}-free at a=" + std::to_string(biclique_a) +
                    (biclique_status == Biclique::Verified ? " (verified)" : " (probabilistic)") +
                    ", attempt " + std::to_string(attempts);
    return s;
  }
};

// ceil(3 log2 n), the side length the biclique check runs at.
inline int biclique_a_of(int n) {
  if (n < 2) throw BadScope("biclique_a_of: n must be at least 2");
  return static_cast<int>(ceil_log2_pow(static_cast<unsigned long>(n), 3));
}

// Rejection-sample G(n,1/2) until one draw has >= n^2/8 edges, at least half
// the expected number of t-cliques, and no K_{a,a} at a = ceil(3 log2 n). A
// biclique search that exhausts its budget downgrades the certificate to
// probabilistic (with the per-pair failure bound 2^{-3 log2^2 n}) instead of
// rejecting; a found grid rejects the whole sample. Fixed (t, n, seed) gives
// a bit-identical certificate on every platform.
inline HardGraphCert gen_hard_graph(int t, int n, std::uint64_t seed, int max_retries = 64,
                                    long long biclique_budget = kDefaultBicliqueBudget,
                                    int min_n = -1) {
  if (t < 2) throw BadScope("gen_hard_graph: t must be at least 2");
  int n0 = min_n >= 0 ? min_n : 2 * t;
  if (n < n0)
    throw BadScope("gen_hard_graph: n=" + std::to_string(n) + " below the n0(t)=" +
                   std::to_string(n0) + " cutoff (pass min_n to override)");
  if (max_retries < 1) throw BadScope("gen_hard_graph: max_retries must be at least 1");

  Rational threshold(binomial(n, t), BigInt(1) << (t * (t - 1) / 2 + 1));
  int a = biclique_a_of(n);

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(Rng::child_seed(seed, attempt));
    std::vector<std::vector<int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.coin()) edges.push_back({i, j});
    long long e = static_cast<long long>(edges.size());
    Hypergraph g = Hypergraph::from_edges(n, std::move(edges));

    if (8 * e < static_cast<long long>(n) * n) continue;
    long long cliques = count_t_cliques(g, t);
    if (Rational(cliques) < threshold) continue;
    BicliqueCheck bc = verify_biclique_free(g, a, biclique_budget);
    if (bc.outcome == BicliqueCheck::Outcome::Violation) continue;

    HardGraphCert cert;
    cert.graph = std::move(g);
    cert.n = n;
    cert.t = t;
    cert.seed = seed;
    cert.attempts = attempt + 1;
    cert.edge_count = e;
    cert.edges_ok = true;
    cert.t_clique_count = cliques;
    cert.t_clique_threshold = threshold;
    cert.cliques_ok = true;
    cert.biclique_a = a;
    if (bc.outcome == BicliqueCheck::Outcome::Verified) {
      cert.biclique_status = HardGraphCert::Biclique::Verified;
    } else {
      cert.biclique_status = HardGraphCert::Biclique::Probabilistic;
      long double l = std::log2(static_cast<long double>(n));
      cert.biclique_failure_bound = std::exp2(-3.0L * l * l);
    }
    return cert;
  }
  throw RetriesExhausted("gen_hard_graph: no acceptable G(" + std::to_string(n) +
                         ",1/2) sample in " + std::to_string(max_retries) +
                         " attempts (n may be too small for the thresholds)");
}

}  // namespace homfactor

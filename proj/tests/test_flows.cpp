#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "homfactor/flow.hpp"
#include "homfactor/hpath.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/rng.hpp"

using namespace homfactor;

namespace {

Hypergraph cycle_graph(int k) {
  std::vector<std::vector<int>> edges;
  for (int i = 0; i < k; ++i) edges.push_back({i, (i + 1) % k});
  return Hypergraph::from_edges(k, edges);
}

Hypergraph random_connected_graph(Rng& rng, int n) {
  for (;;) {
    std::vector<std::vector<int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.coin()) edges.push_back({i, j});
    Hypergraph h = Hypergraph::from_edges(n, edges);
    if (h.connected()) return h;
  }
}

Rational clique_alpha(const ConcurrentFlow& cf, const VertexWeights& alpha, size_t i) {
  Rational total(0);
  for (int v : cf.cliques[i]) total += alpha.w[v];
  return total;
}

}  // namespace

TEST_CASE("path enumeration on small graphs") {
  SECTION("single edge") {
    Hypergraph h = Hypergraph::from_edges(2, {{0, 1}});
    REQUIRE(enumerate_paths(h, {0}, {1}) == std::vector<HPath>{{0, 1}});
    REQUIRE(enumerate_paths(h, {0}, {0}) == std::vector<HPath>{{0}});
  }
  SECTION("minimality filter on the triangle") {
    // (0,1,2) is a path but not minimal: the chord 0-2 shortcuts it
    REQUIRE(enumerate_paths(complete_graph(3), {0}, {2}) == std::vector<HPath>{{0, 2}});
  }
  SECTION("length cap counts vertices") {
    Hypergraph p4 = path_graph(4);
    REQUIRE(enumerate_paths(p4, {0}, {3}) == std::vector<HPath>{{0, 1, 2, 3}});
    REQUIRE(enumerate_paths(p4, {0}, {3}, 3).empty());
  }
  SECTION("hyperedge co-occurrence is adjacency") {
    Hypergraph h = Hypergraph::from_edges(4, {{0, 1, 2}, {2, 3}});
    REQUIRE(enumerate_paths(h, {0}, {3}) == std::vector<HPath>{{0, 2, 3}});
  }
  SECTION("lexicographic output order, single-vertex paths included") {
    std::vector<HPath> want{{0, 1}, {0, 2}, {1}, {1, 2}};
    REQUIRE(enumerate_paths(complete_graph(3), {0, 1}, {1, 2}) == want);
  }
  SECTION("budget and scope errors") {
    REQUIRE_THROWS_AS(enumerate_paths(path_graph(4), {0}, {3}, 6, 2), BudgetExceeded);
    REQUIRE_THROWS_AS(enumerate_paths(path_graph(4), {0}, {3}, 0), BadScope);
    REQUIRE_THROWS_AS(enumerate_paths(path_graph(4), {0}, {9}), BadScope);
  }
}

TEST_CASE("flow validation checks shapes and edge loads") {
  Hypergraph edge = Hypergraph::from_edges(2, {{0, 1}});
  SECTION("unit flow on an edge is fine") {
    Flow f{{{0, 1}}, {Rational(1)}, Rational(1)};
    REQUIRE(validate_flow(edge, f).ok());
  }
  SECTION("load 3/2 is an overload") {
    Flow f{{{0, 1}}, {Rational(3, 2)}, Rational(3, 2)};
    ValidationReport rep = validate_flow(edge, f);
    REQUIRE_FALSE(rep.ok());
    REQUIRE(rep.summary().find("3/2") != std::string::npos);
  }
  SECTION("stored value must match the weight sum") {
    Flow f{{{0, 1}}, {Rational(1, 2)}, Rational(1)};
    REQUIRE_FALSE(validate_flow(edge, f).ok());
  }
  SECTION("negative weights are rejected") {
    Flow f{{{0, 1}}, {Rational(-1)}, Rational(-1)};
    REQUIRE_FALSE(validate_flow(edge, f).ok());
  }
  SECTION("non-minimal paths are rejected") {
    Flow f{{{0, 1, 2}}, {Rational(1, 3)}, Rational(1, 3)};
    ValidationReport rep = validate_flow(complete_graph(3), f);
    REQUIRE_FALSE(rep.ok());
    REQUIRE(rep.summary().find("minimal") != std::string::npos);
  }
  SECTION("repeated vertices are rejected") {
    Flow f{{{0, 1, 0}}, {Rational(1, 3)}, Rational(1, 3)};
    REQUIRE_FALSE(validate_flow(complete_graph(3), f).ok());
  }
  SECTION("triangle direct paths at 1/3 saturate every edge") {
    // each edge meets all three paths through a shared endpoint
    Flow f{{{0, 1}, {0, 2}, {1, 2}},
           {Rational(1, 3), Rational(1, 3), Rational(1, 3)},
           Rational(1)};
    Hypergraph tri = complete_graph(3);
    REQUIRE(validate_flow(tri, f).ok());
    for (const Rational& load : edge_loads(tri, f)) REQUIRE(load == Rational(1));
    f.weights.assign(3, Rational(1, 2));
    f.value = Rational(3, 2);
    REQUIRE_FALSE(validate_flow(tri, f).ok());
  }
}

TEST_CASE("maximum (A,B)-flow via the path LP") {
  SECTION("single edge carries one unit") {
    Flow f = max_ab_flow(Hypergraph::from_edges(2, {{0, 1}}), {0}, {1});
    REQUIRE(f.value == Rational(1));
    REQUIRE(validate_flow(Hypergraph::from_edges(2, {{0, 1}}), f).ok());
  }
  SECTION("a path graph carries one unit end to end") {
    REQUIRE(max_ab_flow(path_graph(3), {0}, {2}).value == Rational(1));
  }
  SECTION("two parallel middle vertices still cap at one") {
    // u-x-v and u-y-v: both routes intersect any edge at u, so they share it
    Hypergraph h = Hypergraph::from_edges(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
    Flow f = max_ab_flow(h, {0}, {3});
    REQUIRE(f.value == Rational(1));
    REQUIRE(validate_flow(h, f).ok());
  }
  SECTION("separate components carry nothing") {
    Flow f = max_ab_flow(Hypergraph::from_edges(3, {{0, 1}}), {0}, {2});
    REQUIRE(f.value == Rational(0));
    REQUIRE(f.paths.empty());
  }
  SECTION("spread terminals on a six-cycle carry two units") {
    // (0,1) and (3,4) touch disjoint edge triples, so both run at weight 1;
    // conversely every path from 0 meets {5,0} and every path from 3 meets
    // {2,3}, capping the total at 2
    Hypergraph c6 = cycle_graph(6);
    Flow f = max_ab_flow(c6, {0, 3}, {1, 4});
    REQUIRE(f.value == Rational(2));
    REQUIRE(validate_flow(c6, f).ok());
  }
  SECTION("witnesses validate on random graphs") {
    Rng rng(910910);
    for (int trial = 0; trial < 15; ++trial) {
      int n = 2 + static_cast<int>(rng.below(6));
      Hypergraph h = random_connected_graph(rng, n);
      std::vector<int> a{static_cast<int>(rng.below(n))};
      std::vector<int> b{static_cast<int>(rng.below(n))};
      Flow f = max_ab_flow(h, a, b);
      INFO("trial " << trial << " n=" << n);
      REQUIRE(validate_flow(h, f).ok());
      if (a == b) REQUIRE(f.value >= Rational(1));
    }
  }
}

TEST_CASE("uniform concurrent flow") {
  SECTION("two singletons on one edge reach epsilon 1") {
    Hypergraph h = Hypergraph::from_edges(2, {{0, 1}});
    ConcurrentFlow cf = max_uniform_concurrent_flow(h, {{0}, {1}});
    REQUIRE(cf.epsilon == Rational(1));
    REQUIRE(validate_concurrent_flow(h, cf).ok());
  }
  SECTION("triangle singletons reach exactly 1/3") {
    // every pair path meets every edge, so the three pair flows share each
    // unit of edge capacity three ways
    Hypergraph tri = complete_graph(3);
    ConcurrentFlow cf = max_uniform_concurrent_flow(tri, {{0}, {1}, {2}});
    REQUIRE(cf.epsilon == Rational(1, 3));
    REQUIRE(cf.pairs.size() == 3);
    for (const Flow& f : cf.pair_flows) REQUIRE(f.value == Rational(1, 3));
    REQUIRE(validate_concurrent_flow(tri, cf).ok());
  }
  SECTION("alternate vertices of a six-cycle reach 1/2") {
    // every admissible arc touches at least four of the six edges, so
    // 12 eps <= 6; routing the three short arcs attains it
    Hypergraph c6 = cycle_graph(6);
    ConcurrentFlow cf = max_uniform_concurrent_flow(c6, {{0}, {2}, {4}});
    REQUIRE(cf.epsilon == Rational(1, 2));
    REQUIRE(validate_concurrent_flow(c6, cf).ok());
  }
  SECTION("pair cliques across a four-cycle reach 1") {
    Hypergraph c4 = cycle_graph(4);
    ConcurrentFlow cf = max_uniform_concurrent_flow(c4, {{0, 1}, {2, 3}});
    REQUIRE(cf.epsilon == Rational(1));
    REQUIRE(validate_concurrent_flow(c4, cf).ok());
  }
  SECTION("unreachable cliques get epsilon 0") {
    Hypergraph h = Hypergraph::from_edges(4, {{0, 1}, {2, 3}});
    ConcurrentFlow cf = max_uniform_concurrent_flow(h, {{0}, {3}});
    REQUIRE(cf.epsilon == Rational(0));
    REQUIRE(cf.pair_flows[0].paths.empty());
  }
  SECTION("partition preconditions") {
    Hypergraph tri = complete_graph(3);
    REQUIRE_THROWS_AS(max_uniform_concurrent_flow(tri, {{0}}), BadPartition);
    REQUIRE_THROWS_AS(max_uniform_concurrent_flow(tri, {{0}, {}}), BadPartition);
    REQUIRE_THROWS_AS(max_uniform_concurrent_flow(tri, {{0}, {0}}), BadPartition);
    REQUIRE_THROWS_AS(max_uniform_concurrent_flow(tri, {{0}, {7}}), BadPartition);
    REQUIRE_THROWS_AS(max_uniform_concurrent_flow(path_graph(3), {{0, 2}, {1}}), BadPartition);
    // pairwise adjacency is not enough: a clique must sit inside one edge
    REQUIRE_THROWS_AS(max_uniform_concurrent_flow(complete_graph(4), {{0, 1, 2}, {3}}),
                      BadPartition);
  }
  SECTION("concurrent validation catches tampering") {
    Hypergraph tri = complete_graph(3);
    ConcurrentFlow cf = max_uniform_concurrent_flow(tri, {{0}, {1}, {2}});
    ConcurrentFlow wrong_eps = cf;
    wrong_eps.epsilon = Rational(1, 2);
    REQUIRE_FALSE(validate_concurrent_flow(tri, wrong_eps).ok());
    ConcurrentFlow wrong_start = cf;
    wrong_start.pair_flows[0].paths[0] = {2, 1};
    REQUIRE_FALSE(validate_concurrent_flow(tri, wrong_start).ok());
  }
}

TEST_CASE("mu and alpha weightings") {
  SECTION("mu of a unit edge path") {
    VertexWeights mu = mu_of_flow(Hypergraph::from_edges(2, {{0, 1}}), Flow{{{0, 1}}, {Rational(1)}, Rational(1)});
    REQUIRE(mu.w == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    REQUIRE(mu.total == Rational(1));
  }
  SECTION("mu of a three-vertex path") {
    VertexWeights mu = mu_of_flow(path_graph(3), Flow{{{0, 1, 2}}, {Rational(1)}, Rational(1)});
    for (const Rational& x : mu.w) REQUIRE(x == Rational(1, 2));
    REQUIRE(mu.total == Rational(3, 2));
  }
  SECTION("mu of an empty flow is zero") {
    VertexWeights mu = mu_of_flow(path_graph(3), Flow{});
    REQUIRE(mu.total == Rational(0));
  }
  SECTION("two singletons split alpha evenly") {
    Hypergraph h = Hypergraph::from_edges(2, {{0, 1}});
    ConcurrentFlow cf = max_uniform_concurrent_flow(h, {{0}, {1}});
    VertexWeights alpha = alpha_of_flow(h, cf, {0, 1});
    REQUIRE(alpha.w == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    REQUIRE(alpha.total == Rational(1));
  }
  SECTION("triangle alpha lands on delta per clique") {
    Hypergraph tri = complete_graph(3);
    ConcurrentFlow cf = max_uniform_concurrent_flow(tri, {{0}, {1}, {2}});
    VertexWeights alpha = alpha_of_flow(tri, cf, {0, 1, 2});
    Rational delta = cf.epsilon * 2 / 2;  // eps (k-1) / 2 with k = 3
    for (size_t i = 0; i < 3; ++i) REQUIRE(clique_alpha(cf, alpha, i) == delta);
    REQUIRE(alpha.total == 3 * delta);
    VertexWeights mu = mu_of_flow(tri, cf);
    for (int v = 0; v < 3; ++v) REQUIRE(alpha.w[v] <= mu.w[v]);
    REQUIRE(mu.total == Rational(1));
  }
  SECTION("alpha is zero off the cliques and W must be their union") {
    Hypergraph c6 = cycle_graph(6);
    ConcurrentFlow cf = max_uniform_concurrent_flow(c6, {{0}, {2}, {4}});
    VertexWeights alpha = alpha_of_flow(c6, cf, {0, 2, 4});
    REQUIRE(alpha.w[1] == Rational(0));
    REQUIRE(alpha.w[3] == Rational(0));
    REQUIRE(alpha.w[5] == Rational(0));
    REQUIRE_THROWS_AS(alpha_of_flow(c6, cf, {0, 1, 2}), BadScope);
  }
}

TEST_CASE("alpha balance report classifies cliques by mass side") {
  // hand-built witness on the four-cycle so the per-path weights are pinned
  Hypergraph c4 = cycle_graph(4);
  ConcurrentFlow cf;
  cf.cliques = {{0, 1}, {2, 3}};
  cf.pairs = {{0, 1}};
  cf.pair_flows = {Flow{{{0, 3}, {1, 2}}, {Rational(1, 2), Rational(1, 2)}, Rational(1)}};
  cf.epsilon = Rational(1);
  REQUIRE(validate_concurrent_flow(c4, cf).ok());
  VertexWeights alpha = alpha_of_flow(c4, cf, {0, 1, 2, 3});
  for (int v = 0; v < 4; ++v) REQUIRE(alpha.w[v] == Rational(1, 4));

  SECTION("partition along the cliques puts each on one side") {
    AlphaBalanceReport rep = alpha_balance_report(c4, cf, alpha, {0, 1});
    REQUIRE(rep.delta == Rational(1, 2));
    REQUIRE(rep.balanced.empty());
    REQUIRE(rep.light_in_y == std::vector<int>{0});  // clique 0 lives in X
    REQUIRE(rep.light_in_x == std::vector<int>{1});
    REQUIRE(rep.light_product() == 1);
    REQUIRE(rep.masses[0] == std::pair<Rational, Rational>{Rational(1, 2), Rational(0)});
  }
  SECTION("partition across the cliques splits both") {
    AlphaBalanceReport rep = alpha_balance_report(c4, cf, alpha, {0, 2});
    REQUIRE(rep.balanced == std::vector<int>{0, 1});
    REQUIRE(rep.light_in_x.empty());
    REQUIRE(rep.light_in_y.empty());
  }
  SECTION("triangle singleton flow splits nothing") {
    Hypergraph tri = complete_graph(3);
    ConcurrentFlow tcf = max_uniform_concurrent_flow(tri, {{0}, {1}, {2}});
    VertexWeights ta = alpha_of_flow(tri, tcf, {0, 1, 2});
    AlphaBalanceReport rep = alpha_balance_report(tri, tcf, ta, {0});
    REQUIRE(rep.delta == Rational(1, 3));
    REQUIRE(rep.balanced.empty());
    REQUIRE(rep.light_in_y == std::vector<int>{0});
    REQUIRE(rep.light_in_x == std::vector<int>{1, 2});
    REQUIRE(rep.light_product() == 2);
  }
  SECTION("zero flow makes every clique trivially balanced") {
    Hypergraph h = Hypergraph::from_edges(4, {{0, 1}, {2, 3}});
    ConcurrentFlow zcf = max_uniform_concurrent_flow(h, {{0}, {3}});
    VertexWeights za = alpha_of_flow(h, zcf, {0, 3});
    AlphaBalanceReport rep = alpha_balance_report(h, zcf, za, {0});
    REQUIRE(rep.delta == Rational(0));
    REQUIRE(rep.balanced == std::vector<int>{0, 1});
    REQUIRE(rep.light_in_x.empty());
    REQUIRE(rep.light_in_y.empty());
  }
  SECTION("partition vertices must be in range") {
    REQUIRE_THROWS_AS(alpha_balance_report(c4, cf, alpha, {9}), BadScope);
  }
}

TEST_CASE("concurrent flow invariants hold on random graphs") {
  Rng rng(515151);
  int done = 0;
  while (done < 12) {
    int n = 3 + static_cast<int>(rng.below(5));
    Hypergraph h = random_connected_graph(rng, n);
    auto adj = detail::gaifman_matrix(h);

    // adjacent singleton pair: connected union, so epsilon is exactly 1
    int a = static_cast<int>(rng.below(n));
    std::vector<int> nbrs;
    for (int u = 0; u < n; ++u)
      if (adj[a][u]) nbrs.push_back(u);
    if (nbrs.empty()) continue;
    int b = nbrs[rng.below(nbrs.size())];
    ConcurrentFlow cf2 = max_uniform_concurrent_flow(h, {{a}, {b}});
    INFO("n=" << n << " a=" << a << " b=" << b);
    REQUIRE(cf2.epsilon == Rational(1));
    REQUIRE(validate_concurrent_flow(h, cf2).ok());

    // singleton triple around a middle vertex: union connected through b, so
    // epsilon >= 1 / C(3,2); alpha lands on delta and stays below mu, and
    // minimal paths keep every edge's mu mass at most 1
    std::vector<int> bn;
    for (int u = 0; u < n; ++u)
      if (adj[b][u] && u != a) bn.push_back(u);
    if (bn.empty()) continue;
    int c = bn[rng.below(bn.size())];
    ConcurrentFlow cf3 = max_uniform_concurrent_flow(h, {{a}, {b}, {c}});
    INFO("triple " << a << " " << b << " " << c);
    REQUIRE(cf3.epsilon >= Rational(1, 3));
    REQUIRE(validate_concurrent_flow(h, cf3).ok());
    VertexWeights alpha = alpha_of_flow(h, cf3, {a, b, c});
    VertexWeights mu = mu_of_flow(h, cf3);
    Rational delta = cf3.epsilon;  // eps (k-1) / 2 with k = 3
    for (size_t i = 0; i < 3; ++i) REQUIRE(clique_alpha(cf3, alpha, i) == delta);
    for (int v = 0; v < n; ++v) REQUIRE(alpha.w[v] <= mu.w[v]);
    for (const auto& e : h.edges) {
      Rational s(0);
      for (int v : e) s += mu.w[v];
      REQUIRE(s <= Rational(1));
    }
    ++done;
  }
}

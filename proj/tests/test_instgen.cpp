#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "homfactor/circuit_eval.hpp"
#include "homfactor/flow.hpp"
#include "homfactor/flow_structure.hpp"
#include "homfactor/hard_graph.hpp"
#include "homfactor/hom_oracle.hpp"
#include "homfactor/kpartite.hpp"
#include "homfactor/reductions.hpp"
#include "homfactor/rng.hpp"
#include "homfactor/structure.hpp"
#include "homfactor/validation.hpp"

using namespace homfactor;

namespace {

// The worked triangle target: a1,a2,b1,b2,c,d1,d2 with the a-b, b-c, a-c,
// c-d, a-d edges. Its eight triangles are {a_i,b_j,c} and {a_i,c,d_j}.
Hypergraph worked_target() {
  std::vector<std::vector<int>> e;
  for (int a = 0; a < 2; ++a)
    for (int b = 2; b < 4; ++b) e.push_back({a, b});
  for (int b = 2; b < 4; ++b) e.push_back({b, 4});
  for (int a = 0; a < 2; ++a) e.push_back({a, 4});
  for (int d = 5; d < 7; ++d) e.push_back({4, d});
  for (int a = 0; a < 2; ++a)
    for (int d = 5; d < 7; ++d) e.push_back({a, d});
  return Hypergraph::from_edges(7, std::move(e));
}

Hypergraph random_graph(Rng& rng, int n) {
  std::vector<std::vector<int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.coin()) e.push_back({i, j});
  return Hypergraph::from_edges(n, std::move(e));
}

// Exhaustive K_{a,a} witness search, usable up to n ~ 12: some a-subset S
// whose common neighborhood has a elements.
bool biclique_oracle(const Hypergraph& g, int a) {
  std::vector<std::set<int>> nb(g.n);
  for (const auto& e : g.edges) {
    nb[e[0]].insert(e[1]);
    nb[e[1]].insert(e[0]);
  }
  std::vector<int> pick;
  auto rec = [&](auto&& self, int start) -> bool {
    if (static_cast<int>(pick.size()) == a) {
      int common = 0;
      for (int v = 0; v < g.n; ++v) {
        bool all = true;
        for (int s : pick)
          if (!nb[s].count(v)) {
            all = false;
            break;
          }
        if (all) ++common;
      }
      return common >= a;
    }
    for (int v = start; v < g.n; ++v) {
      pick.push_back(v);
      if (self(self, v + 1)) return true;
      pick.pop_back();
    }
    return false;
  };
  return rec(rec, 0);
}

void require_valid_grid(const Hypergraph& g, const BicliqueCheck& bc, int a) {
  REQUIRE(static_cast<int>(bc.side_s.size()) == a);
  REQUIRE(static_cast<int>(bc.side_t.size()) == a);
  std::set<int> all(bc.side_s.begin(), bc.side_s.end());
  all.insert(bc.side_t.begin(), bc.side_t.end());
  REQUIRE(static_cast<int>(all.size()) == 2 * a);
  std::set<std::pair<int, int>> edges;
  for (const auto& e : g.edges) {
    edges.insert({e[0], e[1]});
    edges.insert({e[1], e[0]});
  }
  for (int s : bc.side_s)
    for (int t : bc.side_t) REQUIRE(edges.count({s, t}) == 1);
}

// path x - y - z over one binary symbol
Structure path3_query() {
  Structure a;
  a.universe = {"x", "y", "z"};
  a.add_symbol("R", 2);
  a.add_tuple("R", {0, 1});
  a.add_tuple("R", {1, 2});
  return a;
}

VertexWeights make_mu(std::vector<Rational> w) {
  VertexWeights mu;
  mu.tag = "mu";
  mu.w = std::move(w);
  for (const auto& x : mu.w) mu.total += x;
  return mu;
}

}  // namespace

TEST_CASE("count_t_cliques counts exactly") {
  SECTION("complete graphs match binomials") {
    Hypergraph k5 = complete_graph(5);
    CHECK(count_t_cliques(k5, 0) == 1);
    CHECK(count_t_cliques(k5, 1) == 5);
    CHECK(count_t_cliques(k5, 2) == 10);
    CHECK(count_t_cliques(k5, 3) == 10);
    CHECK(count_t_cliques(k5, 4) == 5);
    CHECK(count_t_cliques(k5, 5) == 1);
    CHECK(count_t_cliques(complete_graph(7), 6) == 7);
  }

  SECTION("triangle-free graph has no 3-cliques") {
    Hypergraph c5 = Hypergraph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
    CHECK(count_t_cliques(c5, 3) == 0);
  }

  SECTION("2-cliques are edges") {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
      Hypergraph g = random_graph(rng, 4 + static_cast<int>(rng.below(8)));
      CHECK(count_t_cliques(g, 2) == static_cast<long long>(g.edges.size()));
    }
  }

  SECTION("worked target has eight triangles, 48 triangle homs") {
    Hypergraph g = worked_target();
    REQUIRE(count_t_cliques(g, 3) == 8);
    Structure k3 = structure_of_graph(complete_graph(3));
    Structure h = structure_of_graph(g);
    CHECK(count_homs(k3, h) == 6 * 8);
  }

  SECTION("the cap is enforced") {
    CHECK_THROWS_AS(count_t_cliques(complete_graph(8), 7), TooLarge);
    CHECK_THROWS_AS(count_t_cliques(complete_graph(3), -1), BadScope);
  }
}

TEST_CASE("verify_biclique_free is sound in both certain outcomes") {
  SECTION("K_{3,3} itself is a violation") {
    std::vector<std::vector<int>> e;
    for (int i = 0; i < 3; ++i)
      for (int j = 3; j < 6; ++j) e.push_back({i, j});
    Hypergraph g = Hypergraph::from_edges(6, std::move(e));
    BicliqueCheck bc = verify_biclique_free(g, 3);
    REQUIRE(bc.outcome == BicliqueCheck::Outcome::Violation);
    require_valid_grid(g, bc, 3);
  }

  SECTION("degree bound prunes a path instantly") {
    BicliqueCheck bc = verify_biclique_free(path_graph(6), 3);
    CHECK(bc.outcome == BicliqueCheck::Outcome::Verified);
    CHECK(bc.nodes == 0);
  }

  SECTION("an edgeless graph is trivially free") {
    Hypergraph g = Hypergraph::from_edges(4, {});
    CHECK(verify_biclique_free(g, 1).outcome == BicliqueCheck::Outcome::Verified);
  }

  SECTION("a = 1 means any edge is a grid") {
    Hypergraph g = Hypergraph::from_edges(3, {{0, 2}});
    BicliqueCheck bc = verify_biclique_free(g, 1);
    REQUIRE(bc.outcome == BicliqueCheck::Outcome::Violation);
    require_valid_grid(g, bc, 1);
  }

  SECTION("a planted K_{15,15} in a 32-vertex graph is found") {
    std::vector<std::vector<int>> e;
    for (int i = 0; i < 15; ++i)
      for (int j = 15; j < 30; ++j) e.push_back({i, j});
    Hypergraph g = Hypergraph::from_edges(32, std::move(e));
    BicliqueCheck bc = verify_biclique_free(g, 15);
    REQUIRE(bc.outcome == BicliqueCheck::Outcome::Violation);
    require_valid_grid(g, bc, 15);
  }

  SECTION("tiny budget degrades to Inconclusive, never to a wrong answer") {
    std::vector<std::vector<int>> e;
    for (int i = 0; i < 6; ++i)
      for (int j = 6; j < 12; ++j) e.push_back({i, j});
    Hypergraph g = Hypergraph::from_edges(12, std::move(e));
    BicliqueCheck bc = verify_biclique_free(g, 3, 1);
    CHECK(bc.outcome == BicliqueCheck::Outcome::Inconclusive);
  }

  SECTION("agreement with the exhaustive oracle on small graphs") {
    Rng rng(97);
    int violations = 0;
    for (int trial = 0; trial < 40; ++trial) {
      int n = 6 + static_cast<int>(rng.below(7));
      int a = 2 + static_cast<int>(rng.below(2));
      Hypergraph g = random_graph(rng, n);
      BicliqueCheck bc = verify_biclique_free(g, a);
      REQUIRE(bc.outcome != BicliqueCheck::Outcome::Inconclusive);
      bool has = biclique_oracle(g, a);
      CHECK((bc.outcome == BicliqueCheck::Outcome::Violation) == has);
      if (has) {
        require_valid_grid(g, bc, a);
        ++violations;
      }
    }
    CHECK(violations > 0);  // the sample sizes make grids common; prove both paths ran
  }

  SECTION("a must be positive") {
    CHECK_THROWS_AS(verify_biclique_free(path_graph(3), 0), BadScope);
  }
}

TEST_CASE("gen_hard_graph certifies the three properties") {
  SECTION("t=3, n=32 accepts with the pinned thresholds") {
    HardGraphCert cert = gen_hard_graph(3, 32, 1);
    CHECK(cert.edge_count >= 128);
    CHECK(cert.edges_ok);
    CHECK(cert.cliques_ok);
    CHECK(cert.t_clique_threshold == Rational(310));  // C(32,3) / 2^4
    CHECK(Rational(cert.t_clique_count) >= cert.t_clique_threshold);
    CHECK(cert.biclique_a == 15);
    CHECK(cert.attempts >= 1);
    CHECK(cert.summary().find("H(3,32)") == 0);
    CHECK(count_t_cliques(cert.graph, 3) == cert.t_clique_count);
  }

  SECTION("identical seed gives a bit-identical instance") {
    HardGraphCert a = gen_hard_graph(3, 24, 7);
    HardGraphCert b = gen_hard_graph(3, 24, 7);
    CHECK(a.graph.edges == b.graph.edges);
    CHECK(a.attempts == b.attempts);
    CHECK(a.t_clique_count == b.t_clique_count);
  }

  SECTION("2-clique count is the edge count") {
    HardGraphCert cert = gen_hard_graph(2, 8, 5);
    CHECK(cert.t_clique_count == cert.edge_count);
  }

  SECTION("clique homs match the clique count times t!") {
    HardGraphCert cert = gen_hard_graph(3, 20, 9);
    Structure k3 = structure_of_graph(complete_graph(3));
    Structure h = structure_of_graph(cert.graph);
    CHECK(count_homs(k3, h) == 6 * cert.t_clique_count);
  }

  SECTION("parameter guards") {
    CHECK_THROWS_AS(gen_hard_graph(1, 32, 0), BadScope);
    CHECK_THROWS_AS(gen_hard_graph(3, 4, 0), BadScope);  // below the n0 cutoff
  }

  SECTION("rejection can exhaust retries at tiny n, and can succeed") {
    // with min_n lowered, n=4 fails the triangle threshold for many seeds
    bool exhausted = false, accepted = false;
    for (std::uint64_t seed = 0; seed < 64 && !(exhausted && accepted); ++seed) {
      try {
        gen_hard_graph(3, 4, seed, 1, kDefaultBicliqueBudget, 0);
        accepted = true;
      } catch (const RetriesExhausted&) {
        exhausted = true;
      }
    }
    CHECK(exhausted);
    CHECK(accepted);
  }
}

TEST_CASE("individualize adds singleton color classes") {
  Structure a;
  a.universe = {"x", "y"};
  a.add_symbol("R", 2);
  a.add_tuple("R", {0, 1});

  SECTION("one color per element, nothing else") {
    Structure out = individualize(a);
    REQUIRE(out.sig.symbols.size() == 3);
    CHECK(out.sig.symbols[1].name == "P_x");
    CHECK(out.sig.symbols[2].name == "P_y");
    CHECK(out.relations[1] == std::vector<std::vector<int>>{{0}});
    CHECK(out.relations[2] == std::vector<std::vector<int>>{{1}});
    CHECK(out.total_tuples() == a.total_tuples() + 2);
    CHECK(is_individualized(out));
    CHECK_FALSE(is_individualized(a));
  }

  SECTION("individualizing twice adds nothing new") {
    Structure once = individualize(a);
    CHECK(individualize(once) == once);
  }

  SECTION("a squatting P_ symbol with other content is rejected") {
    Structure bad = a;
    bad.add_symbol("P_x", 1);
    bad.add_tuple("P_x", {1});
    CHECK_THROWS_AS(individualize(bad), BadScope);
  }

  SECTION("colored homs restrict the uncolored ones") {
    Structure q = path3_query();
    Structure q_id = individualize(q);
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      Structure b;
      for (int i = 0; i < 4; ++i) b.universe.push_back("b" + std::to_string(i));
      b.add_symbol("R", 2);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (rng.coin()) b.add_tuple("R", {i, j});
      Structure b_col = b;
      for (int v = 0; v < 3; ++v) {
        b_col.add_symbol(q_id.sig.symbols[1 + v].name, 1);
        for (int i = 0; i < 4; ++i)
          if (rng.coin()) b_col.add_tuple(q_id.sig.symbols[1 + v].name, {i});
      }
      FunctionSet colored = enumerate_homs(q_id, b_col);
      FunctionSet base = enumerate_homs(q, b);
      for (std::size_t i = 0; i < colored.size(); ++i) REQUIRE(base.contains(colored.row(i)));
    }
  }
}

TEST_CASE("sparsify_query splits base relations into singletons") {
  Structure a = individualize(path3_query());
  Structure sp = sparsify_query(a);
  REQUIRE(sp.sig.symbols.size() == 2);
  CHECK(sp.sig.symbols[0].name == "R[x,y]");
  CHECK(sp.sig.symbols[1].name == "R[y,z]");
  CHECK(sp.sig.symbols[0].arity == 2);
  CHECK(sp.relations[0] == std::vector<std::vector<int>>{{0, 1}});
  CHECK(sp.relations[1] == std::vector<std::vector<int>>{{1, 2}});
  CHECK(sp.universe == a.universe);

  CHECK_THROWS_AS(sparsify_query(path3_query()), BadScope);  // not individualized
}

TEST_CASE("sparsify_pair rebuilds B and preserves the hom set") {
  Structure a = individualize(path3_query());

  auto make_d = [&](std::vector<std::vector<int>> r_xy, std::vector<std::vector<int>> r_yz,
                    int nelems) {
    Structure d;
    for (int i = 0; i < nelems; ++i) d.universe.push_back("e" + std::to_string(i));
    d.add_symbol("R[x,y]", 2);
    d.add_symbol("R[y,z]", 2);
    for (const auto& t : r_xy) d.add_tuple("R[x,y]", t);
    for (const auto& t : r_yz) d.add_tuple("R[y,z]", t);
    return d;
  };

  SECTION("a one-hom chain") {
    Structure d = make_d({{0, 1}}, {{1, 2}}, 3);
    SparsifyResult res = sparsify_pair(a, d);
    CHECK(res.a_sp == sparsify_query(a));
    CHECK(res.b.sig == a.sig);
    CHECK(res.b.relations[0] == std::vector<std::vector<int>>({{0, 1}, {1, 2}}));
    CHECK(res.b.relations[1] == std::vector<std::vector<int>>{{0}});  // P_x = dom(x)
    CHECK(res.b.relations[2] == std::vector<std::vector<int>>{{1}});
    CHECK(res.b.relations[3] == std::vector<std::vector<int>>{{2}});
    CHECK(count_homs(a, res.b) == 1);
  }

  SECTION("a two-hom instance keeps both") {
    // dom(x) = {0,1}, dom(y) = {2,3}, dom(z) = {4}
    Structure d = make_d({{0, 2}, {1, 3}}, {{2, 4}, {3, 4}}, 5);
    SparsifyResult res = sparsify_pair(a, d);
    CHECK(res.b.relations[1] == std::vector<std::vector<int>>({{0}, {1}}));
    CHECK(res.b.relations[2] == std::vector<std::vector<int>>({{2}, {3}}));
    CHECK(res.b.relations[3] == std::vector<std::vector<int>>{{4}});
    CHECK(count_homs(a, res.b) == 2);
    CHECK(count_homs(res.a_sp, d) == 2);
  }

  SECTION("shared image element breaks coordinate respect") {
    Structure d = make_d({{0, 0}}, {{0, 1}}, 2);
    CHECK_THROWS_AS(sparsify_pair(a, d), NotCoordinateRespecting);
  }

  SECTION("an unrealized tuple breaks reducedness") {
    Structure d = make_d({{0, 1}}, {{1, 2}, {3, 4}}, 5);
    CHECK_THROWS_AS(sparsify_pair(a, d), NotReduced);
  }

  SECTION("signature and connectivity guards") {
    Structure d = make_d({{0, 1}}, {{1, 2}}, 3);
    Structure d_short = d;
    d_short.sig.symbols.pop_back();
    d_short.relations.pop_back();
    CHECK_THROWS_AS(sparsify_pair(a, d_short), SignatureMismatch);

    Structure loose;
    loose.universe = {"x", "y"};
    loose.add_symbol("R", 1);
    loose.add_tuple("R", {0});
    CHECK_THROWS_AS(sparsify_pair(individualize(loose), loose), DisconnectedQuery);
  }
}

TEST_CASE("order_query sorts and deduplicates each tuple") {
  SECTION("the (y,x,y) tuple becomes (x,y)") {
    Structure a;
    a.universe = {"y", "x"};
    a.add_symbol("R", 3);
    a.add_tuple("R", {0, 1, 0});
    Structure le = order_query(a, {1, 0});  // x before y
    REQUIRE(le.sig.symbols.size() == 1);
    CHECK(le.sig.symbols[0].name == "R_le");
    CHECK(le.sig.symbols[0].arity == 2);
    CHECK(le.relations[0] == std::vector<std::vector<int>>{{1, 0}});
  }

  SECTION("an already-ordered tuple keeps its arity") {
    Structure a;
    a.universe = {"x", "y"};
    a.add_symbol("R", 2);
    a.add_tuple("R", {0, 1});
    Structure le = order_query(a, {0, 1});
    CHECK(le.sig.symbols[0].arity == 2);
    CHECK(le.relations[0] == a.relations[0]);
  }

  SECTION("guards") {
    Structure a;
    a.universe = {"x", "y"};
    a.add_symbol("R", 2);
    a.add_tuple("R", {0, 1});
    a.add_tuple("R", {1, 0});
    CHECK_THROWS_AS(order_query(a, {0, 1}), BadScope);  // two tuples
    Structure one;
    one.universe = {"x", "y"};
    one.add_symbol("R", 2);
    one.add_tuple("R", {0, 1});
    CHECK_THROWS_AS(order_query(one, {0, 0}), BadScope);  // not a permutation
  }
}

TEST_CASE("order_pair de-orders the data through the repetition map") {
  SECTION("the worked (y,x,y) example round-trips") {
    Structure a;
    a.universe = {"y", "x"};
    a.add_symbol("R", 3);
    a.add_tuple("R", {0, 1, 0});

    Structure d;
    d.universe = {"x1", "x2", "y1"};
    d.add_symbol("R_le", 2);
    d.add_tuple("R_le", {0, 2});
    d.add_tuple("R_le", {1, 2});

    OrderResult res = order_pair(a, {1, 0}, d);
    CHECK(res.a_le == order_query(a, {1, 0}));
    CHECK(res.b.sig == a.sig);
    CHECK(res.b.relations[0] == std::vector<std::vector<int>>({{2, 0, 2}, {2, 1, 2}}));
    CHECK(count_homs(a, res.b) == 2);
    CHECK(res.b.total_tuples() == d.total_tuples());
  }

  SECTION("a tuple running against the order is rejected") {
    Structure a;
    a.universe = {"x", "y", "z"};
    a.add_symbol("R", 2);
    a.add_symbol("S", 2);
    a.add_tuple("R", {0, 1});
    a.add_tuple("S", {1, 2});

    Structure d;
    d.universe = {"u", "v", "w"};
    d.add_symbol("R_le", 2);
    d.add_symbol("S_le", 2);
    d.add_tuple("R_le", {0, 1});
    d.add_tuple("S_le", {1, 2});
    d.add_tuple("S_le", {2, 1});  // w before v: against x < y < z
    CHECK_THROWS_AS(order_pair(a, {0, 1, 2}, d), NotOrderRespecting);
  }

  SECTION("a coordinate outside every dom is rejected") {
    Structure a;
    a.universe = {"x", "y", "z"};
    a.add_symbol("R", 2);
    a.add_symbol("S", 2);
    a.add_tuple("R", {0, 1});
    a.add_tuple("S", {1, 2});

    Structure d;
    d.universe = {"u", "v", "w", "q"};
    d.add_symbol("R_le", 2);
    d.add_symbol("S_le", 2);
    d.add_tuple("R_le", {0, 1});
    d.add_tuple("S_le", {1, 2});
    d.add_tuple("S_le", {3, 2});  // q is never an image
    CHECK_THROWS_AS(order_pair(a, {0, 1, 2}, d), NotOrderRespecting);
  }

  SECTION("random valid pairs preserve the hom set and the size") {
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
      Structure a;
      a.universe = {"x", "y", "z"};
      a.add_symbol("R", 2);
      a.add_symbol("S", 4);
      int p = static_cast<int>(rng.below(3)), q = static_cast<int>(rng.below(3));
      a.add_tuple("R", {p, q});
      std::vector<int> t = {0, 1, 2};
      for (int i = 2; i > 0; --i) std::swap(t[i], t[static_cast<int>(rng.below(i + 1))]);
      t.push_back(static_cast<int>(rng.below(3)));  // one repeat, all vars covered
      a.add_tuple("S", t);

      std::vector<int> order = {0, 1, 2};
      for (int i = 2; i > 0; --i) std::swap(order[i], order[static_cast<int>(rng.below(i + 1))]);
      Structure a_le = order_query(a, order);

      // value blocks laid out in order-rank order so products respect <=
      std::vector<int> rank(3);
      for (int i = 0; i < 3; ++i) rank[order[i]] = i;
      std::vector<std::vector<int>> dom(3);
      Structure d;
      for (int i = 0; i < 3; ++i) {
        int v = order[i];
        int width = 1 + static_cast<int>(rng.below(2));
        for (int j = 0; j < width; ++j) {
          dom[v].push_back(static_cast<int>(d.universe.size()));
          d.universe.push_back("e" + std::to_string(d.universe.size()));
        }
      }
      for (size_t r = 0; r < a_le.sig.symbols.size(); ++r) {
        const auto& sym = a_le.sig.symbols[r];
        d.add_symbol(sym.name, sym.arity);
        const std::vector<int>& scope = a_le.relations[r][0];
        std::vector<int> idx(scope.size(), 0), tup(scope.size());
        bool some = false;
        for (bool done = false; !done;) {
          for (size_t i = 0; i < scope.size(); ++i) tup[i] = dom[scope[i]][idx[i]];
          if (rng.coin() || (!some && idx == std::vector<int>(scope.size(), 0))) {
            d.add_tuple(sym.name, tup);
            some = true;
          }
          int i = static_cast<int>(scope.size()) - 1;
          while (i >= 0 && ++idx[i] == static_cast<int>(dom[scope[i]].size())) idx[i--] = 0;
          done = i < 0;
        }
      }

      // random subsets can leave tuples no hom realizes; prune them first so
      // every surviving coordinate is dommed (this keeps the hom set intact)
      Structure d_red = reduce_structure(a_le, d);
      OrderResult res = order_pair(a, order, d_red);
      CHECK(count_homs(a, res.b) == count_homs(a_le, d_red));
      CHECK(res.b.total_tuples() == d_red.total_tuples());
    }
  }
}

TEST_CASE("is_n_scattered finds exactly the large grids") {
  auto block = [](int from, int len) {
    std::vector<int> v;
    for (int i = 0; i < len; ++i) v.push_back(from + i);
    return v;
  };
  auto full_product = [](const std::vector<int>& du, const std::vector<int>& dv) {
    std::vector<std::vector<int>> t;
    for (int u : du)
      for (int v : dv) t.push_back({u, v});
    return t;
  };

  SECTION("a single tuple is always scattered") {
    CHECK(is_n_scattered({{0, 3}}, {block(0, 2), block(3, 2)}, 16));
  }

  SECTION("a full product over large doms is not") {
    // threshold floor(3 log2 4) = 6; the whole 8x8 product is a grid
    CHECK_FALSE(is_n_scattered(full_product(block(0, 8), block(8, 8)),
                               {block(0, 8), block(8, 8)}, 4));
  }

  SECTION("the same relation passes once N is large enough") {
    CHECK(is_n_scattered(full_product(block(0, 8), block(8, 8)), {block(0, 8), block(8, 8)},
                         1024));
  }

  SECTION("the side threshold is sharp") {
    CHECK_FALSE(is_n_scattered(full_product(block(0, 7), block(7, 7)),
                               {block(0, 7), block(7, 7)}, 4));
    CHECK(is_n_scattered(full_product(block(0, 6), block(6, 6)), {block(0, 6), block(6, 6)}, 4));
  }

  SECTION("arity three, random sparse relation at N=64") {
    Rng rng(15);
    std::vector<std::vector<int>> tuples;
    for (int i = 0; i < 4; ++i)
      for (int j = 4; j < 8; ++j)
        for (int k = 8; k < 12; ++k)
          if (rng.coin()) tuples.push_back({i, j, k});
    CHECK(is_n_scattered(tuples, {block(0, 4), block(4, 4), block(8, 4)}, 64));
  }

  SECTION("guards") {
    CHECK_THROWS_AS(is_n_scattered({{0}}, {block(0, 1)}, 1), BadScope);
    CHECK_THROWS_AS(is_n_scattered({{0, 1, 2, 3, 4}},
                                   {{0}, {1}, {2}, {3}, {4}}, 16),
                    TooLarge);
    CHECK_THROWS_AS(is_n_scattered({{0, 0}}, {block(0, 2), block(0, 2)}, 16), BadScope);
    CHECK_THROWS_AS(is_n_scattered({{0, 9}}, {block(0, 2), block(2, 2)}, 16), BadScope);
    CHECK_THROWS_AS(is_n_scattered(full_product(block(0, 8), block(8, 8)),
                                   {block(0, 8), block(8, 8)}, 4, 1),
                    BudgetExceeded);
  }
}

TEST_CASE("gen_flow_structure samples a single edge to the forced sizes") {
  Structure a;
  a.universe = {"u", "v"};
  a.add_symbol("R", 2);
  a.add_tuple("R", {0, 1});
  VertexWeights mu = make_mu({Rational(1, 2), Rational(1, 2)});

  SECTION("dom sizes, block layout, and the acceptance record") {
    FlowStructure fs = gen_flow_structure(a, mu, 16, 3);
    REQUIRE(fs.dom.size() == 2);
    CHECK(fs.dom[0] == std::vector<int>({0, 1, 2, 3}));
    CHECK(fs.dom[1] == std::vector<int>({4, 5, 6, 7}));
    CHECK(fs.b.universe[0] == "u.0");
    CHECK(fs.b.universe[7] == "v.3");
    CHECK(fs.b.total_tuples() <= 16);
    for (const auto& t : fs.b.relations[0]) {
      CHECK((t[0] >= 0 && t[0] < 4));
      CHECK((t[1] >= 4 && t[1] < 8));
    }
    CHECK(fs.t_exponent == Rational(1));
    CHECK(fs.hom_bar == Rational(1));  // 16 / (2^1 * 8)
    CHECK(fs.hom_count >= 1);
    CHECK(fs.hom_count == count_homs(a, fs.b));
    CHECK(fs.N == 16);
    CHECK(fs.summary().find("B(N=16)") == 0);
  }

  SECTION("identical seed gives a bit-identical structure") {
    FlowStructure x = gen_flow_structure(a, mu, 16, 12);
    FlowStructure y = gen_flow_structure(a, mu, 16, 12);
    CHECK(x.b == y.b);
    CHECK(x.attempts == y.attempts);
  }

  SECTION("guards") {
    CHECK_THROWS_AS(gen_flow_structure(a, make_mu({Rational(1), Rational(1)}), 16, 0),
                    WeightViolation);
    CHECK_THROWS_AS(gen_flow_structure(a, make_mu({Rational(1, 2)}), 16, 0), BadScope);
    CHECK_THROWS_AS(gen_flow_structure(a, mu, 1, 0), BadScope);
    CHECK_THROWS_AS(gen_flow_structure(a, mu, 16, 0, 0), RetriesExhausted);

    Structure two;
    two.universe = {"u", "v", "w", "x"};
    two.add_symbol("R", 2);
    two.add_symbol("S", 2);
    two.add_tuple("R", {0, 1});
    two.add_tuple("S", {2, 3});
    CHECK_THROWS_AS(
        gen_flow_structure(two, make_mu({Rational(1, 2), Rational(1, 2), Rational(1, 2),
                                         Rational(1, 2)}),
                           16, 0),
        DisconnectedQuery);

    Structure unsorted;
    unsorted.universe = {"u", "v"};
    unsorted.add_symbol("R", 2);
    unsorted.add_tuple("R", {1, 0});
    CHECK_THROWS_AS(gen_flow_structure(unsorted, mu, 16, 0), BadScope);

    Structure multi = a;
    multi.add_tuple("R", {1, 0});
    CHECK_THROWS_AS(gen_flow_structure(multi, mu, 16, 0), BadScope);
  }
}

TEST_CASE("gen_flow_structure runs the triangle pipeline at N=64") {
  Structure a;
  a.universe = {"x", "y", "z"};
  a.add_symbol("R", 2);
  a.add_symbol("S", 2);
  a.add_symbol("T", 2);
  a.add_tuple("R", {0, 1});
  a.add_tuple("S", {0, 2});
  a.add_tuple("T", {1, 2});

  Hypergraph h = hypergraph_of(a);
  ConcurrentFlow cf = max_uniform_concurrent_flow(h, {{0}, {1}, {2}});
  REQUIRE(cf.epsilon == Rational(1, 3));
  VertexWeights mu = mu_of_flow(h, cf);
  for (const auto& w : mu.w) REQUIRE(w == Rational(1, 3));

  FlowStructure fs = gen_flow_structure(a, mu, 64, 11);

  SECTION("sizes and exponent") {
    for (int v = 0; v < 3; ++v) CHECK(fs.dom[v].size() == 4);  // ceil(64^(1/3)) = 4
    CHECK(fs.b.size_of_universe() == 12);
    CHECK(fs.t_exponent == Rational(1));
    CHECK(fs.hom_bar == Rational(1));  // 64 / (2^3 * 8)
    CHECK(fs.hom_count >= 1);
    CHECK(fs.b.total_tuples() <= 3 * 64);
  }

  SECTION("coordinate and order respecting by construction") {
    FunctionSet homs = enumerate_homs(a, fs.b);
    std::set<int> used;
    for (int v = 0; v < 3; ++v) {
      std::vector<int> dv = dom_of(homs, v);
      for (int y : dv) {
        CHECK(std::binary_search(fs.dom[v].begin(), fs.dom[v].end(), y));
        CHECK(used.insert(y).second);
      }
    }
    for (const auto& rel : fs.b.relations)
      for (const auto& t : rel) CHECK(t[0] < t[1]);  // blocks follow universe order
  }

  SECTION("reduced after reduce_structure") {
    Structure red = reduce_structure(a, fs.b);
    CHECK(count_homs(a, red) == fs.hom_count);
    CHECK(reduce_structure(a, red) == red);
  }

  SECTION("every relation re-checks as N-scattered") {
    for (size_t r = 0; r < a.relations.size(); ++r) {
      std::vector<std::vector<int>> scope_doms;
      for (int v : a.relations[r][0]) scope_doms.push_back(fs.dom[v]);
      CHECK(is_n_scattered(fs.b.relations[r], scope_doms, 64));
    }
  }
}

TEST_CASE("kpartite_pair separates structure size from circuit size") {
  SECTION("k=2, n=3 has 18 homs and the circuit counts them") {
    KPartitePair kp = kpartite_pair(2, 3);
    CHECK(count_homs(kp.g, kp.h) == 18);
    REQUIRE(validate_circuit(kp.circuit).ok());
    EvalResult ev = eval_circuit(kp.circuit);
    CHECK(ev.sink.size() == 18);
    FunctionSet homs = enumerate_homs(kp.g, kp.h);
    FunctionSet got = ev.sink;
    got.normalize();
    CHECK(got == homs);
  }

  SECTION("k=1 yields n unconstrained homs") {
    KPartitePair kp = kpartite_pair(1, 5);
    CHECK(count_homs(kp.g, kp.h) == 5);
    CHECK(eval_circuit(kp.circuit).sink.size() == 5);
  }

  SECTION("k=3, n=2 matches k! n^k") {
    KPartitePair kp = kpartite_pair(3, 2);
    CHECK(count_homs(kp.g, kp.h) == 48);
    CHECK(eval_circuit(kp.circuit).sink.size() == 48);
    CHECK(check_deterministic(kp.circuit));
  }

  SECTION("circuit size is linear in n for fixed k") {
    // shared part unions make the n-dependent term exactly k^2 (2n-1)
    auto size_at = [](int n) { return kpartite_pair(3, n).circuit.size(); };
    int s4 = size_at(4), s8 = size_at(8), s16 = size_at(16);
    CHECK(s4 == 9 * 7 + 6 * 2 + 5);  // k^2 (2n-1) + k!(k-1) + k!-1
    CHECK(s8 - s4 == 18 * 4);
    CHECK(s16 - s8 == 18 * 8);
  }

  SECTION("guards") {
    CHECK_THROWS_AS(kpartite_pair(6, 2), TooLarge);
    CHECK_THROWS_AS(kpartite_pair(0, 2), BadScope);
    CHECK_THROWS_AS(kpartite_pair(2, 0), BadScope);
  }
}

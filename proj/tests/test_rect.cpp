#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "homfactor/circuit_build.hpp"
#include "homfactor/circuit_eval.hpp"
#include "homfactor/cover.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/rectangle.hpp"
#include "homfactor/rng.hpp"
#include "homfactor/separator.hpp"

using namespace homfactor;

namespace {

// The worked circuit for the triangle query against the seven-vertex target
// with vertices a1 a2 b1 b2 c d1 d2, coded 0..6. Variables x y z are 0 1 2.
// Shape: ((y-union x x-union) x z->c) u ((z-union x x-union) x y->c), which
// computes the 8 homomorphisms {x in a} x ({y in b, z=c} u {y=c, z in d}).
struct Fig1 {
  Circuit c;
  int xy_times = -1;  // the times gate joining the y-union with the x-union
  int x_union = -1;
};

Fig1 fig1_circuit() {
  CircuitBuilder b({"x", "y", "z"});
  int yb = b.unite(b.input(1, 2), b.input(1, 3));
  int xa = b.unite(b.input(0, 0), b.input(0, 1));
  int zd = b.unite(b.input(2, 5), b.input(2, 6));
  int e1 = b.times(yb, xa);
  int e2 = b.times(zd, xa);
  int left = b.times(b.input(2, 4), e1);
  int right = b.times(b.input(1, 4), e2);
  Fig1 f;
  f.xy_times = e1;
  f.x_union = xa;
  f.c = b.finish(b.unite(left, right));
  return f;
}

// R1 = {00, 11} and R2 = all four maps, both over {y, z} coded as vars 0, 1.
FunctionSet r1_set() {
  FunctionSet f = FunctionSet::empty_set({0, 1});
  f.push_row({0, 0});
  f.push_row({1, 1});
  f.normalize();
  return f;
}

FunctionSet r2_set() {
  FunctionSet f = FunctionSet::empty_set({0, 1});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) f.push_row({a, b});
  f.normalize();
  return f;
}

bool subset_of(const FunctionSet& a, const FunctionSet& b) {
  if (a.vars != b.vars) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!b.contains(a.row(i))) return false;
  return true;
}

Circuit random_circuit(Rng& rng, int nvars, int nvals, int steps) {
  std::vector<std::string> names;
  for (int v = 0; v < nvars; ++v) names.push_back("v" + std::to_string(v));
  CircuitBuilder b(names);
  std::vector<std::pair<int, std::uint64_t>> pool;
  for (int v = 0; v < nvars; ++v)
    for (int d = 0; d < nvals; ++d) pool.push_back({b.input(v, d), 1ULL << v});
  for (int s = 0; s < steps; ++s) {
    size_t i = rng.below(pool.size());
    size_t j = rng.below(pool.size());
    auto [gi, mi] = pool[i];
    auto [gj, mj] = pool[j];
    if (rng.coin()) {
      if (mi == mj && gi != gj) pool.push_back({b.unite(gi, gj), mi});
    } else {
      if ((mi & mj) == 0) pool.push_back({b.times(gi, gj), mi | mj});
    }
  }
  auto [g, m] = pool[rng.below(pool.size())];
  for (int v = 0; v < nvars; ++v) {
    if (m >> v & 1) continue;
    std::vector<int> ins;
    for (int d = 0; d < nvals; ++d) ins.push_back(b.input(v, d));
    g = b.times(g, b.union_chain(ins));
    m |= 1ULL << v;
  }
  return b.finish(g);
}

// Every block assignment of 0..n-1 whose X block is the set bits of mask.
Partition partition_of_mask(int n, std::uint64_t mask) {
  Partition p;
  for (int v = 0; v < n; ++v) (mask >> v & 1 ? p.x : p.y).push_back(v);
  return p;
}

}  // namespace

TEST_CASE("restriction behaves as in the rectangle examples") {
  FunctionSet r1 = r1_set();
  FunctionSet to_y = restrict_set(r1, {0});
  REQUIRE(to_y.size() == 2);  // y maps to 0 and to 1
  REQUIRE(to_y.vars == std::vector<int>{0});
  REQUIRE(restrict_set(r1, {0, 1}) == r1);
  FunctionSet to_none = restrict_set(r1, {});
  REQUIRE(to_none.size() == 1);
  REQUIRE(to_none.arity() == 0);
}

TEST_CASE("is_rectangle decides the product property exactly") {
  Partition yz{{0}, {1}};
  SECTION("the two worked examples") {
    REQUIRE_FALSE(is_rectangle(r1_set(), yz));  // misses the 0/1 recombination
    REQUIRE(is_rectangle(r2_set(), yz));
  }
  SECTION("one-sided splits are always rectangles") {
    REQUIRE(is_rectangle(r1_set(), Partition{{0, 1}, {}}));
    REQUIRE(is_rectangle(r1_set(), Partition{{}, {0, 1}}));
  }
  SECTION("the empty set is a rectangle") {
    REQUIRE(is_rectangle(FunctionSet::empty_set({0, 1}), yz));
  }
  SECTION("splits must match the domain") {
    REQUIRE_THROWS_AS(is_rectangle(r1_set(), Partition{{0}, {}}), BadScope);
    REQUIRE_THROWS_AS(is_rectangle(r1_set(), Partition{{0, 1}, {1}}), BadScope);
    REQUIRE_THROWS_AS(is_rectangle(r1_set(), Partition{{0, 2}, {1}}), BadScope);
  }
}

TEST_CASE("projection bound is a tight-for-rectangles upper bound") {
  REQUIRE(projection_bound(r2_set()) == 4);  // 2 * 2, attained
  REQUIRE(projection_bound(r1_set()) == 4);  // slack: |R1| = 2
  FunctionSet single = FunctionSet::empty_set({0, 1, 2});
  single.push_row({3, 1, 4});
  single.normalize();
  REQUIRE(projection_bound(single) == 1);
  REQUIRE(projection_bound(FunctionSet::unit()) == 1);

  Rng rng(42);
  for (int trial = 0; trial < 1200; ++trial) {
    int nvars = 1 + static_cast<int>(rng.below(4));
    std::vector<int> vars;
    for (int v = 0; v < nvars; ++v) vars.push_back(v);
    FunctionSet f = FunctionSet::empty_set(vars);
    int nrows = static_cast<int>(rng.below(12));
    for (int r = 0; r < nrows; ++r) {
      std::vector<std::int32_t> row;
      for (int v = 0; v < nvars; ++v) row.push_back(static_cast<std::int32_t>(rng.below(4)));
      f.push_row(row);
    }
    f.normalize();
    REQUIRE(projection_bound(f) >= f.size());
  }
}

TEST_CASE("completion sets follow the sink-down recurrence") {
  Fig1 fig = fig1_circuit();
  REQUIRE(validate_circuit(fig.c).ok());
  std::vector<FunctionSet> comp = completion_sets(fig.c);

  SECTION("sink completes with the empty function") {
    REQUIRE(comp[fig.c.output] == FunctionSet::unit());
  }
  SECTION("the xy-product gate completes only through z -> c") {
    FunctionSet want = FunctionSet::empty_set({2});
    want.push_row({4});
    want.normalize();
    REQUIRE(comp[fig.xy_times] == want);
    REQUIRE(completion_set(fig.c, fig.xy_times) == want);
  }
  SECTION("every gate satisfies S(g) x comp(g) within S(C)") {
    EvalOptions opt;
    opt.keep.assign(fig.c.gates.size(), 1);
    EvalResult ev = eval_circuit(fig.c, opt);
    REQUIRE(ev.sink.size() == 8);
    for (int g = 0; g < fig.c.size(); ++g) {
      FunctionSet realized = set_product(ev.kept[g], comp[g]);
      REQUIRE(subset_of(realized, ev.sink));
    }
  }
  SECTION("a gate the sink cannot reach completes to nothing") {
    Circuit c;
    c.var_names = {"x"};
    c.gates.push_back(Gate::input(0, 0));
    c.gates.push_back(Gate::input(0, 1));
    c.output = 0;
    std::vector<FunctionSet> orphan = completion_sets(c);
    REQUIRE(orphan[0] == FunctionSet::unit());
    REQUIRE(orphan[1].empty());
  }
  SECTION("cell budget is enforced") {
    REQUIRE_THROWS_AS(completion_sets(fig.c, 1), BudgetExceeded);
  }
  SECTION("gate id range is checked") {
    REQUIRE_THROWS_AS(completion_set(fig.c, 99), BadScope);
  }
}

TEST_CASE("balanced gate descent stops at the first gate inside the window") {
  Fig1 fig = fig1_circuit();

  SECTION("uniform weights land on the xy-product gate") {
    // Trace: sink (weight 3) -> its first child (times, weight 3) -> the
    // heavier child, the xy-product at weight 2 = 2f(A)/3, which is inside
    // the window. Gates with |var| = 1 also satisfy the bound, but the
    // descent never reaches them.
    WeightFunction f = WeightFunction::uniform(3);
    int g = find_f_balanced_gate(fig.c, f);
    REQUIRE(g == fig.xy_times);
    std::vector<std::uint64_t> mask = var_masks(fig.c);
    REQUIRE(mask[g] == 0b011u);  // vars {x, y}
  }
  SECTION("a single variable forces the precondition to fail") {
    CircuitBuilder b({"x"});
    Circuit c = b.finish(b.input(0, 0));
    REQUIRE_THROWS_AS(find_f_balanced_gate(c, WeightFunction::uniform(1)), WeightViolation);
  }
  SECTION("negative weights are rejected") {
    WeightFunction f = WeightFunction::uniform(3);
    f.w[1] = -1;
    REQUIRE_THROWS_AS(find_f_balanced_gate(fig.c, f), WeightViolation);
  }
  SECTION("zero total weight stops at the sink") {
    WeightFunction f{std::vector<Rational>(3, Rational(0))};
    REQUIRE(find_f_balanced_gate(fig.c, f) == fig.c.output);
  }
  SECTION("indicator weights balance the gate against the chosen set") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
      int nvars = 3 + static_cast<int>(rng.below(3));
      Circuit c = random_circuit(rng, nvars, 2, 30);
      std::vector<int> w;
      for (int v = 0; v < nvars; ++v)
        if (rng.coin()) w.push_back(v);
      if (w.size() < 2) w = {0, 1};
      WeightFunction f = WeightFunction::indicator(nvars, w);
      int g = find_f_balanced_gate(c, f);
      std::vector<std::uint64_t> mask = var_masks(c);
      int inside = 0;
      for (int v : w)
        if (mask[g] >> v & 1) ++inside;
      int total = static_cast<int>(w.size());
      REQUIRE(3 * inside >= total);
      REQUIRE(3 * inside <= 2 * total);
    }
  }
}

TEST_CASE("extract_cover builds an f-balanced rectangle cover") {
  Fig1 fig = fig1_circuit();
  WeightFunction f = WeightFunction::uniform(3);

  SECTION("the worked circuit covers all eight homomorphisms") {
    RectangleCover cover = extract_cover(fig.c, f);
    REQUIRE(cover.target.size() == 8);
    REQUIRE(cover.rects.size() <= static_cast<std::size_t>(fig.c.size()));
    REQUIRE_FALSE(cover.rects.empty());

    FunctionSet covered = FunctionSet::empty_set(cover.target.vars);
    Rational total = f.total();
    for (const Rectangle& r : cover.rects) {
      REQUIRE(r.gate >= 0);
      REQUIRE(r.gate < fig.c.size());
      FunctionSet realized = r.realized();
      REQUIRE(is_rectangle(realized, r.part));
      Rational fx = f.of(r.part.x), fy = f.of(r.part.y);
      REQUIRE(3 * std::min(fx, fy) >= total);
      REQUIRE(subset_of(realized, cover.target));
      set_union_into(covered, realized);
    }
    REQUIRE(covered == cover.target);
  }
  SECTION("the flattened circuit covers its defining set") {
    FunctionSet want = FunctionSet::empty_set({0, 1, 2});
    want.push_row({0, 1, 2});
    want.push_row({0, 2, 1});
    want.push_row({1, 0, 2});
    want.push_row({2, 2, 2});
    want.normalize();
    Circuit c = std::get<Circuit>(trivial_circuit(want, {"x", "y", "z"}));
    RectangleCover cover = extract_cover(c, f);
    FunctionSet covered = FunctionSet::empty_set({0, 1, 2});
    for (const Rectangle& r : cover.rects) set_union_into(covered, r.realized());
    REQUIRE(covered == want);
  }
  SECTION("empty results yield empty covers") {
    RectangleCover cover = extract_cover(CircuitOrEmpty(EmptyResult{}), f);
    REQUIRE(cover.rects.empty());
    REQUIRE(cover.target.empty());
  }
  SECTION("invalid circuits are rejected") {
    Circuit broken;
    broken.var_names = {"x"};
    broken.gates.push_back(Gate::input(0, 0));
    broken.gates.push_back(Gate::input(0, 1));
    broken.output = 0;
    REQUIRE_THROWS_AS(extract_cover(broken, WeightFunction::uniform(1)), BadScope);
  }
  SECTION("overweight vertices are rejected") {
    WeightFunction heavy{{Rational(10), Rational(1), Rational(1)}};
    REQUIRE_THROWS_AS(extract_cover(fig.c, heavy), WeightViolation);
  }
}

TEST_CASE("random circuits obey the cover invariants") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    int nvars = 2 + static_cast<int>(rng.below(4));
    Circuit c = random_circuit(rng, nvars, 2, 25);
    WeightFunction f = WeightFunction::uniform(nvars);
    RectangleCover cover = extract_cover(c, f);

    REQUIRE(cover.rects.size() <= static_cast<std::size_t>(c.size()));
    FunctionSet covered = FunctionSet::empty_set(cover.target.vars);
    Rational total = f.total();
    for (const Rectangle& r : cover.rects) {
      FunctionSet realized = r.realized();
      REQUIRE(is_rectangle(realized, r.part));
      REQUIRE(3 * std::min(f.of(r.part.x), f.of(r.part.y)) >= total);
      REQUIRE(subset_of(realized, cover.target));
      set_union_into(covered, realized);
    }
    REQUIRE(covered == cover.target);
  }
}

TEST_CASE("greedy matching crosses the partition deterministically") {
  SECTION("a 2/2 split of the complete graph matches twice") {
    Hypergraph k4 = complete_graph(4);
    Partition p{{0, 1}, {2, 3}};
    auto m = greedy_matching(k4, p);
    REQUIRE(m.size() == 2);
    // Stored edge order fixes the result: (0,2) first, then (1,3).
    REQUIRE(m[0] == std::pair<int, int>(0, 2));
    REQUIRE(m[1] == std::pair<int, int>(1, 3));
  }
  SECTION("no crossing edges, no matching") {
    Hypergraph g = Hypergraph::from_edges(4, {{0, 1}, {2, 3}});
    REQUIRE(greedy_matching(g, Partition{{0, 1}, {2, 3}}).empty());
  }
  SECTION("blocks must partition the vertices") {
    Hypergraph g = complete_graph(3);
    REQUIRE_THROWS_AS(greedy_matching(g, Partition{{0, 1}, {}}), BadScope);
    REQUIRE_THROWS_AS(greedy_matching(g, Partition{{0, 1}, {1, 2}}), BadScope);
  }
  SECTION("greedy results are maximal crossing matchings") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      int n = 4 + static_cast<int>(rng.below(5));
      std::vector<std::vector<int>> edges;
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (rng.coin()) edges.push_back({u, v});
      Hypergraph g = Hypergraph::from_edges(n, edges);
      Partition p = partition_of_mask(n, rng.below(1ULL << n));
      std::vector<char> side(n, 0);
      for (int v : p.y) side[v] = 1;
      auto m = greedy_matching(g, p);
      std::vector<char> used(n, 0);
      std::set<std::pair<int, int>> eset;
      for (const auto& e : g.edges) eset.insert({e[0], e[1]});
      for (auto [u, v] : m) {
        REQUIRE(side[u] == 0);
        REQUIRE(side[v] == 1);
        REQUIRE(eset.count({std::min(u, v), std::max(u, v)}) == 1);
        REQUIRE_FALSE(used[u]);
        REQUIRE_FALSE(used[v]);
        used[u] = used[v] = 1;
      }
      for (const auto& e : g.edges) {
        if (used[e[0]] || used[e[1]]) continue;
        // maximality: no crossing edge on two fresh endpoints survives
        REQUIRE(side[e[0]] == side[e[1]]);
      }
    }
  }
}

TEST_CASE("every balanced split of a highly connected set admits the matching") {
  SECTION("complete graph on 7 vertices, k = 3") {
    Hypergraph g = complete_graph(7);
    std::vector<int> w = {0, 1, 2, 3, 4, 5, 6};
    REQUIRE_FALSE(has_balanced_separator(g, w, 3).balanced_separator_exists());
    int checked = 0;
    for (std::uint64_t m = 0; m < (1ULL << 7); ++m) {
      Partition p = partition_of_mask(7, m);
      int wx = static_cast<int>(p.x.size());  // W is everything here
      int wy = static_cast<int>(p.y.size());
      if (3 * std::min(wx, wy) < 7) continue;
      ++checked;
      REQUIRE(greedy_matching(g, p).size() >= 1);  // floor(3/3)
    }
    REQUIRE(checked == 70);  // C(7,3) + C(7,4) balanced splits
  }
  SECTION("highly connected set found in a larger complete graph") {
    Hypergraph g = complete_graph(11);
    HcsResult hcs = find_hcs(g, 3);
    REQUIRE(hcs.W.has_value());
    std::vector<char> in_w(11, 0);
    for (int v : *hcs.W) in_w[v] = 1;
    for (std::uint64_t m = 0; m < (1ULL << 11); ++m) {
      Partition p = partition_of_mask(11, m);
      int wx = 0, wy = 0;
      for (int v : p.x) wx += in_w[v];
      for (int v : p.y) wy += in_w[v];
      if (3 * std::min(wx, wy) < 7) continue;
      REQUIRE(greedy_matching(g, p).size() >= 1);
    }
  }
  SECTION("grid pipeline at k = 1 runs end to end") {
    Hypergraph g = grid_graph(3, 3);
    HcsResult hcs = find_hcs(g, 1);
    REQUIRE(hcs.W.has_value());
    std::vector<char> in_w(9, 0);
    for (int v : *hcs.W) in_w[v] = 1;
    for (std::uint64_t m = 0; m < (1ULL << 9); ++m) {
      Partition p = partition_of_mask(9, m);
      int wx = 0, wy = 0;
      for (int v : p.x) wx += in_w[v];
      for (int v : p.y) wy += in_w[v];
      if (3 * std::min(wx, wy) < 3) continue;
      auto match = greedy_matching(g, p);  // bound floor(1/3) = 0 is vacuous
      for (auto [u, v] : match) REQUIRE(u != v);
    }
  }
}

TEST_CASE("rectangle bound check reports the certificate") {
  Fig1 fig = fig1_circuit();
  Hypergraph pattern = complete_graph(3);
  std::vector<int> w = {0, 1, 2};

  SECTION("the worked cover stays under the k = 1 bound") {
    RectangleCover cover = extract_cover(fig.c, WeightFunction::uniform(3));
    RectBoundReport rep = rectangle_bound_check(cover, pattern, w, 1, 7);
    REQUIRE(rep.all_within);  // bound is n^t = 343 with floor(k/3) = 0
    REQUIRE(rep.hom_count == 8);
    // The x-union gate realizes the whole set: {x in a} x the 4 completions.
    REQUIRE(rep.max_balanced_size == 8);
    REQUIRE(rep.certificate == 1);
  }
  SECTION("whole-set rectangles over a one-sided split are excluded") {
    WeightFunction zero{std::vector<Rational>(3, Rational(0))};
    RectangleCover cover = extract_cover(fig.c, zero);  // every gate balances
    RectBoundReport rep = rectangle_bound_check(cover, pattern, w, 1, 7);
    bool saw_sink = false;
    for (const auto& e : rep.entries)
      if (e.gate == fig.c.output) {
        saw_sink = true;
        REQUIRE_FALSE(e.w_balanced);  // its split leaves one side empty
      }
    REQUIRE(saw_sink);
  }
  SECTION("singleton rectangles from the flattened circuit pass vacuously") {
    FunctionSet want = FunctionSet::empty_set({0, 1, 2});
    want.push_row({0, 0, 0});
    want.push_row({1, 2, 0});
    want.normalize();
    Circuit c = std::get<Circuit>(trivial_circuit(want, {"x", "y", "z"}));
    RectangleCover cover = extract_cover(c, WeightFunction::uniform(3));
    RectBoundReport rep = rectangle_bound_check(cover, pattern, w, 1, 7);
    REQUIRE(rep.all_within);
    for (const auto& e : rep.entries)
      if (e.w_balanced) REQUIRE(e.size <= 2);
  }
  SECTION("foreign vertices in W are rejected") {
    RectangleCover cover = extract_cover(fig.c, WeightFunction::uniform(3));
    REQUIRE_THROWS_AS(rectangle_bound_check(cover, pattern, {0, 9}, 1, 7), BadScope);
  }
}

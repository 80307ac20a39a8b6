#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "homfactor/circuit.hpp"
#include "homfactor/errors.hpp"
#include "homfactor/function_set.hpp"

namespace homfactor {

// Gate factory with hash-consing: structurally identical gates get one id,
// so shared subcircuits (domain unions, repeated inputs) are built once.
// Children always precede parents, keeping ids topologically sorted.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::vector<std::string> var_names) {
    circuit_.var_names = std::move(var_names);
  }

  int input(int var, int value) {
    if (var < 0 || var >= circuit_.nvars()) throw BadScope("input gate: variable out of range");
    if (value < 0) throw BadScope("input gate: negative value");
    return intern(Gate::input(var, value));
  }

  int unite(int a, int b) {
    check_child(a);
    check_child(b);
    if (a == b) return a;  // S union S = S
    return intern(Gate::unite(std::min(a, b), std::max(a, b)));
  }

  int times(int a, int b) {
    check_child(a);
    check_child(b);
    return intern(Gate::times(std::min(a, b), std::max(a, b)));
  }

  // Left-deep chain over the ids in the given order, duplicates dropped.
  int union_chain(const std::vector<int>& ids) {
    std::vector<int> uniq;
    std::set<int> seen;
    for (int id : ids)
      if (seen.insert(id).second) uniq.push_back(id);
    if (uniq.empty()) throw BadScope("union_chain: no operands");
    int acc = uniq[0];
    for (size_t i = 1; i < uniq.size(); ++i) acc = unite(acc, uniq[i]);
    return acc;
  }

  // Balanced pairwise merge over the ids, duplicates dropped. Gate count
  // matches the chain form (one union per merge), but partial unions stay
  // logarithmic in depth, so walks that materialize every gate's set pay
  // m log m cells instead of m^2.
  int union_tree(const std::vector<int>& ids) {
    std::vector<int> level;
    std::set<int> seen;
    for (int id : ids)
      if (seen.insert(id).second) level.push_back(id);
    if (level.empty()) throw BadScope("union_tree: no operands");
    while (level.size() > 1) {
      std::vector<int> next;
      for (size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(unite(level[i], level[i + 1]));
      if (level.size() % 2) next.push_back(level.back());
      level = std::move(next);
    }
    return level[0];
  }

  int times_chain(const std::vector<int>& ids) {
    if (ids.empty()) throw BadScope("times_chain: no operands");
    int acc = ids[0];
    check_child(acc);
    for (size_t i = 1; i < ids.size(); ++i) acc = times(acc, ids[i]);
    return acc;
  }

  int size() const { return circuit_.size(); }
  const Gate& gate(int id) const { return circuit_.gates[id]; }

  // Extracts the circuit rooted at the chosen gate; workspace gates outside
  // its cone are dropped. Relative order survives, so when every gate is live
  // the ids come out unchanged.
  Circuit finish(int output) {
    check_child(output);
    std::vector<char> live(circuit_.gates.size(), 0);
    std::vector<int> stack{output};
    live[output] = 1;
    while (!stack.empty()) {
      const Gate& g = circuit_.gates[stack.back()];
      stack.pop_back();
      if (g.kind == Gate::Kind::Input) continue;
      for (int ch : {g.a, g.b})
        if (!live[ch]) {
          live[ch] = 1;
          stack.push_back(ch);
        }
    }
    Circuit out;
    out.var_names = circuit_.var_names;
    std::vector<int> new_id(circuit_.gates.size(), -1);
    for (int id = 0; id < circuit_.size(); ++id) {
      if (!live[id]) continue;
      Gate g = circuit_.gates[id];
      if (g.kind != Gate::Kind::Input) {
        g.a = new_id[g.a];
        g.b = new_id[g.b];
      }
      new_id[id] = out.size();
      out.gates.push_back(g);
    }
    out.output = new_id[output];
    return out;
  }

 private:
  void check_child(int id) const {
    if (id < 0 || id >= circuit_.size()) throw BadScope("builder: unknown gate id");
  }

  int intern(const Gate& g) {
    auto key = std::make_tuple(g.kind, g.a, g.b);
    auto it = cons_.find(key);
    if (it != cons_.end()) return it->second;
    circuit_.gates.push_back(g);
    int id = circuit_.size() - 1;
    cons_.emplace(key, id);
    return id;
  }

  Circuit circuit_;
  std::map<std::tuple<Gate::Kind, int, int>, int> cons_;
};

// List-every-function circuit: one left-deep product per function (inputs in
// variable order), one union chain over the functions. Deterministic because
// distinct rows yield distinct singleton branches.
inline CircuitOrEmpty trivial_circuit(const FunctionSet& f, const std::vector<std::string>& var_names) {
  if (f.empty()) return EmptyResult{};
  if (f.arity() == 0) throw BadScope("trivial_circuit: empty variable set has no circuit form");
  if (f.vars.size() != var_names.size())
    throw BadScope("trivial_circuit: variable name count mismatch");
  CircuitBuilder b(var_names);
  std::vector<int> branches;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::int32_t* row = f.row(i);
    std::vector<int> factors;
    for (std::size_t k = 0; k < f.arity(); ++k) factors.push_back(b.input(static_cast<int>(k), row[k]));
    branches.push_back(b.times_chain(factors));
  }
  return b.finish(b.union_chain(branches));
}

// Fan-in-2 normalization by left-deep chaining; single-child gates collapse
// into their child. Internal gate count never exceeds the wide circuit's
// wire count, total size never exceeds inputs plus wires.
inline Circuit to_fanin2(const WideCircuit& wc) {
  if (wc.gates.empty()) throw BadScope("to_fanin2: no gates");
  if (wc.output < 0 || wc.output >= static_cast<int>(wc.gates.size()))
    throw BadScope("to_fanin2: output out of range");
  CircuitBuilder b(wc.var_names);
  long long wires = 0, inputs = 0;
  std::vector<int> mapped(wc.gates.size(), -1);
  for (size_t i = 0; i < wc.gates.size(); ++i) {
    const WideGate& g = wc.gates[i];
    if (g.kind == Gate::Kind::Input) {
      mapped[i] = b.input(g.var, g.value);
      ++inputs;
      continue;
    }
    if (g.children.empty()) throw BadScope("to_fanin2: internal gate without children");
    std::vector<int> kids;
    for (int ch : g.children) {
      if (ch < 0 || static_cast<size_t>(ch) >= i || mapped[ch] < 0)
        throw BadScope("to_fanin2: child defined after parent");
      kids.push_back(mapped[ch]);
      ++wires;
    }
    mapped[i] = g.kind == Gate::Kind::Union ? b.union_chain(kids) : b.times_chain(kids);
  }
  Circuit out = b.finish(mapped[wc.output]);
  long long internal = 0;
  for (const Gate& g : out.gates)
    if (g.kind != Gate::Kind::Input) ++internal;
  if (internal > wires || out.size() > inputs + wires)
    throw Error("internal: fan-in-2 chaining exceeded the size bound");
  return out;
}

// Pad a decomposable but non-smooth circuit into a valid one: wherever a
// union child (or the output) misses variables, multiply in one shared
// domain-union gadget per missing variable. domains[v] lists the values of
// variable v; a missing or empty list for a needed variable is an error.
inline Circuit smooth(const Circuit& c, const std::vector<std::vector<int>>& domains) {
  if (c.gates.empty()) throw BadScope("smooth: no gates");
  if (c.nvars() > 64) throw TooLarge("smooth: more than 64 variables");
  std::vector<std::uint64_t> mask = var_masks(c);  // throws on cycles
  CircuitBuilder b(c.var_names);

  std::vector<int> domain_gadget(c.nvars(), -1);
  auto gadget = [&](int v) {
    if (domain_gadget[v] >= 0) return domain_gadget[v];
    if (v >= static_cast<int>(domains.size()) || domains[v].empty())
      throw MissingDomain("smooth: no domain for variable " + c.var_names[v]);
    std::vector<int> ins;
    for (int val : domains[v]) ins.push_back(b.input(v, val));
    return domain_gadget[v] = b.union_chain(ins);
  };
  auto pad = [&](int id, std::uint64_t missing) {
    for (int v = 0; v < c.nvars(); ++v)
      if (missing >> v & 1) id = b.times(id, gadget(v));
    return id;
  };

  std::vector<int> mapped(c.size(), -1);
  for (int g : detail::topo_order(c)) {
    const Gate& gate = c.gates[g];
    if (gate.kind == Gate::Kind::Input) {
      mapped[g] = b.input(gate.a, gate.b);
    } else if (gate.kind == Gate::Kind::Times) {
      if (mask[gate.a] & mask[gate.b])
        throw BadScope("smooth: times gate " + std::to_string(g) + " is not decomposable");
      mapped[g] = b.times(mapped[gate.a], mapped[gate.b]);
    } else {
      std::uint64_t target = mask[gate.a] | mask[gate.b];
      int left = pad(mapped[gate.a], target & ~mask[gate.a]);
      int right = pad(mapped[gate.b], target & ~mask[gate.b]);
      mapped[g] = b.unite(left, right);
    }
  }
  std::uint64_t full = c.nvars() == 64 ? ~0ULL : (1ULL << c.nvars()) - 1;
  return b.finish(pad(mapped[c.output], full & ~mask[c.output]));
}

}  // namespace homfactor

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "homfactor/errors.hpp"
#include "homfactor/validation.hpp"

namespace homfactor {

// Fan-in-2 {union, times}-circuit over variables X (named, indexed 0..n-1)
// with nonnegative integer values. Input gates store (var, value) in (a, b);
// internal gates store child ids. The output gate is the unique sink.
struct Gate {
  enum class Kind { Input, Union, Times };
  Kind kind = Kind::Input;
  int a = -1;
  int b = -1;

  static Gate input(int var, int value) { return {Kind::Input, var, value}; }
  static Gate unite(int x, int y) { return {Kind::Union, x, y}; }
  static Gate times(int x, int y) { return {Kind::Times, x, y}; }

  bool operator==(const Gate&) const = default;
};

struct Circuit {
  std::vector<std::string> var_names;
  std::vector<Gate> gates;
  int output = -1;

  int nvars() const { return static_cast<int>(var_names.size()); }
  int size() const { return static_cast<int>(gates.size()); }

  bool operator==(const Circuit&) const = default;
};

// No circuit computes the empty set over a nonempty variable set (unions and
// products of inputs are always inhabited), so operations that can produce
// Hom = {} return this sentinel instead.
struct EmptyResult {
  bool operator==(const EmptyResult&) const = default;
};

using CircuitOrEmpty = std::variant<Circuit, EmptyResult>;

// Gates with arbitrary fan-in, the input format of to_fanin2 and what the
// parser produces before strictness is applied.
struct WideGate {
  Gate::Kind kind = Gate::Kind::Input;
  int var = -1;
  int value = -1;
  std::vector<int> children;
};

struct WideCircuit {
  std::vector<std::string> var_names;
  std::vector<WideGate> gates;
  int output = -1;
};

namespace detail {

// Children of every gate in the fan-in cone of the output, post-order
// (children before parents). Throws on cycles; validate_circuit reports them
// instead via the non-throwing variant below.
inline bool topo_order_into(const Circuit& c, std::vector<int>& order) {
  order.clear();
  std::vector<std::int8_t> state(c.gates.size(), 0);  // 0 new, 1 open, 2 done
  std::vector<std::pair<int, int>> stack;              // (gate, next child slot)
  if (c.output < 0 || c.output >= c.size()) return false;
  stack.push_back({c.output, 0});
  state[c.output] = 1;
  while (!stack.empty()) {
    auto& [g, slot] = stack.back();
    const Gate& gate = c.gates[g];
    int child = -1;
    if (gate.kind != Gate::Kind::Input && slot < 2) child = slot == 0 ? gate.a : gate.b;
    if (child == -1) {
      state[g] = 2;
      order.push_back(g);
      stack.pop_back();
      continue;
    }
    ++slot;
    if (child < 0 || child >= c.size()) return false;
    if (state[child] == 1) return false;  // cycle
    if (state[child] == 0) {
      state[child] = 1;
      stack.push_back({child, 0});
    }
  }
  return true;
}

inline bool ids_topological(const Circuit& c) {
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    if (g.kind != Gate::Kind::Input &&
        (g.a >= static_cast<int>(i) || g.b >= static_cast<int>(i) || g.a < 0 || g.b < 0))
      return false;
  }
  return true;
}

// Processing order with children before parents. Stored ids are kept when
// they already satisfy that (builders and the parser guarantee it), which
// keeps rebuild passes and serialization id-stable.
inline std::vector<int> topo_order(const Circuit& c) {
  std::vector<int> order;
  if (ids_topological(c)) {
    order.resize(c.gates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    return order;
  }
  if (!topo_order_into(c, order))
    throw BadScope("circuit is cyclic or has out-of-range references");
  return order;
}

}  // namespace detail

// var(g) for every gate as bitmasks over the variable indices; caps the
// variable count at 64. Requires an acyclic circuit (validate first).
inline std::vector<std::uint64_t> var_masks(const Circuit& c) {
  if (c.nvars() > 64) throw TooLarge("circuits support at most 64 variables");
  std::vector<std::uint64_t> mask(c.gates.size(), 0);
  for (int g : detail::topo_order(c)) {
    const Gate& gate = c.gates[g];
    if (gate.kind == Gate::Kind::Input)
      mask[g] = 1ULL << gate.a;
    else
      mask[g] = mask[gate.a] | mask[gate.b];
  }
  return mask;
}

// Full structural validation: ranges, acyclicity, unique sink equal to the
// recorded output, decomposability of every times gate, smoothness of every
// union gate, and var(output) = X.
inline ValidationReport validate_circuit(const Circuit& c) {
  ValidationReport rep;
  if (c.gates.empty()) {
    rep.violation("circuit has no gates");
    return rep;
  }
  if (c.nvars() > 64) {
    rep.violation("more than 64 variables");
    return rep;
  }
  for (size_t i = 0; i < c.var_names.size(); ++i) {
    const std::string& name = c.var_names[i];
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
      rep.violation("variable " + std::to_string(i) + " has an empty or whitespace name");
    for (size_t j = i + 1; j < c.var_names.size(); ++j)
      if (c.var_names[j] == name) rep.violation("duplicate variable name " + name);
  }
  if (c.output < 0 || c.output >= c.size()) {
    rep.violation("output gate out of range");
    return rep;
  }
  int n = c.size();
  std::vector<int> outdeg(n, 0);
  for (int i = 0; i < n; ++i) {
    const Gate& g = c.gates[i];
    if (g.kind == Gate::Kind::Input) {
      if (g.a < 0 || g.a >= c.nvars())
        rep.violation("gate " + std::to_string(i) + " references an unknown variable");
      if (g.b < 0) rep.violation("gate " + std::to_string(i) + " has a negative value");
    } else {
      if (g.a < 0 || g.a >= n || g.b < 0 || g.b >= n) {
        rep.violation("gate " + std::to_string(i) + " has a child out of range");
      } else {
        ++outdeg[g.a];
        ++outdeg[g.b];
      }
    }
  }
  if (!rep.ok()) return rep;

  std::vector<int> order;
  if (!detail::topo_order_into(c, order)) {
    rep.violation("gate graph contains a cycle");
    return rep;
  }
  if (static_cast<int>(order.size()) != n)
    rep.violation("gates unreachable from the output");
  int sinks = 0;
  for (int i = 0; i < n; ++i)
    if (outdeg[i] == 0) ++sinks;
  if (sinks != 1) rep.violation("expected exactly one sink, found " + std::to_string(sinks));
  if (outdeg[c.output] != 0) rep.violation("output gate has parents");
  if (!rep.ok()) return rep;

  std::vector<std::uint64_t> mask(n, 0);
  for (int g : order) {
    const Gate& gate = c.gates[g];
    if (gate.kind == Gate::Kind::Input) {
      mask[g] = 1ULL << gate.a;
    } else if (gate.kind == Gate::Kind::Times) {
      if (mask[gate.a] & mask[gate.b])
        rep.violation("times gate " + std::to_string(g) + " has overlapping children");
      mask[g] = mask[gate.a] | mask[gate.b];
    } else {
      if (mask[gate.a] != mask[gate.b])
        rep.violation("union gate " + std::to_string(g) + " has unequal child variable sets");
      mask[g] = mask[gate.a] | mask[gate.b];
    }
  }
  std::uint64_t full = c.nvars() == 64 ? ~0ULL : (1ULL << c.nvars()) - 1;
  if (mask[c.output] != full)
    rep.violation("output computes over a proper subset of the variables");
  return rep;
}

inline void require_valid(const Circuit& c, const char* who) {
  ValidationReport rep = validate_circuit(c);
  if (!rep.ok()) throw BadScope(std::string(who) + ": invalid circuit: " + rep.summary());
}

}  // namespace homfactor

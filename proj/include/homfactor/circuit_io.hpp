#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "homfactor/circuit.hpp"
#include "homfactor/errors.hpp"

namespace homfactor {

// Line-based circuit format, bit-exact and diff-friendly:
//   vars <n>
//   var <name>                     (n lines, index order)
//   g<i> input <var-name> <value>
//   g<i> union g<a> g<b> [...]     (binary on output; parser may accept wide)
//   g<i> times g<a> g<b> [...]
//   output g<i>
// Gates appear children-before-parents with dense ids g0.. in line order.
// The single line "EMPTY" encodes the empty-result sentinel.

namespace detail {

inline void check_token_name(const std::string& name) {
  if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos)
    throw IoError("variable name unusable in circuit files: '" + name + "'");
}

inline std::string gate_ref(int id) { return "g" + std::to_string(id); }

inline int parse_gate_ref(const std::string& tok, int line_no) {
  if (tok.size() < 2 || tok[0] != 'g')
    throw FileParseError("line " + std::to_string(line_no) + ": expected gate reference, got '" +
                         tok + "'");
  for (size_t i = 1; i < tok.size(); ++i)
    if (tok[i] < '0' || tok[i] > '9')
      throw FileParseError("line " + std::to_string(line_no) + ": bad gate reference '" + tok + "'");
  try {
    return std::stoi(tok.substr(1));
  } catch (...) {
    throw FileParseError("line " + std::to_string(line_no) + ": gate id out of range '" + tok + "'");
  }
}

}  // namespace detail

inline std::string serialize_circuit(const Circuit& c) {
  // stored ids are kept when already topological; otherwise a post-order
  // walk renumbers the output's cone densely
  std::vector<int> order = detail::topo_order(c);
  std::vector<int> new_id(c.gates.size(), -1);
  for (size_t i = 0; i < order.size(); ++i) new_id[order[i]] = static_cast<int>(i);
  if (new_id[c.output] < 0) throw IoError("serialize_circuit: output not reachable");

  std::ostringstream out;
  out << "vars " << c.nvars() << "\n";
  for (const auto& name : c.var_names) {
    detail::check_token_name(name);
    out << "var " << name << "\n";
  }
  for (size_t i = 0; i < order.size(); ++i) {
    const Gate& g = c.gates[order[i]];
    out << detail::gate_ref(static_cast<int>(i)) << " ";
    if (g.kind == Gate::Kind::Input) {
      if (g.a < 0 || g.a >= c.nvars()) throw IoError("serialize_circuit: variable out of range");
      out << "input " << c.var_names[g.a] << " " << g.b;
    } else {
      const char* word = g.kind == Gate::Kind::Union ? "union" : "times";
      if (new_id[g.a] < 0 || new_id[g.b] < 0)
        throw IoError("serialize_circuit: dangling child reference");
      out << word << " " << detail::gate_ref(new_id[g.a]) << " " << detail::gate_ref(new_id[g.b]);
    }
    out << "\n";
  }
  out << "output " << detail::gate_ref(new_id[c.output]) << "\n";
  return out.str();
}

inline std::string serialize_circuit(const CircuitOrEmpty& c) {
  if (std::holds_alternative<EmptyResult>(c)) return "EMPTY\n";
  return serialize_circuit(std::get<Circuit>(c));
}

// Parse accepting wide gates (fan-in >= 2). The strict binary loader below
// narrows the result.
inline std::variant<WideCircuit, EmptyResult> parse_wide_circuit(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;  // blank line tolerated
    rows.push_back(std::move(toks));
  }
  if (rows.empty()) throw FileParseError("empty circuit file");
  if (rows.size() == 1 && rows[0].size() == 1 && rows[0][0] == "EMPTY") return EmptyResult{};

  size_t r = 0;
  auto fail = [&](const std::string& why) -> FileParseError {
    return FileParseError("row " + std::to_string(r + 1) + ": " + why);
  };
  if (rows[r].size() != 2 || rows[r][0] != "vars") throw fail("expected 'vars <n>'");
  int nvars = 0;
  try {
    nvars = std::stoi(rows[r][1]);
  } catch (...) {
    throw fail("bad variable count");
  }
  if (nvars < 0) throw fail("negative variable count");
  ++r;

  WideCircuit wc;
  std::map<std::string, int> var_id;
  for (int v = 0; v < nvars; ++v, ++r) {
    if (r >= rows.size() || rows[r].size() != 2 || rows[r][0] != "var")
      throw fail("expected 'var <name>'");
    const std::string& name = rows[r][1];
    if (var_id.count(name)) throw fail("duplicate variable " + name);
    var_id[name] = v;
    wc.var_names.push_back(name);
  }

  int output = -1;
  for (; r < rows.size(); ++r) {
    const auto& toks = rows[r];
    if (toks[0] == "output") {
      if (toks.size() != 2) throw fail("expected 'output g<i>'");
      output = detail::parse_gate_ref(toks[1], static_cast<int>(r + 1));
      if (output < 0 || output >= static_cast<int>(wc.gates.size()))
        throw fail("output references undefined gate");
      ++r;
      if (r != rows.size()) throw fail("content after the output line");
      break;
    }
    int id = detail::parse_gate_ref(toks[0], static_cast<int>(r + 1));
    if (id != static_cast<int>(wc.gates.size()))
      throw fail("gate ids must be dense and in order, expected " +
                 detail::gate_ref(static_cast<int>(wc.gates.size())));
    if (toks.size() < 2) throw fail("missing gate kind");
    WideGate g;
    if (toks[1] == "input") {
      if (toks.size() != 4) throw fail("expected 'g<i> input <var> <value>'");
      auto it = var_id.find(toks[2]);
      if (it == var_id.end()) throw fail("unknown variable " + toks[2]);
      g.kind = Gate::Kind::Input;
      g.var = it->second;
      try {
        g.value = std::stoi(toks[3]);
      } catch (...) {
        throw fail("bad input value");
      }
      if (g.value < 0) throw fail("negative input value");
    } else if (toks[1] == "union" || toks[1] == "times") {
      g.kind = toks[1] == "union" ? Gate::Kind::Union : Gate::Kind::Times;
      if (toks.size() < 4) throw fail("gate needs at least two children");
      for (size_t k = 2; k < toks.size(); ++k) {
        int ch = detail::parse_gate_ref(toks[k], static_cast<int>(r + 1));
        if (ch < 0 || ch >= id) throw fail("child must be a previously defined gate");
        g.children.push_back(ch);
      }
    } else {
      throw fail("unknown gate kind '" + toks[1] + "'");
    }
    wc.gates.push_back(std::move(g));
  }
  if (output < 0) throw FileParseError("missing output line");
  wc.output = output;
  return wc;
}

// Strict binary load: every internal gate must have exactly two children.
inline CircuitOrEmpty parse_circuit(const std::string& text) {
  auto wide = parse_wide_circuit(text);
  if (std::holds_alternative<EmptyResult>(wide)) return EmptyResult{};
  const WideCircuit& wc = std::get<WideCircuit>(wide);
  Circuit c;
  c.var_names = wc.var_names;
  c.output = wc.output;
  for (size_t i = 0; i < wc.gates.size(); ++i) {
    const WideGate& g = wc.gates[i];
    if (g.kind == Gate::Kind::Input) {
      c.gates.push_back(Gate::input(g.var, g.value));
      continue;
    }
    if (g.children.size() != 2)
      throw FileParseError("gate g" + std::to_string(i) + " has fan-in " +
                           std::to_string(g.children.size()) + ", expected 2");
    c.gates.push_back(g.kind == Gate::Kind::Union ? Gate::unite(g.children[0], g.children[1])
                                                  : Gate::times(g.children[0], g.children[1]));
  }
  return c;
}

}  // namespace homfactor

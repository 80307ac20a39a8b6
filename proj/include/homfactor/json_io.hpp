#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "homfactor/errors.hpp"
#include "homfactor/flow.hpp"
#include "homfactor/rational.hpp"
#include "homfactor/structure.hpp"
#include "homfactor/tree_decomposition.hpp"

namespace homfactor {

// ordered_json keeps insertion order, which is what makes our own output
// byte-stable across write/read/write.
using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& get_field(const Json& j, const char* key, const char* who) {
  auto it = j.find(key);
  if (it == j.end()) throw FileParseError(std::string(who) + ": missing field \"" + key + "\"");
  return *it;
}

inline int name_index(const std::vector<std::string>& names, const std::string& name,
                      const char* who) {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw FileParseError(std::string(who) + ": unknown name \"" + name + "\"");
}

}  // namespace detail

// Structure files: {"signature":[{"name","arity"}...], "universe":[ids...],
// "relations":{"name":[[ids...]...]}} with string element ids.
inline Json structure_to_json(const Structure& s) {
  Json j;
  j["signature"] = Json::array();
  for (const auto& sym : s.sig.symbols)
    j["signature"].push_back({{"name", sym.name}, {"arity", sym.arity}});
  j["universe"] = s.universe;
  Json rels = Json::object();
  for (size_t r = 0; r < s.sig.symbols.size(); ++r) {
    Json rows = Json::array();
    for (const auto& tup : s.relations[r]) {
      Json row = Json::array();
      for (int v : tup) row.push_back(s.universe[v]);
      rows.push_back(std::move(row));
    }
    rels[s.sig.symbols[r].name] = std::move(rows);
  }
  j["relations"] = std::move(rels);
  return j;
}

inline Structure structure_from_json(const Json& j) {
  if (!j.is_object()) throw FileParseError("structure: expected a JSON object");
  Structure s;
  for (const Json& u : detail::get_field(j, "universe", "structure")) {
    if (!u.is_string()) throw FileParseError("structure: universe ids must be strings");
    s.universe.push_back(u.get<std::string>());
  }
  for (const Json& sym : detail::get_field(j, "signature", "structure")) {
    const Json& name = detail::get_field(sym, "name", "structure signature");
    const Json& arity = detail::get_field(sym, "arity", "structure signature");
    if (!name.is_string() || !arity.is_number_integer())
      throw FileParseError("structure: signature entries need a string name and integer arity");
    s.add_symbol(name.get<std::string>(), arity.get<int>());
  }
  // tuples keep file order (no sorting), so writing the structure back out
  // reproduces the input; validate_structure is the place that flags
  // duplicates or arity slips
  const Json& rels = detail::get_field(j, "relations", "structure");
  for (size_t r = 0; r < s.sig.symbols.size(); ++r) {
    const auto& sym = s.sig.symbols[r];
    auto it = rels.find(sym.name);
    if (it == rels.end()) continue;
    for (const Json& row : *it) {
      std::vector<int> tup;
      for (const Json& v : row) {
        if (!v.is_string()) throw FileParseError("structure: tuple entries must be string ids");
        int e = s.element_index(v.get<std::string>());
        if (e < 0)
          throw FileParseError("structure: unknown element \"" + v.get<std::string>() + "\"");
        tup.push_back(e);
      }
      if (static_cast<int>(tup.size()) != sym.arity)
        throw FileParseError("structure: tuple of wrong arity in " + sym.name);
      s.relations[r].push_back(std::move(tup));
    }
  }
  for (const auto& key : rels.items())
    if (s.sig.index_of(key.key()) < 0)
      throw FileParseError("structure: relation \"" + key.key() + "\" not in the signature");
  return s;
}

// TD files: {"nodes":[names], "edges":[[u,v]...], "bags":{node:[vertex
// names]}}. Bags refer to vertices of the decomposed structure by name.
inline Json td_to_json(const TreeDecomposition& td, const std::vector<std::string>& vertex_names) {
  Json j;
  j["nodes"] = td.node_names;
  j["edges"] = Json::array();
  for (const auto& [u, v] : td.edges)
    j["edges"].push_back({td.node_names[u], td.node_names[v]});
  Json bags = Json::object();
  for (size_t i = 0; i < td.bags.size(); ++i) {
    Json bag = Json::array();
    for (int v : td.bags[i]) {
      if (v < 0 || v >= static_cast<int>(vertex_names.size()))
        throw BadScope("td_to_json: bag vertex out of range");
      bag.push_back(vertex_names[v]);
    }
    bags[td.node_names[i]] = std::move(bag);
  }
  j["bags"] = std::move(bags);
  return j;
}

inline TreeDecomposition td_from_json(const Json& j, const std::vector<std::string>& vertex_names) {
  if (!j.is_object()) throw FileParseError("td: expected a JSON object");
  TreeDecomposition td;
  for (const Json& n : detail::get_field(j, "nodes", "td")) {
    if (!n.is_string()) throw FileParseError("td: node names must be strings");
    td.node_names.push_back(n.get<std::string>());
  }
  for (const Json& e : detail::get_field(j, "edges", "td")) {
    if (!e.is_array() || e.size() != 2) throw FileParseError("td: edges must be name pairs");
    int u = detail::name_index(td.node_names, e[0].get<std::string>(), "td edge");
    int v = detail::name_index(td.node_names, e[1].get<std::string>(), "td edge");
    td.edges.push_back({u, v});
  }
  const Json& bags = detail::get_field(j, "bags", "td");
  td.bags.resize(td.node_names.size());
  for (size_t i = 0; i < td.node_names.size(); ++i) {
    auto it = bags.find(td.node_names[i]);
    if (it == bags.end()) throw FileParseError("td: no bag for node \"" + td.node_names[i] + "\"");
    for (const Json& v : *it)
      td.bags[i].push_back(detail::name_index(vertex_names, v.get<std::string>(), "td bag"));
  }
  for (const auto& key : bags.items())
    detail::name_index(td.node_names, key.key(), "td bags");
  return td;
}

// Flow witnesses: a JSON list of {"path":[v...],"weight":"p/q"}; concurrent
// witnesses carry {"cliques":[[v...]...],"epsilon":"p/q","flows":[entries]}
// where each entry also names its clique pair.
inline Json flow_to_json(const Flow& f) {
  Json j = Json::array();
  for (size_t p = 0; p < f.paths.size(); ++p)
    j.push_back({{"path", f.paths[p]}, {"weight", to_string(f.weights[p])}});
  return j;
}

inline Flow flow_from_json(const Json& j) {
  if (!j.is_array()) throw FileParseError("flow: expected a JSON list");
  Flow f;
  for (const Json& entry : j) {
    const Json& path = detail::get_field(entry, "path", "flow");
    const Json& weight = detail::get_field(entry, "weight", "flow");
    f.paths.push_back(path.get<HPath>());
    f.weights.push_back(parse_rational(weight.get<std::string>()));
    f.value += f.weights.back();
  }
  return f;
}

inline Json concurrent_flow_to_json(const ConcurrentFlow& cf) {
  Json j;
  j["cliques"] = cf.cliques;
  j["epsilon"] = to_string(cf.epsilon);
  Json flows = Json::array();
  for (size_t q = 0; q < cf.pairs.size(); ++q) {
    const Flow& f = cf.pair_flows[q];
    for (size_t p = 0; p < f.paths.size(); ++p)
      flows.push_back({{"path", f.paths[p]},
                       {"weight", to_string(f.weights[p])},
                       {"pair", {cf.pairs[q].first, cf.pairs[q].second}}});
  }
  j["flows"] = std::move(flows);
  return j;
}

inline ConcurrentFlow concurrent_flow_from_json(const Json& j) {
  if (!j.is_object()) throw FileParseError("concurrent flow: expected a JSON object");
  ConcurrentFlow cf;
  for (const Json& k : detail::get_field(j, "cliques", "concurrent flow"))
    cf.cliques.push_back(k.get<std::vector<int>>());
  cf.epsilon = parse_rational(detail::get_field(j, "epsilon", "concurrent flow").get<std::string>());
  int k = static_cast<int>(cf.cliques.size());
  for (int i = 0; i < k; ++i)
    for (int l = i + 1; l < k; ++l) {
      cf.pairs.push_back({i, l});
      cf.pair_flows.push_back(Flow{{}, {}, cf.epsilon});
    }
  for (const Json& entry : detail::get_field(j, "flows", "concurrent flow")) {
    const Json& pair = detail::get_field(entry, "pair", "concurrent flow");
    if (!pair.is_array() || pair.size() != 2)
      throw FileParseError("concurrent flow: pair must be [i,j]");
    std::pair<int, int> key{pair[0].get<int>(), pair[1].get<int>()};
    auto it = std::find(cf.pairs.begin(), cf.pairs.end(), key);
    if (it == cf.pairs.end()) throw FileParseError("concurrent flow: pair out of range");
    Flow& f = cf.pair_flows[it - cf.pairs.begin()];
    f.paths.push_back(detail::get_field(entry, "path", "concurrent flow").get<HPath>());
    f.weights.push_back(
        parse_rational(detail::get_field(entry, "weight", "concurrent flow").get<std::string>()));
  }
  return cf;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FileParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace homfactor

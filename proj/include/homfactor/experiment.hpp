#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "homfactor/compile.hpp"
#include "homfactor/cover.hpp"
#include "homfactor/errors.hpp"
#include "homfactor/flow.hpp"
#include "homfactor/flow_structure.hpp"
#include "homfactor/hard_graph.hpp"
#include "homfactor/hom_oracle.hpp"
#include "homfactor/hypergraph.hpp"
#include "homfactor/io_util.hpp"
#include "homfactor/json_io.hpp"
#include "homfactor/rational.hpp"
#include "homfactor/rectangle.hpp"
#include "homfactor/rng.hpp"
#include "homfactor/separator.hpp"
#include "homfactor/structure.hpp"
#include "homfactor/treewidth.hpp"

namespace homfactor {

// The two experiment pipelines: cliques (or any fixed pattern graph) against
// generated hard graphs, and single-tuple queries against sampled flow
// structures. Each instance size becomes one report row; a row that fails
// keeps its error message and the run moves on.

struct ExperimentConfig {
  enum class Family { Clique, Grid, File };
  Family family = Family::Clique;
  int clique_k = 3;
  int grid_rows = 2, grid_cols = 2;
  Structure query;              // Family::File
  std::string query_name;       // report label; derived from the family if empty

  std::vector<int> sizes;       // n per row (tw) or N per row (subw)
  std::uint64_t seed = 0;       // row i runs on child_seed(seed, i)
  int max_retries = 64;

  long long oracle_budget = kDefaultOracleBudget;
  long long compile_budget = kDefaultCompileBudget;
  long long cover_budget = 1'000'000'000;  // cells for cover extraction

  std::vector<std::vector<int>> cliques;  // subw partition; empty = singletons
  std::string flow_file;                  // subw: load this witness instead of solving
  std::string out_base;                   // CLI: report files land at out_base.{csv,json,txt}
};

struct ExperimentCell {
  int index = 0;
  int size = 0;                  // the n or N of this row
  bool ok = false;
  std::string error;

  long long b_norm = 0;          // ||B||
  BigInt hom_count;
  int circuit_size = 0;
  Rational fhtw;
  long long cover_size = 0;
  BigInt max_rect;               // largest balanced rectangle, when measured
  Rational certificate;          // hom_count / max-rectangle-bound
  std::string cert_source;       // "measured" or "analytic"
  int scattered_ok = -1;         // subw: 1/0 after re-checking; -1 elsewhere
  std::string note;

  bool operator==(const ExperimentCell&) const = default;
};

struct ExperimentReport {
  std::string kind;              // "tw" or "subw"
  std::string query_name;
  std::uint64_t seed = 0;
  std::vector<ExperimentCell> cells;

  bool all_ok() const {
    for (const auto& c : cells)
      if (!c.ok) return false;
    return true;
  }

  bool operator==(const ExperimentReport&) const = default;
};

namespace detail {

inline void require_experiment_config(const ExperimentConfig& cfg, const char* who) {
  for (int s : cfg.sizes)
    if (s <= 0) throw BadScope(std::string(who) + ": instance sizes must be positive");
  if (cfg.oracle_budget <= 0 || cfg.compile_budget <= 0 || cfg.cover_budget <= 0)
    throw BadScope(std::string(who) + ": budgets must be positive");
  if (cfg.max_retries < 1) throw BadScope(std::string(who) + ": max_retries must be positive");
}

inline Hypergraph experiment_query_graph(const ExperimentConfig& cfg, const char* who) {
  switch (cfg.family) {
    case ExperimentConfig::Family::Clique:
      if (cfg.clique_k < 1) throw BadScope(std::string(who) + ": clique size must be positive");
      return complete_graph(cfg.clique_k);
    case ExperimentConfig::Family::Grid:
      return grid_graph(cfg.grid_rows, cfg.grid_cols);
    case ExperimentConfig::Family::File:
      if (cfg.query.universe.empty())
        throw BadScope(std::string(who) + ": file family needs a loaded query");
      return hypergraph_of(cfg.query).primal_graph();
  }
  throw BadScope(std::string(who) + ": unknown query family");
}

inline std::string experiment_query_name(const ExperimentConfig& cfg) {
  if (!cfg.query_name.empty()) return cfg.query_name;
  switch (cfg.family) {
    case ExperimentConfig::Family::Clique:
      return "K" + std::to_string(cfg.clique_k);
    case ExperimentConfig::Family::Grid:
      return "grid" + std::to_string(cfg.grid_rows) + "x" + std::to_string(cfg.grid_cols);
    default:
      return "query";
  }
}

inline BigInt factorial_big(int t) {
  BigInt f = 1;
  for (int i = 2; i <= t; ++i) f *= i;
  return f;
}

}  // namespace detail

// Pattern graph vs hard graphs H(t, n), one row per n. The certificate is
// |Hom| over the largest W-balanced rectangle of the extracted cover, W
// being the largest highly connected set the pattern admits; when W is a
// single vertex (k = 0) or extraction runs out of budget, the analytic
// rectangle bound n^(t-floor(k/3)) * ceil(3 log2 n)^(floor(k/3)) stands in
// and the source column says so.
inline ExperimentReport run_tw_experiment(const ExperimentConfig& cfg) {
  detail::require_experiment_config(cfg, "run_tw_experiment");
  Hypergraph g = detail::experiment_query_graph(cfg, "run_tw_experiment");
  int t = g.n;
  Structure a = structure_of_graph(g);
  TreewidthResult tw = treewidth_exact(g);

  std::vector<int> W;
  int hk = 0;
  for (int kk = (t - 1) / 2; kk >= 0; --kk) {
    HcsResult r = find_hcs(g, kk);
    if (r.W) {
      W = *r.W;
      hk = kk;
      break;
    }
  }

  ExperimentReport rep;
  rep.kind = "tw";
  rep.query_name = detail::experiment_query_name(cfg);
  rep.seed = cfg.seed;

  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    ExperimentCell cell;
    cell.index = static_cast<int>(i);
    cell.size = cfg.sizes[i];
    try {
      int n = cfg.sizes[i];
      HardGraphCert hard = gen_hard_graph(t, n, Rng::child_seed(cfg.seed, i), cfg.max_retries);
      Structure b = structure_of_graph(hard.graph);
      cell.b_norm = b.total_tuples();

      CompileStats stats;
      CircuitOrEmpty co = compile_td(a, b, tw.td, &stats, cfg.compile_budget);
      cell.circuit_size = stats.circuit_size;
      cell.fhtw = stats.fhtw;

      if (cfg.family == ExperimentConfig::Family::Clique)
        cell.hom_count = detail::factorial_big(t) * hard.t_clique_count;
      else if (std::holds_alternative<Circuit>(co))
        cell.hom_count = count_deterministic(std::get<Circuit>(co));

      bool measured = false;
      if (hk >= 1 && std::holds_alternative<Circuit>(co)) {
        try {
          WeightFunction f = WeightFunction::indicator(t, W);
          RectangleCover cover = extract_cover(std::get<Circuit>(co), f, cfg.cover_budget);
          RectBoundReport rb = rectangle_bound_check(cover, g, W, hk, n);
          cell.cover_size = static_cast<long long>(cover.rects.size());
          cell.max_rect = rb.max_balanced_size;
          cell.certificate = rb.certificate;
          cell.cert_source = "measured";
          cell.note = rb.summary();
          measured = true;
        } catch (const BudgetExceeded&) {
          // fall through to the analytic bound
        }
      }
      if (!measured) {
        int m = hk / 3;
        BigInt bound =
            pow_bigint(BigInt(n), t - m) * pow_bigint(BigInt(ceil_log2_pow(n, 3)), m);
        cell.certificate = Rational(cell.hom_count, bound);
        cell.cert_source = "analytic";
        cell.note = "analytic rectangle bound at k=" + std::to_string(hk);
      }
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    rep.cells.push_back(std::move(cell));
  }
  return rep;
}

// Single-tuple query vs sampled flow structures, one row per N. The weight
// function driving the cover is alpha of the maximum uniform concurrent flow
// on the clique partition (singletons unless the config supplies one); each
// row re-checks every relation for scattering and records the alpha balance
// of the largest rectangle's split.
inline ExperimentReport run_subw_experiment(const ExperimentConfig& cfg) {
  detail::require_experiment_config(cfg, "run_subw_experiment");
  Structure a;
  if (cfg.family == ExperimentConfig::Family::File)
    a = cfg.query;
  else
    a = structure_of_graph(detail::experiment_query_graph(cfg, "run_subw_experiment"));
  Hypergraph h = hypergraph_of(a);

  std::vector<std::vector<int>> cliques = cfg.cliques;
  if (cliques.empty())
    for (int v = 0; v < h.n; ++v) cliques.push_back({v});

  ExperimentReport rep;
  rep.kind = "subw";
  rep.query_name = cfg.query_name.empty() ? detail::experiment_query_name(cfg) : cfg.query_name;
  rep.seed = cfg.seed;

  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    ExperimentCell cell;
    cell.index = static_cast<int>(i);
    cell.size = cfg.sizes[i];
    try {
      int N = cfg.sizes[i];

      ConcurrentFlow cf;
      if (!cfg.flow_file.empty()) {
        cf = concurrent_flow_from_json(parse_json(read_text_file(cfg.flow_file)));
        ValidationReport v = validate_concurrent_flow(h, cf);
        if (!v.ok())
          throw BadScope("run_subw_experiment: flow witness rejected: " + v.summary());
      } else if (cliques.size() == 1) {
        cf.cliques = cliques;  // no pairs: alpha degenerates to zero
      } else {
        cf = max_uniform_concurrent_flow(h, cliques);
      }

      std::vector<int> W;
      for (const auto& ki : cf.cliques) W.insert(W.end(), ki.begin(), ki.end());
      std::sort(W.begin(), W.end());
      VertexWeights alpha = alpha_of_flow(h, cf, W);
      VertexWeights mu = mu_of_flow(h, cf);

      FlowStructure fs = gen_flow_structure(a, mu, N, Rng::child_seed(cfg.seed, i),
                                            cfg.max_retries, cfg.oracle_budget);
      cell.b_norm = fs.b.total_tuples();
      cell.hom_count = BigInt(fs.hom_count);

      cell.scattered_ok = 1;
      for (std::size_t r = 0; r < a.relations.size(); ++r) {
        std::vector<std::vector<int>> scope_doms;
        for (int v : a.relations[r][0]) scope_doms.push_back(fs.dom[v]);
        if (!is_n_scattered(fs.b.relations[r], scope_doms, N)) cell.scattered_ok = 0;
      }

      TreewidthResult tw = treewidth_exact(h);
      CompileStats stats;
      CircuitOrEmpty co = compile_td(a, fs.b, tw.td, &stats, cfg.compile_budget);
      cell.circuit_size = stats.circuit_size;
      cell.fhtw = stats.fhtw;

      bool measured = false;
      if (std::holds_alternative<Circuit>(co)) {
        try {
          WeightFunction f{alpha.w};
          RectangleCover cover = extract_cover(std::get<Circuit>(co), f, cfg.cover_budget);
          const Rectangle* largest = nullptr;
          for (const Rectangle& r : cover.rects)
            if (!largest || r.size() > largest->size()) largest = &r;
          if (largest) {
            cell.cover_size = static_cast<long long>(cover.rects.size());
            cell.max_rect = largest->size();
            cell.certificate = Rational(cell.hom_count, cell.max_rect);
            cell.cert_source = "measured";
            AlphaBalanceReport abr = alpha_balance_report(h, cf, alpha, largest->part.x);
            cell.note = abr.summary();
            measured = true;
          }
        } catch (const BudgetExceeded&) {
        }
      }
      if (!measured) {
        BigInt bound = 1;
        for (const auto& d : fs.dom) bound *= static_cast<long long>(d.size());
        cell.certificate = Rational(cell.hom_count, bound);
        cell.cert_source = "analytic";
        cell.note = "analytic product bound";
      }
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    rep.cells.push_back(std::move(cell));
  }
  return rep;
}

// Report emission. Column order is part of the format: identical runs must
// produce byte-identical files.
namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string report_csv(const ExperimentReport& rep) {
  std::string out =
      "index,size,ok,error,b_norm,hom_count,circuit_size,fhtw,cover_size,max_rect,"
      "certificate,certificate_source,scattered_ok,note\n";
  for (const ExperimentCell& c : rep.cells) {
    out += std::to_string(c.index) + ',' + std::to_string(c.size) + ',' +
           (c.ok ? "1" : "0") + ',' + detail::csv_escape(c.error) + ',' +
           std::to_string(c.b_norm) + ',' + c.hom_count.str() + ',' +
           std::to_string(c.circuit_size) + ',' + to_string(c.fhtw) + ',' +
           std::to_string(c.cover_size) + ',' + c.max_rect.str() + ',' +
           to_string(c.certificate) + ',' + c.cert_source + ',' +
           (c.scattered_ok < 0 ? std::string("-") : std::to_string(c.scattered_ok)) + ',' +
           detail::csv_escape(c.note) + '\n';
  }
  return out;
}

inline Json report_to_json(const ExperimentReport& rep) {
  Json cells = Json::array();
  for (const ExperimentCell& c : rep.cells) {
    Json jc;
    jc["index"] = c.index;
    jc["size"] = c.size;
    jc["ok"] = c.ok;
    jc["error"] = c.error;
    jc["b_norm"] = c.b_norm;
    jc["hom_count"] = c.hom_count.str();
    jc["circuit_size"] = c.circuit_size;
    jc["fhtw"] = to_string(c.fhtw);
    jc["cover_size"] = c.cover_size;
    jc["max_rect"] = c.max_rect.str();
    jc["certificate"] = to_string(c.certificate);
    jc["certificate_source"] = c.cert_source;
    jc["scattered_ok"] = c.scattered_ok;
    jc["note"] = c.note;
    cells.push_back(std::move(jc));
  }
  Json j;
  j["kind"] = rep.kind;
  j["query"] = rep.query_name;
  j["seed"] = rep.seed;
  j["cells"] = std::move(cells);
  return j;
}

inline ExperimentReport report_from_json(const Json& j) {
  ExperimentReport rep;
  rep.kind = detail::get_field(j, "kind", "report_from_json").get<std::string>();
  rep.query_name = detail::get_field(j, "query", "report_from_json").get<std::string>();
  rep.seed = detail::get_field(j, "seed", "report_from_json").get<std::uint64_t>();
  for (const Json& jc : detail::get_field(j, "cells", "report_from_json")) {
    ExperimentCell c;
    c.index = detail::get_field(jc, "index", "report_from_json").get<int>();
    c.size = detail::get_field(jc, "size", "report_from_json").get<int>();
    c.ok = detail::get_field(jc, "ok", "report_from_json").get<bool>();
    c.error = detail::get_field(jc, "error", "report_from_json").get<std::string>();
    c.b_norm = detail::get_field(jc, "b_norm", "report_from_json").get<long long>();
    c.hom_count = BigInt(detail::get_field(jc, "hom_count", "report_from_json").get<std::string>());
    c.circuit_size = detail::get_field(jc, "circuit_size", "report_from_json").get<int>();
    c.fhtw = parse_rational(detail::get_field(jc, "fhtw", "report_from_json").get<std::string>());
    c.cover_size = detail::get_field(jc, "cover_size", "report_from_json").get<long long>();
    c.max_rect = BigInt(detail::get_field(jc, "max_rect", "report_from_json").get<std::string>());
    c.certificate =
        parse_rational(detail::get_field(jc, "certificate", "report_from_json").get<std::string>());
    c.cert_source = detail::get_field(jc, "certificate_source", "report_from_json").get<std::string>();
    c.scattered_ok = detail::get_field(jc, "scattered_ok", "report_from_json").get<int>();
    c.note = detail::get_field(jc, "note", "report_from_json").get<std::string>();
    rep.cells.push_back(std::move(c));
  }
  return rep;
}

// Plot-ready series, no rendering: per series a header line, then one
// "x y" pair per report row (y = 0 on error rows).
inline std::string report_svg_data(const ExperimentReport& rep) {
  std::string out;
  out += "series certificate\n";
  for (const ExperimentCell& c : rep.cells)
    out += std::to_string(c.size) + ' ' + to_decimal_string(c.certificate, 6) + '\n';
  out += "\nseries circuit_size\n";
  for (const ExperimentCell& c : rep.cells)
    out += std::to_string(c.size) + ' ' + std::to_string(c.circuit_size) + '\n';
  return out;
}

inline void emit_report(const ExperimentReport& rep, const std::string& format,
                        const std::string& path) {
  if (format == "csv")
    write_text_file(path, report_csv(rep));
  else if (format == "json")
    write_text_file(path, dump_json(report_to_json(rep)));
  else if (format == "svg-data")
    write_text_file(path, report_svg_data(rep));
  else
    throw BadScope("emit_report: unknown format " + format);
}

}  // namespace homfactor

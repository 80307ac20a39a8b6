#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homfactor/circuit_build.hpp"
#include "homfactor/circuit_eval.hpp"
#include "homfactor/circuit_io.hpp"
#include "homfactor/compile.hpp"
#include "homfactor/cover.hpp"
#include "homfactor/errors.hpp"
#include "homfactor/experiment.hpp"
#include "homfactor/flow.hpp"
#include "homfactor/flow_structure.hpp"
#include "homfactor/frac_cover.hpp"
#include "homfactor/hard_graph.hpp"
#include "homfactor/hom_oracle.hpp"
#include "homfactor/io_util.hpp"
#include "homfactor/json_io.hpp"
#include "homfactor/treewidth.hpp"
#include "homfactor/validation.hpp"

using namespace homfactor;

namespace {

Structure load_structure(const std::string& path) {
  return structure_from_json(parse_json(read_text_file(path)));
}

CircuitOrEmpty load_circuit(const std::string& path) {
  return parse_circuit(read_text_file(path));
}

int cmd_validate(const std::string& path) {
  Structure s = load_structure(path);
  ValidationReport rep = validate_structure(s);
  std::cout << rep.summary() << "\n";
  return rep.ok() ? 0 : 2;
}

int cmd_widths(const std::string& path) {
  Structure s = load_structure(path);
  Hypergraph h = hypergraph_of(s);
  TreewidthResult tw = treewidth_exact(h);
  std::vector<int> all;
  for (int v = 0; v < h.n; ++v) all.push_back(v);
  Rational rho = frac_edge_cover_number(h, all).value;
  Rational fh = fhtw_of_td(h, tw.td);
  std::cout << "tw " << tw.width << "\n"
            << "rho* " << to_string(rho) << "\n"
            << "fhtw(td) " << to_string(fh) << "\n";
  return 0;
}

int cmd_hom(const std::string& query_path, const std::string& data_path, bool enumerate,
            const std::string& out_path) {
  Structure a = load_structure(query_path);
  Structure b = load_structure(data_path);
  if (!enumerate) {
    std::cout << count_homs(a, b) << "\n";
    return 0;
  }
  FunctionSet homs = enumerate_homs(a, b);
  Json rows = Json::array();
  for (std::size_t i = 0; i < homs.size(); ++i) {
    Json row;
    for (std::size_t v = 0; v < homs.arity(); ++v)
      row[a.universe[homs.vars[v]]] = b.universe[homs.row(i)[v]];
    rows.push_back(std::move(row));
  }
  if (out_path.empty())
    std::cout << dump_json(rows);
  else
    write_text_file(out_path, dump_json(rows));
  return 0;
}

int cmd_circuit_validate(const std::string& path) {
  CircuitOrEmpty co = load_circuit(path);
  if (std::holds_alternative<EmptyResult>(co)) {
    std::cout << "EMPTY: trivially valid\n";
    return 0;
  }
  const Circuit& c = std::get<Circuit>(co);
  ValidationReport rep = validate_circuit(c);
  std::cout << rep.summary() << "\n";
  if (rep.ok()) std::cout << (check_deterministic(c) ? "deterministic\n" : "not deterministic\n");
  return rep.ok() ? 0 : 2;
}

int cmd_circuit_eval(const std::string& path) {
  CircuitOrEmpty co = load_circuit(path);
  if (std::holds_alternative<EmptyResult>(co)) {
    std::cout << "0 assignments\n";
    return 0;
  }
  EvalResult r = eval_circuit(std::get<Circuit>(co));
  std::cout << r.sink.size() << " assignments over " << r.sink.arity() << " variables\n";
  return 0;
}

int cmd_circuit_count(const std::string& path) {
  CircuitOrEmpty co = load_circuit(path);
  if (std::holds_alternative<EmptyResult>(co)) {
    std::cout << "0\n";
    return 0;
  }
  std::cout << count_deterministic(std::get<Circuit>(co), true).str() << "\n";
  return 0;
}

int cmd_circuit_smooth(const std::string& path, const std::string& out_path) {
  CircuitOrEmpty co = load_circuit(path);
  if (std::holds_alternative<EmptyResult>(co)) {
    write_text_file(out_path, serialize_circuit(co));
    return 0;
  }
  const Circuit& c = std::get<Circuit>(co);
  // domains as witnessed by the input gates themselves
  std::vector<std::vector<int>> domains(c.nvars());
  for (const Gate& g : c.gates)
    if (g.kind == Gate::Kind::Input) domains[g.a].push_back(g.b);
  Circuit s = smooth(c, domains);
  write_text_file(out_path, serialize_circuit(s));
  std::cout << "smoothed: " << c.size() << " -> " << s.size() << " gates\n";
  return 0;
}

int cmd_circuit_fanin2(const std::string& path, const std::string& out_path) {
  auto wide = parse_wide_circuit(read_text_file(path));
  if (std::holds_alternative<EmptyResult>(wide)) {
    write_text_file(out_path, "EMPTY\n");
    return 0;
  }
  Circuit c = to_fanin2(std::get<WideCircuit>(wide));
  write_text_file(out_path, serialize_circuit(c));
  std::cout << "fan-in-2: " << c.size() << " gates\n";
  return 0;
}

int cmd_compile(const std::string& a_path, const std::string& b_path, const std::string& td_path,
                const std::string& out_path, const std::string& stats_path) {
  Structure a = load_structure(a_path);
  Structure b = load_structure(b_path);
  TreeDecomposition td = td_from_json(parse_json(read_text_file(td_path)), a.universe);
  CompileStats stats;
  CircuitOrEmpty co = compile_td(a, b, td, &stats);
  write_text_file(out_path, serialize_circuit(co));
  if (!stats_path.empty()) {
    Json j;
    j["bag_sizes"] = stats.bag_sizes;
    j["max_bag_tuples"] = stats.max_bag_tuples;
    j["circuit_size"] = stats.circuit_size;
    j["fhtw"] = to_string(stats.fhtw);
    j["warnings"] = stats.warnings;
    write_text_file(stats_path, dump_json(j));
  }
  std::cout << "circuit size " << stats.circuit_size << ", fhtw " << to_string(stats.fhtw)
            << "\n";
  return 0;
}

int cmd_cover(const std::string& circuit_path, const std::string& weights_path,
              const std::string& out_path, const std::string& check_path) {
  CircuitOrEmpty co = load_circuit(circuit_path);
  Json wj = parse_json(read_text_file(weights_path));
  WeightFunction f;
  for (const Json& w : detail::get_field(wj, "weights", "cover"))
    f.w.push_back(parse_rational(w.get<std::string>()));

  RectangleCover cover = extract_cover(co, f);
  Rational total = f.total();

  Json j;
  j["rectangles"] = Json::array();
  for (const Rectangle& r : cover.rects) {
    Rational wx = f.of(r.part.x);
    Json jr;
    jr["gate"] = r.gate;
    jr["x_size"] = r.part.x.size();
    jr["y_size"] = r.part.y.size();
    jr["left"] = r.left.size();
    jr["right"] = r.right.size();
    jr["size"] = r.size().str();
    Rational wy = total - wx;
    jr["weight_x"] = to_string(wx);
    jr["weight_y"] = to_string(wy);
    jr["balance_margin"] = to_string(Rational(3) * (wx < wy ? wx : wy) - total);
    j["rectangles"].push_back(std::move(jr));
  }
  j["count"] = cover.rects.size();
  j["target_size"] = cover.target.size();

  int exit_code = 0;
  if (!check_path.empty()) {
    Json cj = parse_json(read_text_file(check_path));
    int t = detail::get_field(cj, "vertices", "cover --check-bound").get<int>();
    std::vector<std::vector<int>> edges =
        detail::get_field(cj, "edges", "cover --check-bound").get<std::vector<std::vector<int>>>();
    std::vector<int> W = detail::get_field(cj, "W", "cover --check-bound").get<std::vector<int>>();
    int k = detail::get_field(cj, "k", "cover --check-bound").get<int>();
    int n = detail::get_field(cj, "n", "cover --check-bound").get<int>();
    RectBoundReport rb =
        rectangle_bound_check(cover, Hypergraph::from_edges(t, std::move(edges)), W, k, n);
    Json jb;
    jb["bound"] = static_cast<double>(rb.bound);
    jb["max_balanced"] = rb.max_balanced_size.str();
    jb["hom_count"] = rb.hom_count.str();
    jb["certificate"] = to_string(rb.certificate);
    jb["all_within"] = rb.all_within;
    j["bound_check"] = std::move(jb);
    std::cout << rb.summary() << "\n";
    if (!rb.all_within) exit_code = 2;
  } else {
    std::cout << cover.rects.size() << " rectangles over " << cover.target.size()
              << " assignments\n";
  }

  if (!out_path.empty()) write_text_file(out_path, dump_json(j));
  return exit_code;
}

int cmd_gen_hard(int t, int n, std::uint64_t seed, int max_retries, const std::string& out_path) {
  HardGraphCert cert = gen_hard_graph(t, n, seed, max_retries);
  Json j;
  j["kind"] = "hard-graph";
  Json jc;
  jc["t"] = cert.t;
  jc["n"] = cert.n;
  jc["seed"] = cert.seed;
  jc["attempts"] = cert.attempts;
  jc["edge_count"] = cert.edge_count;
  jc["edges_ok"] = cert.edges_ok;
  jc["t_clique_count"] = cert.t_clique_count;
  jc["t_clique_threshold"] = to_string(cert.t_clique_threshold);
  jc["cliques_ok"] = cert.cliques_ok;
  jc["biclique_a"] = cert.biclique_a;
  jc["biclique_status"] =
      cert.biclique_status == HardGraphCert::Biclique::Verified ? "verified" : "probabilistic";
  jc["biclique_failure_bound"] = static_cast<double>(cert.biclique_failure_bound);
  jc["summary"] = cert.summary();
  j["certificate"] = std::move(jc);
  Json jg;
  jg["n"] = cert.graph.n;
  jg["edges"] = cert.graph.edges;
  j["graph"] = std::move(jg);
  write_text_file(out_path, dump_json(j));
  std::cout << cert.summary() << "\n";
  return 0;
}

int cmd_flow(const std::string& a_path, const std::string& cliques_path,
             const std::string& out_path) {
  Structure a = load_structure(a_path);
  Hypergraph h = hypergraph_of(a);
  std::vector<std::vector<int>> cliques;
  if (cliques_path.empty())
    for (int v = 0; v < h.n; ++v) cliques.push_back({v});
  else
    cliques = parse_json(read_text_file(cliques_path)).get<std::vector<std::vector<int>>>();
  ConcurrentFlow cf = max_uniform_concurrent_flow(h, cliques);
  write_text_file(out_path, dump_json(concurrent_flow_to_json(cf)));
  std::cout << "epsilon " << to_string(cf.epsilon) << "\n";
  return 0;
}

int cmd_gen_flow(const std::string& a_path, const std::string& flow_path, int N,
                 std::uint64_t seed, int max_retries, const std::string& out_path) {
  Structure a = load_structure(a_path);
  Hypergraph h = hypergraph_of(a);
  ConcurrentFlow cf = concurrent_flow_from_json(parse_json(read_text_file(flow_path)));
  ValidationReport v = validate_concurrent_flow(h, cf);
  if (!v.ok()) throw BadScope("gen-flow: flow witness rejected: " + v.summary());
  VertexWeights mu = mu_of_flow(h, cf);
  FlowStructure fs = gen_flow_structure(a, mu, N, seed, max_retries);

  Json j;
  j["kind"] = "flow-structure";
  Json jc;
  jc["N"] = fs.N;
  jc["seed"] = fs.seed;
  jc["attempts"] = fs.attempts;
  jc["hom_count"] = fs.hom_count;
  jc["hom_bar"] = to_string(fs.hom_bar);
  jc["t_exponent"] = to_string(fs.t_exponent);
  Json jmu = Json::array();
  for (const Rational& w : fs.mu.w) jmu.push_back(to_string(w));
  jc["mu"] = std::move(jmu);
  jc["summary"] = fs.summary();
  j["certificate"] = std::move(jc);
  Json jd;
  for (std::size_t vtx = 0; vtx < fs.dom.size(); ++vtx) {
    Json names = Json::array();
    for (int e : fs.dom[vtx]) names.push_back(fs.b.universe[e]);
    jd[a.universe[vtx]] = std::move(names);
  }
  j["doms"] = std::move(jd);
  j["structure"] = structure_to_json(fs.b);
  write_text_file(out_path, dump_json(j));
  std::cout << fs.summary() << "\n";
  return 0;
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig cfg;
  std::string family = detail::get_field(j, "family", "experiment config").get<std::string>();
  if (family == "clique")
    cfg.family = ExperimentConfig::Family::Clique;
  else if (family == "grid")
    cfg.family = ExperimentConfig::Family::Grid;
  else if (family == "file")
    cfg.family = ExperimentConfig::Family::File;
  else
    throw BadScope("experiment config: unknown family " + family);

  if (j.contains("clique_k")) cfg.clique_k = j["clique_k"].get<int>();
  if (j.contains("grid_rows")) cfg.grid_rows = j["grid_rows"].get<int>();
  if (j.contains("grid_cols")) cfg.grid_cols = j["grid_cols"].get<int>();
  if (j.contains("query_file")) cfg.query = load_structure(j["query_file"].get<std::string>());
  if (j.contains("query_name")) cfg.query_name = j["query_name"].get<std::string>();
  cfg.sizes = detail::get_field(j, "sizes", "experiment config").get<std::vector<int>>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("max_retries")) cfg.max_retries = j["max_retries"].get<int>();
  if (j.contains("budgets")) {
    const Json& b = j["budgets"];
    if (b.contains("oracle")) cfg.oracle_budget = b["oracle"].get<long long>();
    if (b.contains("compile")) cfg.compile_budget = b["compile"].get<long long>();
    if (b.contains("cover")) cfg.cover_budget = b["cover"].get<long long>();
  }
  if (j.contains("cliques"))
    cfg.cliques = j["cliques"].get<std::vector<std::vector<int>>>();
  if (j.contains("flow_file")) cfg.flow_file = j["flow_file"].get<std::string>();
  return cfg;
}

int cmd_experiment(const std::string& mode, const std::string& config_path,
                   const std::string& out_dir) {
  ExperimentReport rep;
  try {
    ExperimentConfig cfg = config_from_json(parse_json(read_text_file(config_path)));
    rep = mode == "tw" ? run_tw_experiment(cfg) : run_subw_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  std::filesystem::create_directories(out_dir);
  std::string base = out_dir + "/" + rep.kind + "_" + rep.query_name;
  emit_report(rep, "csv", base + ".csv");
  emit_report(rep, "json", base + ".json");
  emit_report(rep, "svg-data", base + ".txt");
  for (const ExperimentCell& c : rep.cells)
    std::cout << "cell " << c.index << " size " << c.size << ": "
              << (c.ok ? "certificate " + to_string(c.certificate) + " (" + c.cert_source + ")"
                       : "error: " + c.error)
              << "\n";
  std::cout << "wrote " << base << ".{csv,json,txt}\n";
  return rep.all_ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circuits, certificates, and experiments for homomorphism sets"};
  app.require_subcommand(1);

  std::string path, query_path, data_path, td_path, out_path, stats_path, weights_path,
      check_path, flow_path, config_path, out_dir;
  bool enumerate = false;
  int t = 3, n = 16, N = 16, max_retries = 64;
  std::uint64_t seed = 0;

  CLI::App* validate = app.add_subcommand("validate", "check a structure file");
  validate->add_option("file", path, "structure JSON")->required();

  CLI::App* widths = app.add_subcommand("widths", "print tw, rho*, and fhtw of the best td");
  widths->add_option("file", path, "structure JSON")->required();

  CLI::App* hom = app.add_subcommand("hom", "count or enumerate Hom(A,B)");
  hom->add_option("--query", query_path, "query structure JSON")->required();
  hom->add_option("--data", data_path, "data structure JSON")->required();
  hom->add_flag("--enumerate", enumerate, "print the assignments instead of the count");
  hom->add_option("--out", out_path, "write enumeration here instead of stdout");

  CLI::App* circuit = app.add_subcommand("circuit", "circuit file operations");
  circuit->require_subcommand(1);
  CLI::App* c_validate = circuit->add_subcommand("validate", "structural and semantic checks");
  c_validate->add_option("file", path)->required();
  CLI::App* c_eval = circuit->add_subcommand("eval", "materialize the computed set");
  c_eval->add_option("file", path)->required();
  CLI::App* c_count = circuit->add_subcommand("count", "count via determinism");
  c_count->add_option("file", path)->required();
  CLI::App* c_smooth = circuit->add_subcommand("smooth", "pad unions to equal variable sets");
  c_smooth->add_option("file", path)->required();
  c_smooth->add_option("--out", out_path, "output circuit file")->required();
  CLI::App* c_fanin2 = circuit->add_subcommand("fanin2", "narrow wide gates to fan-in 2");
  c_fanin2->add_option("file", path)->required();
  c_fanin2->add_option("--out", out_path, "output circuit file")->required();

  CLI::App* compile = app.add_subcommand("compile", "compile Hom(A,B) along a decomposition");
  compile->add_option("--structure", query_path, "query structure JSON")->required();
  compile->add_option("--data", data_path, "data structure JSON")->required();
  compile->add_option("--td", td_path, "tree decomposition JSON")->required();
  compile->add_option("--out", out_path, "output circuit file")->required();
  compile->add_option("--stats", stats_path, "also write compile stats JSON");

  CLI::App* cover = app.add_subcommand("cover", "extract a balanced rectangle cover");
  cover->add_option("--circuit", path, "circuit file")->required();
  cover->add_option("--weights", weights_path, "weight function JSON")->required();
  cover->add_option("--out", out_path, "cover report JSON");
  cover->add_option("--check-bound", check_path,
                    "pattern/W/k/n JSON to check the rectangle bound against");

  CLI::App* gen_hard = app.add_subcommand("gen-hard", "sample a certified hard graph");
  gen_hard->add_option("--t", t, "clique order")->required();
  gen_hard->add_option("--n", n, "vertex count")->required();
  gen_hard->add_option("--seed", seed, "master seed")->required();
  gen_hard->add_option("--out", out_path, "output JSON")->required();
  gen_hard->add_option("--max-retries", max_retries, "sampling attempts before giving up");

  CLI::App* flow = app.add_subcommand("flow", "compute a max uniform concurrent flow witness");
  flow->add_option("--structure", query_path, "query structure JSON")->required();
  flow->add_option("--cliques", check_path, "cliques JSON list; default singletons per vertex");
  flow->add_option("--out", out_path, "witness JSON")->required();

  CLI::App* gen_flow = app.add_subcommand("gen-flow", "sample a flow structure for a query");
  gen_flow->add_option("--structure", query_path, "query structure JSON")->required();
  gen_flow->add_option("--flow", flow_path, "concurrent flow witness JSON")->required();
  gen_flow->add_option("--N", N, "scale parameter")->required();
  gen_flow->add_option("--seed", seed, "master seed")->required();
  gen_flow->add_option("--out", out_path, "output JSON")->required();
  gen_flow->add_option("--max-retries", max_retries, "sampling attempts before giving up");

  CLI::App* experiment = app.add_subcommand("experiment", "run a full pipeline");
  experiment->require_subcommand(1);
  CLI::App* exp_tw = experiment->add_subcommand("tw", "pattern vs hard graphs");
  CLI::App* exp_subw = experiment->add_subcommand("subw", "query vs flow structures");
  for (CLI::App* e : {exp_tw, exp_subw}) {
    e->add_option("--config", config_path, "experiment config JSON")->required();
    e->add_option("--out", out_dir, "output directory")->required();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(path);
    if (*widths) return cmd_widths(path);
    if (*hom) return cmd_hom(query_path, data_path, enumerate, out_path);
    if (*c_validate) return cmd_circuit_validate(path);
    if (*c_eval) return cmd_circuit_eval(path);
    if (*c_count) return cmd_circuit_count(path);
    if (*c_smooth) return cmd_circuit_smooth(path, out_path);
    if (*c_fanin2) return cmd_circuit_fanin2(path, out_path);
    if (*compile) return cmd_compile(query_path, data_path, td_path, out_path, stats_path);
    if (*cover) return cmd_cover(path, weights_path, out_path, check_path);
    if (*gen_hard) return cmd_gen_hard(t, n, seed, max_retries, out_path);
    if (*flow) return cmd_flow(query_path, check_path, out_path);
    if (*gen_flow) return cmd_gen_flow(query_path, flow_path, N, seed, max_retries, out_path);
    if (*exp_tw) return cmd_experiment("tw", config_path, out_dir);
    if (*exp_subw) return cmd_experiment("subw", config_path, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

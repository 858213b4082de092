#include "sparsecut/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sparsecut/graph.hpp"
#include "sparsecut/harness.hpp"
#include "sparsecut/metric.hpp"
#include "sparsecut/rounding.hpp"
#include "sparsecut/sdp.hpp"

namespace sparsecut {

using ordered_json = nlohmann::ordered_json;

namespace {

void write_text(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move report into place: " + path);
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  if (!c.harness_kind.empty()) j["harness_kind"] = c.harness_kind;
  j["graph"] = c.graph_path;
  j["gen"] = c.gen_spec;
  j["embedding"] = c.embedding_path;
  j["instance"] = c.instance;
  j["seed"] = c.seed;
  j["has_seed"] = c.has_seed;
  j["s_star"] = c.s_star;
  j["samples"] = c.samples;
  j["gaussian_retries"] = c.gaussian_retries;
  j["oracle_limit"] = c.oracle_limit;
  j["node"] = c.node;
  j["k"] = c.k;
  j["delta_kappa"] = c.delta_kappa;
  j["c_prime"] = c.c_prime;
  j["delta"] = c.delta;
  j["eps_feas"] = c.eps_feas;
  j["eps_psd"] = c.eps_psd;
  j["max_rounds"] = c.max_rounds;
  j["alphas"] = c.alphas;
  return j;
}

ordered_json cut_json(const CutResult& cut) {
  ordered_json j;
  j["members"] = cut.members;
  j["cost"] = cut.cut_cost;
  j["separated_pairs"] = cut.separated_pairs;
  j["ratio"] = cut.ratio;
  return j;
}

std::pair<GraphKind, Graph> graph_from_spec(const std::string& spec,
                                            std::uint64_t seed) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 2) throw UsageError("generator spec must be kind:n[:p[:q]]");
  try {
    const GraphKind kind = parse_graph_kind(parts[0]);
    GenParams params;
    const int n = std::stoi(parts[1]);
    if (parts.size() > 2) params.p = std::stod(parts[2]);
    if (parts.size() > 3) params.q = std::stod(parts[3]);
    return {kind, generate(kind, n, seed, params)};
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(e.what()) + " in generator spec: " + spec);
  }
}

Graph load_graph(const RunConfig& c) {
  if (!c.graph_path.empty() && !c.gen_spec.empty())
    throw UsageError("give either --graph or --gen, not both");
  if (!c.graph_path.empty()) return read_graph_file(c.graph_path);
  if (!c.gen_spec.empty()) {
    auto [kind, g] = graph_from_spec(c.gen_spec, c.seed);
    const bool randomized =
        kind == GraphKind::planted_bisection || kind == GraphKind::gnp;
    if (randomized && !c.has_seed)
      throw UsageError("randomized generators require --seed");
    return g;
  }
  throw UsageError("command needs --graph FILE or --gen kind:n[:p[:q]]");
}

ordered_json embedding_json(const Embedding& e) {
  ordered_json j;
  j["n"] = e.node_count();
  j["m"] = e.dim();
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < e.count(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < e.dim(); ++c) row.push_back(e.points(r, c));
    rows.push_back(std::move(row));
  }
  j["vectors"] = std::move(rows);
  return j;
}

Embedding embedding_from_json(const ordered_json& j) {
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  const auto& rows = j.at("vectors");
  if (static_cast<int>(rows.size()) != n + 1)
    throw std::runtime_error("embedding must carry n+1 vectors");
  Embedding e;
  e.points.resize(n + 1, m);
  for (int r = 0; r <= n; ++r) {
    const auto& row = rows.at(r);
    if (static_cast<int>(row.size()) != m)
      throw std::runtime_error("embedding row has wrong dimension");
    for (int c = 0; c < m; ++c) e.points(r, c) = row.at(c).get<double>();
  }
  return e;
}

Embedding read_embedding_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  ordered_json j;
  in >> j;
  return embedding_from_json(j);
}

ordered_json residuals_json(const SdpSolution& sol) {
  ordered_json r;
  r["total_norm"] = sol.residuals.total_norm;
  r["total_dist"] = sol.residuals.total_dist;
  r["max_norm_cap"] = sol.residuals.max_norm_cap;
  r["origin_norm"] = sol.residuals.origin_norm;
  r["max_triangle"] = sol.residuals.max_triangle;
  r["worst_triple"] = sol.residuals.worst_triple;
  r["max_eig_neg"] = sol.max_eig_neg;
  r["worst_triangle_exhaustive"] = sol.worst_triangle_exhaustive;
  return r;
}

ordered_json harness_json(const HarnessReport& rep) {
  ordered_json j;
  j["experiment"] = rep.experiment;
  j["instance"] = rep.instance;
  j["harness_seed"] = rep.seed;
  j["samples"] = rep.samples;
  j["aggregates"] = rep.aggregates;
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : rep.verdicts) {
    ordered_json vj;
    vj["name"] = v.name;
    vj["pass"] = v.pass;
    vj["observed"] = v.observed;
    vj["bound"] = v.bound;
    vj["tolerance"] = v.tolerance;
    verdicts.push_back(std::move(vj));
  }
  j["verdicts"] = std::move(verdicts);
  return j;
}

ScaledInstance instance_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw UsageError("instance spec must be kind:size");
  const std::string kind = spec.substr(0, colon);
  int arg = 0;
  try {
    arg = std::stoi(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("bad instance size in: " + spec);
  }
  if (kind == "pm_e1") return antipodal_pair_instance(arg);
  if (kind == "hypercube") return hypercube_layers_instance(arg);
  if (kind == "point") {
    if (arg < 2) throw UsageError("point instance needs at least 2 nodes");
    ScaledInstance inst;
    inst.s_star = arg / 2;
    inst.kept.resize(arg);
    for (int i = 0; i < arg; ++i) inst.kept[i] = i;
    inst.embedding.points = Eigen::MatrixXd::Zero(arg + 1, 1);
    inst.embedding.points.col(0).tail(arg).setConstant(1.0);
    return inst;
  }
  throw UsageError("unknown instance kind: " + kind);
}

double resolve_delta(const RunConfig& c, int n) {
  if (c.delta > 0.0) return c.delta;
  return c.delta_kappa / std::sqrt(std::log2(static_cast<double>(std::max(n, 2))));
}

void emit(const RunConfig& c, ordered_json& j) {
  write_text(c.out_path, j.dump(2) + "\n");
}

int run_gen(const RunConfig& c) {
  if (c.gen_spec.empty()) throw UsageError("gen needs --gen kind:n[:p[:q]]");
  auto [kind, g] = graph_from_spec(c.gen_spec, c.seed);
  const bool randomized =
      kind == GraphKind::planted_bisection || kind == GraphKind::gnp;
  if (randomized && !c.has_seed)
    throw UsageError("randomized generators require --seed");
  std::ostringstream out;
  write_graph(g, out);
  write_text(c.out_path, out.str());
  return 0;
}

int run_exact(const RunConfig& c) {
  const Graph g = load_graph(c);
  const CutResult cut = exact_sparsest_cut(g, c.oracle_limit);
  ordered_json j;
  j["command"] = "exact";
  j["config"] = config_json(c);
  j["n"] = g.n;
  j["edges"] = g.edges.size();
  j["ratio"] = cut.ratio;
  j["cut"] = cut.members;
  j["cost"] = cut.cut_cost;
  j["separated_pairs"] = cut.separated_pairs;
  emit(c, j);
  return 0;
}

int run_solve(const RunConfig& c) {
  const Graph g = load_graph(c);
  if (c.s_star < 1) throw UsageError("solve needs --s-star >= 1");
  SolveOptions opts;
  opts.eps_feas = c.eps_feas;
  opts.eps_psd = c.eps_psd;
  opts.max_rounds = c.max_rounds;
  const SdpSolution sol = solve_sdp(build_relaxation(g, c.s_star), opts);

  ordered_json j;
  j["command"] = "solve";
  j["config"] = config_json(c);
  j["n"] = g.n;
  j["s_star"] = c.s_star;
  j["objective"] = sol.objective_value;
  ordered_json gram = ordered_json::array();
  for (int r = 0; r < sol.gram.rows(); ++r)
    for (int col = 0; col < sol.gram.cols(); ++col)
      gram.push_back(sol.gram(r, col));
  j["gram"] = std::move(gram);
  j["residuals"] = residuals_json(sol);
  j["triangle_rounds"] = sol.triangle_rounds;
  j["active_triangles"] = sol.active_triangles;
  j["iterations"] = sol.iterations;
  if (!c.embedding_out.empty()) {
    const Embedding e = gram_to_vectors(sol, 1e-8, 10.0 * c.eps_psd);
    write_text(c.embedding_out, embedding_json(e).dump(2) + "\n");
  }
  emit(c, j);
  return 0;
}

PipelineConfig pipeline_config(const RunConfig& c) {
  PipelineConfig pc;
  pc.seed = c.seed;
  pc.delta_kappa = c.delta_kappa;
  pc.c_prime = c.c_prime;
  pc.gaussian_retries = c.gaussian_retries;
  pc.sdp.eps_feas = c.eps_feas;
  pc.sdp.eps_psd = c.eps_psd;
  pc.sdp.max_rounds = c.max_rounds;
  return pc;
}

ordered_json diagnostics_json(const SStarDiagnostics& d) {
  ordered_json j;
  j["s_star"] = d.s_star;
  j["relaxed_bounds"] = d.relaxed_bounds;
  if (!d.sdp_error.empty()) j["sdp_error"] = d.sdp_error;
  j["sdp_objective"] = d.sdp_objective;
  j["triangle_rounds"] = d.triangle_rounds;
  ordered_json outs = ordered_json::array();
  for (const auto& o : d.outcomes) {
    ordered_json oj;
    oj["path"] = o.path;
    oj["outcome"] = o.outcome;
    oj["ratio"] = o.ratio;
    outs.push_back(std::move(oj));
  }
  j["path_outcomes"] = std::move(outs);
  j["best_ratio"] = d.best_ratio;
  return j;
}

int run_round(const RunConfig& c) {
  const Graph g = load_graph(c);
  if (c.embedding_path.empty()) throw UsageError("round needs --embedding FILE");
  if (c.s_star < 1) throw UsageError("round needs --s-star >= 1");
  const Embedding emb = read_embedding_file(c.embedding_path);
  if (emb.node_count() != g.n)
    throw std::runtime_error("embedding node count does not match the graph");
  const RoundOutcome out = round_embedding(g, emb, c.s_star, pipeline_config(c));

  ordered_json j;
  j["command"] = "round";
  j["config"] = config_json(c);
  j["s_star"] = c.s_star;
  j["diagnostics"] = diagnostics_json(out.diagnostics);
  if (out.best) {
    j["best"] = cut_json(*out.best);
    j["best_path"] = out.best_path;
  } else {
    j["best"] = nullptr;
  }
  emit(c, j);
  return out.best ? 0 : 2;
}

int run_pipeline(const RunConfig& c) {
  const Graph g = load_graph(c);
  const PipelineResult res = arv_pipeline(g, pipeline_config(c));
  ordered_json j;
  j["command"] = "pipeline";
  j["config"] = config_json(c);
  j["best"] = cut_json(res.best);
  j["winner_path"] = res.winner_path;
  j["winner_s_star"] = res.winner_s_star;
  j["reading_note"] = res.reading_note;
  ordered_json per = ordered_json::array();
  for (const auto& d : res.per_s_star) per.push_back(diagnostics_json(d));
  j["per_s_star"] = std::move(per);
  emit(c, j);
  return 0;
}

int run_harness(const RunConfig& c) {
  if (c.instance.empty()) throw UsageError("harness needs --instance kind:size");
  ScaledInstance inst = instance_from_spec(c.instance);
  const int n = inst.node_count();
  const int m = inst.embedding.dim();
  HarnessReport rep;

  if (c.harness_kind == "lr") {
    GaussianStream stream(c.seed, m);
    rep = lr_experiment(inst, c.samples, c.c_prime, stream);
  } else if (c.harness_kind == "matching") {
    GaussianStream stream(c.seed, m);
    rep = matching_experiment(inst, resolve_delta(c, n), c.samples, stream);
  } else if (c.harness_kind == "mu") {
    MetricView metric(inst.embedding);
    if (c.node < 0 || c.node >= n) throw UsageError("--node out of range");
    GaussianStream stream(c.seed, m);
    const double delta = resolve_delta(c, n);
    const MuEstimate est =
        estimate_mu(metric, c.node + 1, c.k, delta, c.samples, stream);
    rep.experiment = "mu";
    rep.seed = c.seed;
    rep.samples = c.samples;
    rep.aggregates["mu_hat"] = est.mu_hat;
    rep.aggregates["std_err"] = est.std_err;
    rep.aggregates["delta"] = delta;
    rep.aggregates["k"] = c.k;
    const double bound = 10.0 * std::sqrt(std::log(static_cast<double>(n))) *
                         std::sqrt(c.k * delta);
    Verdict v;
    v.name = "mu_upper_bound";
    v.observed = est.mu_hat;
    v.bound = bound;
    v.tolerance = "4 standard errors";
    v.pass = est.mu_hat <= bound + 4.0 * est.std_err;
    rep.verdicts.push_back(std::move(v));
  } else if (c.harness_kind == "concentration") {
    MetricView metric(inst.embedding);
    if (c.node < 0 || c.node >= n) throw UsageError("--node out of range");
    GaussianStream stream(c.seed, m);
    rep = concentration_check(metric, c.node + 1, c.k, resolve_delta(c, n),
                              c.samples, c.alphas, stream);
  } else {
    throw UsageError("harness kind must be lr|matching|mu|concentration");
  }
  rep.instance = c.instance;
  rep.seed = c.seed;

  if (!c.csv_path.empty()) {
    std::ostringstream csv;
    write_csv(rep, csv);
    write_text(c.csv_path, csv.str());
  }
  ordered_json j;
  j["command"] = "harness";
  j["config"] = config_json(c);
  j.update(harness_json(rep));
  emit(c, j);
  return 0;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"sparsest-cut relaxation, rounding and experiment toolkit",
               "sparsecut"};
  app.require_subcommand(1);
  app.fallthrough(false);

  auto add_common = [&](CLI::App* sub, bool needs_seed) {
    sub->add_option("--out", c.out_path, "output path (default stdout)");
    auto* seed =
        sub->add_option("--seed", c.seed, "seed for randomized work")
            ->check(CLI::NonNegativeNumber);
    if (needs_seed) seed->required();
    return seed;
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--graph", c.graph_path, "graph file (\"n m\" header)");
    sub->add_option("--gen", c.gen_spec, "generator spec kind:n[:p[:q]]");
  };

  auto* gen = app.add_subcommand("gen", "generate a graph file");
  gen->add_option("--gen", c.gen_spec, "generator spec kind:n[:p[:q]]")
      ->required();
  add_common(gen, false);

  auto* exact = app.add_subcommand("exact", "exhaustive sparsest cut oracle");
  add_input(exact);
  exact->add_option("--limit", c.oracle_limit, "max n for enumeration");
  add_common(exact, false);

  auto* solve = app.add_subcommand("solve", "solve the relaxation");
  add_input(solve);
  solve->add_option("--s-star", c.s_star, "cut size guess")->required();
  solve->add_option("--eps-feas", c.eps_feas, "feasibility tolerance");
  solve->add_option("--eps-psd", c.eps_psd, "PSD tolerance");
  solve->add_option("--max-rounds", c.max_rounds, "triangle rounds");
  solve->add_option("--emb-out", c.embedding_out,
                    "also write the factored embedding (JSON)");
  add_common(solve, false);

  auto* round = app.add_subcommand("round", "round a stored embedding");
  add_input(round);
  round->add_option("--embedding", c.embedding_path, "embedding JSON")
      ->required();
  round->add_option("--s-star", c.s_star, "cut size guess")->required();
  round->add_option("--delta-kappa", c.delta_kappa, "delta scale constant");
  round->add_option("--c-prime", c.c_prime, "side size constant");
  round->add_option("--retries", c.gaussian_retries, "Gaussian retries");
  add_common(round, true);

  auto* pipeline = app.add_subcommand("pipeline", "end-to-end approximation");
  add_input(pipeline);
  pipeline->add_option("--delta-kappa", c.delta_kappa, "delta scale constant");
  pipeline->add_option("--c-prime", c.c_prime, "side size constant");
  pipeline->add_option("--retries", c.gaussian_retries, "Gaussian retries");
  pipeline->add_option("--eps-feas", c.eps_feas, "feasibility tolerance");
  pipeline->add_option("--eps-psd", c.eps_psd, "PSD tolerance");
  pipeline->add_option("--max-rounds", c.max_rounds, "triangle rounds");
  add_common(pipeline, true);

  auto* harness = app.add_subcommand("harness", "Monte-Carlo experiments");
  harness->add_option("kind", c.harness_kind,
                      "lr | matching | mu | concentration")
      ->required();
  harness->add_option("--instance", c.instance,
                      "pm_e1:N | hypercube:D | point:N")
      ->required();
  harness->add_option("--samples", c.samples, "sample count");
  harness->add_option("--c-prime", c.c_prime, "side size constant");
  harness->add_option("--delta", c.delta, "delta (absolute)");
  harness->add_option("--delta-kappa", c.delta_kappa, "delta scale constant");
  harness->add_option("--node", c.node, "probe node");
  harness->add_option("--k", c.k, "neighborhood depth");
  harness->add_option("--alphas", c.alphas, "deviation thresholds");
  harness->add_option("--csv", c.csv_path, "per-sample CSV path");
  add_common(harness, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw CliExit(app.exit(e));
  }
  for (auto* sub : {gen, exact, solve, round, pipeline, harness})
    if (sub->parsed()) {
      c.command = sub->get_name();
      c.has_seed = sub->count("--seed") > 0;
    }
  return c;
}

int run(const RunConfig& c) {
  if (c.command == "gen") return run_gen(c);
  if (c.command == "exact") return run_exact(c);
  if (c.command == "solve") return run_solve(c);
  if (c.command == "round") return run_round(c);
  if (c.command == "pipeline") return run_pipeline(c);
  if (c.command == "harness") return run_harness(c);
  throw UsageError("unknown command: " + c.command);
}

}  // namespace sparsecut

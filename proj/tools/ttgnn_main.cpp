/* Copyright 2026 The ttgnn Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttgnn/experiment.hpp"
#include "ttgnn/initializer.hpp"
#include "ttgnn/partition.hpp"
#include "ttgnn/tt_io.hpp"

using namespace ttgnn;
using nlohmann::json;

namespace {

std::vector<index_t> parse_int_list(const std::string& csv) {
  std::vector<index_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoll(item));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
}

// RunConfig <- JSON (missing keys keep defaults).
void apply_json(RunConfig& c, const json& j) {
  if (j.contains("graph")) {
    const auto& g = j["graph"];
    if (g.contains("edge_path")) c.graph.edge_path = g["edge_path"].get<std::string>();
    if (g.contains("label_path")) c.graph.label_path = g["label_path"].get<std::string>();
    if (g.contains("num_nodes")) c.graph.num_nodes = g["num_nodes"].get<index_t>();
    if (g.contains("num_blocks")) c.graph.num_blocks = g["num_blocks"].get<index_t>();
    if (g.contains("p_in")) c.graph.p_in = g["p_in"].get<double>();
    if (g.contains("p_out")) c.graph.p_out = g["p_out"].get<double>();
  }
  if (j.contains("backend"))
    c.backend = j["backend"].get<std::string>() == "full" ? BackendKind::full : BackendKind::tt;
  if (j.contains("emb_dim")) c.emb_dim = j["emb_dim"].get<index_t>();
  if (j.contains("num_cores")) c.num_cores = j["num_cores"].get<index_t>();
  if (j.contains("rank")) c.rank = j["rank"].get<index_t>();
  if (j.contains("init")) c.init = parse_init_method(j["init"].get<std::string>());
  if (j.contains("gaussian_std")) c.gaussian_std = j["gaussian_std"].get<double>();
  if (j.contains("reorder")) c.reorder = j["reorder"].get<bool>();
  if (j.contains("branching")) c.branching = j["branching"].get<std::vector<index_t>>();
  if (j.contains("perm_level")) c.perm_level = parse_perm_level(j["perm_level"].get<std::string>());
  if (j.contains("layer_type")) c.layer_type = parse_layer_type(j["layer_type"].get<std::string>());
  if (j.contains("hidden_dim")) c.hidden_dim = j["hidden_dim"].get<index_t>();
  if (j.contains("num_layers")) c.num_layers = j["num_layers"].get<index_t>();
  if (j.contains("epochs")) c.epochs = j["epochs"].get<index_t>();
  if (j.contains("lr")) c.lr = j["lr"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
}

int cmd_sbm(index_t nodes, index_t blocks, double p_in, double p_out,
            std::uint64_t seed, const std::string& edges_out,
            const std::string& labels_out) {
  CsrGraph g = generate_sbm(nodes, blocks, p_in, p_out, seed);
  save_edge_list(g, edges_out);
  if (!labels_out.empty()) save_labels(g, labels_out);
  json stats{{"num_nodes", g.num_nodes},
             {"num_edges", g.num_arcs() / 2},
             {"num_blocks", blocks},
             {"seed", seed},
             {"edges_out", edges_out},
             {"labels_out", labels_out}};
  std::cout << stats.dump(2) << std::endl;
  return 0;
}

int cmd_partition(const std::string& graph_path, index_t parts,
                  const std::string& branching_csv, std::uint64_t seed,
                  const std::string& perm_out, bool random_baseline) {
  CsrGraph g = load_edge_list(graph_path);
  json stats{{"graph", graph_path}, {"num_nodes", g.num_nodes},
             {"num_edges", g.num_arcs() / 2}, {"seed", seed}};

  std::vector<index_t> branching;
  if (!branching_csv.empty()) branching = parse_int_list(branching_csv);
  else branching = {parts};

  PartitionHierarchy h = build_hierarchy(g, branching, seed);
  stats["branching"] = branching;
  stats["cut_per_level"] = hierarchy_cuts(g, h);

  const auto& leaf = h.assignment.back();
  const index_t k = h.parts_at_level(h.levels());
  std::vector<index_t> sizes(k, 0);
  for (index_t v = 0; v < g.num_nodes; ++v) sizes[leaf[v]]++;
  stats["leaf_parts"] = k;
  stats["max_part"] = *std::max_element(sizes.begin(), sizes.end());
  stats["min_part"] = *std::min_element(sizes.begin(), sizes.end());
  stats["balance"] = double(*std::max_element(sizes.begin(), sizes.end())) /
                     (double(g.num_nodes) / double(k));

  if (random_baseline)
    stats["random_baseline_cut"] = random_balanced_cut(g, k, 20, seed);

  if (!perm_out.empty()) {
    save_permutation(h.permutation, perm_out);
    stats["perm_out"] = perm_out;
  }
  std::cout << stats.dump(2) << std::endl;
  return 0;
}

int cmd_report(index_t nodes, index_t dim, index_t d, const std::string& ranks_csv,
               const std::string& row_csv, const std::string& col_csv,
               index_t ratio_dim) {
  std::vector<index_t> ranks = parse_int_list(ranks_csv);
  if (ranks.empty()) ranks = {16};
  json out;
  out["num_nodes"] = nodes;
  out["emb_dim"] = dim;
  json per_rank = json::array();
  for (index_t r : ranks) {
    std::vector<index_t> rank_list(d + 1, r);
    rank_list.front() = rank_list.back() = 1;
    TTConfig cfg = row_csv.empty()
                       ? plan_factorization(nodes, dim, d, rank_list)
                       : plan_factorization(nodes, dim, parse_int_list(row_csv),
                                            parse_int_list(col_csv), rank_list);
    json shapes = json::array();
    for (index_t k = 0; k < cfg.num_cores(); ++k) {
      auto s = cfg.core_shape(k);
      shapes.push_back({s[0], s[1], s[2], s[3]});
    }
    const index_t params = count_params(cfg);
    const index_t full_dim = ratio_dim > 0 ? ratio_dim : dim;
    const double ratio = double(nodes) * double(full_dim) / double(params);
    per_rank.push_back({{"rank", r},
                        {"row_factors", cfg.row_factors},
                        {"col_factors", cfg.col_factors},
                        {"core_shapes", shapes},
                        {"params", params},
                        {"compression_ratio", compression_ratio(cfg)},
                        {"memory_reduction", ratio},
                        {"memory_reduction_int", static_cast<index_t>(std::llround(ratio))}});
  }
  out["per_rank"] = per_rank;
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int cmd_train(const RunConfig& config, const std::string& metrics_out,
              const std::string& report_out, const std::string& cores_out) {
  std::cout << run_config_json(config) << std::endl;
  TrainState trained;
  RunResult result = run_single(config, &trained);
  if (!metrics_out.empty()) {
    write_metrics_csv(result, metrics_out);
    write_text(metrics_out + ".config.json", run_config_json(config) + "\n");
  }
  if (!report_out.empty()) {
    json j{{"config", json::parse(run_config_json(config))},
           {"embedding_params", result.embedding_params},
           {"compression", result.compression},
           {"seconds_per_epoch", result.seconds_per_epoch},
           {"final",
            {{"epoch", result.final.epoch},
             {"loss", result.final.loss},
             {"train_acc", result.final.train_acc},
             {"val_acc", result.final.val_acc},
             {"test_acc", result.final.test_acc}}}};
    write_text(report_out, j.dump(2) + "\n");
  }
  if (!cores_out.empty() && config.backend == BackendKind::tt)
    save_tt(trained.backend.tt(), cores_out);
  std::cout << "final test accuracy " << result.final.test_acc << " (loss "
            << result.final.loss << ")" << std::endl;
  return 0;
}

int cmd_bench(index_t nodes, index_t dim, const std::string& ranks_csv,
              index_t batch, index_t reps, std::uint64_t seed) {
  std::vector<index_t> ranks = parse_int_list(ranks_csv);
  if (ranks.empty()) ranks = {2, 4, 8};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<index_t> pick(0, nodes - 1);
  std::vector<index_t> indices(batch);
  for (auto& i : indices) i = pick(rng);
  std::normal_distribution<double> normal;
  MatrixRM upstream(batch, dim);
  for (index_t r = 0; r < batch; ++r)
    for (index_t c = 0; c < dim; ++c) upstream(r, c) = normal(rng);

  using clock = std::chrono::steady_clock;
  json rows = json::array();

  // Dense-table baseline: a plain gather.
  {
    MatrixRM table(nodes, dim);
    for (index_t i = 0; i < nodes; ++i)
      for (index_t j = 0; j < dim; ++j) table(i, j) = normal(rng);
    auto t0 = clock::now();
    double sink = 0;
    for (index_t rep = 0; rep < reps; ++rep) {
      MatrixRM out(batch, dim);
      for (index_t b = 0; b < batch; ++b) out.row(b) = table.row(indices[b]);
      sink += out(0, 0);
    }
    auto dt = std::chrono::duration<double>(clock::now() - t0).count();
    rows.push_back({{"backend", "full"},
                    {"params", nodes * dim},
                    {"lookup_rows_per_sec", double(batch * reps) / dt},
                    {"sink", sink}});
  }

  for (index_t r : ranks) {
    std::vector<index_t> rank_list{1, r, r, 1};
    TTConfig cfg = plan_factorization(nodes, dim, 3, rank_list);
    TTEmbedding emb = init_gaussian(cfg, {InitMethod::gaussian, seed, 0.1, {}});

    auto t0 = clock::now();
    double sink = 0;
    for (index_t rep = 0; rep < reps; ++rep) {
      MatrixRM out = lookup_batch(emb, indices);
      sink += out(0, 0);
    }
    const double fwd = std::chrono::duration<double>(clock::now() - t0).count();

    t0 = clock::now();
    for (index_t rep = 0; rep < reps; ++rep) {
      CoreGradients g = backward_lookup(emb, indices, upstream);
      sink += g.grads[0][0];
    }
    const double bwd = std::chrono::duration<double>(clock::now() - t0).count();

    rows.push_back({{"backend", "tt"},
                    {"rank", r},
                    {"params", count_params(cfg)},
                    {"lookup_rows_per_sec", double(batch * reps) / fwd},
                    {"backward_rows_per_sec", double(batch * reps) / bwd},
                    {"sink", sink}});
  }
  std::cout << json{{"nodes", nodes}, {"dim", dim}, {"batch", batch},
                    {"reps", reps}, {"results", rows}}
                   .dump(2)
            << std::endl;
  return 0;
}

int cmd_matrix(const std::string& config_path, const std::string& csv_out,
               const std::string& json_out, index_t threads) {
  std::ifstream is(config_path);
  if (!is) throw std::runtime_error("cannot open " + config_path);
  json j = json::parse(is);

  MatrixSpec spec;
  if (j.contains("base")) apply_json(spec.base, j["base"]);
  if (j.contains("backends"))
    for (const auto& b : j["backends"])
      spec.backends.push_back(b.get<std::string>() == "full" ? BackendKind::full
                                                             : BackendKind::tt);
  if (j.contains("ranks")) spec.ranks = j["ranks"].get<std::vector<index_t>>();
  if (j.contains("inits"))
    for (const auto& i : j["inits"]) spec.inits.push_back(parse_init_method(i.get<std::string>()));
  if (j.contains("reorder"))
    for (const auto& r : j["reorder"]) spec.reorder_options.push_back(r.get<bool>());
  if (j.contains("perm_levels"))
    for (const auto& p : j["perm_levels"])
      spec.perm_levels.push_back(parse_perm_level(p.get<std::string>()));
  if (j.contains("seeds")) spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  spec.threads = threads > 0 ? threads : (j.contains("threads") ? j["threads"].get<index_t>() : 1);

  MatrixReport report = run_experiment_matrix(spec);
  if (!csv_out.empty()) write_report_csv(report, csv_out);
  if (!json_out.empty()) write_report_json(report, json_out);

  index_t failed = 0;
  for (const auto& cell : report.cells) {
    std::cout << cell.key << ": mean test acc " << cell.mean_test_acc << " +- "
              << cell.std_test_acc << " (" << cell.runs.size() << " runs, "
              << cell.errors.size() << " failures, params " << cell.embedding_params
              << ")" << std::endl;
    failed += static_cast<index_t>(cell.errors.size());
    for (const auto& e : cell.errors) std::cerr << "  failed: " << e << std::endl;
  }
  if (failed > 0) {
    std::cerr << failed << " run(s) failed" << std::endl;
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor-train compressed GNN embeddings"};
  app.require_subcommand(1);

  // sbm
  auto* sbm = app.add_subcommand("sbm", "generate a stochastic block model fixture");
  index_t sbm_nodes = 1000, sbm_blocks = 10;
  double sbm_pin = 0.08, sbm_pout = 0.002;
  std::uint64_t sbm_seed = 1;
  std::string sbm_edges = "sbm_edges.txt", sbm_labels = "sbm_labels.txt";
  sbm->add_option("--nodes", sbm_nodes);
  sbm->add_option("--blocks", sbm_blocks);
  sbm->add_option("--p-in", sbm_pin);
  sbm->add_option("--p-out", sbm_pout);
  sbm->add_option("--seed", sbm_seed);
  sbm->add_option("--edges-out", sbm_edges);
  sbm->add_option("--labels-out", sbm_labels);

  // partition
  auto* part = app.add_subcommand("partition", "partition a graph and emit a permutation");
  std::string part_graph, part_branching, part_perm_out;
  index_t part_k = 2;
  std::uint64_t part_seed = 1;
  bool part_baseline = false;
  part->add_option("--graph", part_graph)->required();
  part->add_option("--parts", part_k);
  part->add_option("--branching", part_branching, "comma-separated per-level factors");
  part->add_option("--seed", part_seed);
  part->add_option("--perm-out", part_perm_out);
  part->add_flag("--random-baseline", part_baseline,
                 "also report the random balanced-cut baseline");

  // report
  auto* rep = app.add_subcommand("report", "factorization and compression report");
  index_t rep_nodes = 0, rep_dim = 0, rep_d = 3, rep_ratio_dim = 0;
  std::string rep_ranks = "16,32,64", rep_rows, rep_cols;
  rep->add_option("--nodes", rep_nodes)->required();
  rep->add_option("--dim", rep_dim)->required();
  rep->add_option("--d", rep_d);
  rep->add_option("--ranks", rep_ranks);
  rep->add_option("--row-factors", rep_rows);
  rep->add_option("--col-factors", rep_cols);
  rep->add_option("--ratio-dim", rep_ratio_dim,
                  "full-table dim used for the memory-reduction column");

  // train
  auto* tr = app.add_subcommand("train", "train a GNN with a full or TT embedding");
  std::string tr_config, tr_metrics = "metrics.csv", tr_report, tr_cores;
  RunConfig tr_base;
  std::string tr_backend, tr_init, tr_perm, tr_layer, tr_branching;
  tr->add_option("--config", tr_config, "JSON config file (flags override)");
  tr->add_option("--graph", tr_base.graph.edge_path);
  tr->add_option("--labels", tr_base.graph.label_path);
  tr->add_option("--nodes", tr_base.graph.num_nodes);
  tr->add_option("--blocks", tr_base.graph.num_blocks);
  tr->add_option("--p-in", tr_base.graph.p_in);
  tr->add_option("--p-out", tr_base.graph.p_out);
  tr->add_option("--backend", tr_backend, "full|tt");
  tr->add_option("--dim", tr_base.emb_dim);
  tr->add_option("--d", tr_base.num_cores);
  tr->add_option("--rank", tr_base.rank);
  tr->add_option("--init", tr_init, "gaussian|ortho-core|decomp-ortho");
  tr->add_option("--gaussian-std", tr_base.gaussian_std);
  auto* tr_no_reorder = tr->add_flag("--no-reorder", "skip the hierarchy reorder");
  tr->add_option("--branching", tr_branching);
  tr->add_option("--perm-level", tr_perm, "none|first|second");
  tr->add_option("--layer", tr_layer, "graphsage-mean|gcn");
  tr->add_option("--hidden", tr_base.hidden_dim);
  tr->add_option("--layers", tr_base.num_layers);
  tr->add_option("--epochs", tr_base.epochs);
  tr->add_option("--lr", tr_base.lr);
  tr->add_option("--seed", tr_base.seed);
  tr->add_option("--metrics-out", tr_metrics);
  tr->add_option("--report-out", tr_report);
  tr->add_option("--save-cores", tr_cores);

  // bench
  auto* bench = app.add_subcommand("bench", "lookup/backward throughput");
  index_t bench_nodes = 100000, bench_dim = 64, bench_batch = 4096, bench_reps = 20;
  std::string bench_ranks = "2,4,8";
  std::uint64_t bench_seed = 1;
  bench->add_option("--nodes", bench_nodes);
  bench->add_option("--dim", bench_dim);
  bench->add_option("--ranks", bench_ranks);
  bench->add_option("--batch", bench_batch);
  bench->add_option("--reps", bench_reps);
  bench->add_option("--seed", bench_seed);

  // matrix
  auto* mx = app.add_subcommand("matrix", "run an experiment grid from a JSON spec");
  std::string mx_config, mx_csv = "matrix.csv", mx_json = "matrix.json.out";
  index_t mx_threads = 0;
  mx->add_option("--config", mx_config)->required();
  mx->add_option("--csv-out", mx_csv);
  mx->add_option("--json-out", mx_json);
  mx->add_option("--threads", mx_threads);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sbm->parsed())
      return cmd_sbm(sbm_nodes, sbm_blocks, sbm_pin, sbm_pout, sbm_seed, sbm_edges,
                     sbm_labels);
    if (part->parsed())
      return cmd_partition(part_graph, part_k, part_branching, part_seed, part_perm_out,
                           part_baseline);
    if (rep->parsed())
      return cmd_report(rep_nodes, rep_dim, rep_d, rep_ranks, rep_rows, rep_cols,
                        rep_ratio_dim);
    if (tr->parsed()) {
      RunConfig config;
      if (!tr_config.empty()) {
        std::ifstream is(tr_config);
        if (!is) throw std::runtime_error("cannot open " + tr_config);
        apply_json(config, json::parse(is));
      }
      // Flags override file values.
      auto merge = [&](auto& dst, const auto& src, const char* flag) {
        if (tr->count(flag) > 0) dst = src;
      };
      merge(config.graph.edge_path, tr_base.graph.edge_path, "--graph");
      merge(config.graph.label_path, tr_base.graph.label_path, "--labels");
      merge(config.graph.num_nodes, tr_base.graph.num_nodes, "--nodes");
      merge(config.graph.num_blocks, tr_base.graph.num_blocks, "--blocks");
      merge(config.graph.p_in, tr_base.graph.p_in, "--p-in");
      merge(config.graph.p_out, tr_base.graph.p_out, "--p-out");
      merge(config.emb_dim, tr_base.emb_dim, "--dim");
      merge(config.num_cores, tr_base.num_cores, "--d");
      merge(config.rank, tr_base.rank, "--rank");
      merge(config.gaussian_std, tr_base.gaussian_std, "--gaussian-std");
      merge(config.hidden_dim, tr_base.hidden_dim, "--hidden");
      merge(config.num_layers, tr_base.num_layers, "--layers");
      merge(config.epochs, tr_base.epochs, "--epochs");
      merge(config.lr, tr_base.lr, "--lr");
      merge(config.seed, tr_base.seed, "--seed");
      if (!tr_backend.empty())
        config.backend = tr_backend == "full" ? BackendKind::full : BackendKind::tt;
      if (!tr_init.empty()) config.init = parse_init_method(tr_init);
      if (!tr_perm.empty()) config.perm_level = parse_perm_level(tr_perm);
      if (!tr_layer.empty()) config.layer_type = parse_layer_type(tr_layer);
      if (!tr_branching.empty()) config.branching = parse_int_list(tr_branching);
      if (tr_no_reorder->count() > 0) config.reorder = false;
      return cmd_train(config, tr_metrics, tr_report, tr_cores);
    }
    if (bench->parsed())
      return cmd_bench(bench_nodes, bench_dim, bench_ranks, bench_batch, bench_reps,
                       bench_seed);
    if (mx->parsed()) return cmd_matrix(mx_config, mx_csv, mx_json, mx_threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

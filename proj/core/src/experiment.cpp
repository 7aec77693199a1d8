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
#include "ttgnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace ttgnn {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<index_t> RunConfig::rank_list() const {
  std::vector<index_t> ranks(num_cores + 1, rank);
  ranks.front() = ranks.back() = 1;
  return ranks;
}

namespace {

// Salts for the independent random streams of one run.
enum : std::uint64_t { kGraphSalt, kShuffleSalt, kPartitionSalt, kPermSalt, kInitSalt, kTrainSalt };

TTConfig tt_config_for(const RunConfig& config, index_t num_nodes) {
  return plan_factorization(num_nodes, config.emb_dim, config.num_cores,
                            config.rank_list());
}

}  // namespace

CsrGraph prepare_graph(const RunConfig& config) {
  CsrGraph graph;
  if (!config.graph.edge_path.empty()) {
    graph = load_edge_list(config.graph.edge_path);
    if (!config.graph.label_path.empty()) load_labels(graph, config.graph.label_path);
    if (graph.has_labels() && !graph.has_masks())
      assign_splits(graph, mix_seed(config.seed, kGraphSalt));
  } else {
    graph = generate_sbm(config.graph.num_nodes, config.graph.num_blocks,
                         config.graph.p_in, config.graph.p_out,
                         mix_seed(config.seed, kGraphSalt));
  }

  // Break any correlation between node ids and topology before studying
  // the effect of partition-based reordering.
  graph = shuffle_nodes(graph, mix_seed(config.seed, kShuffleSalt)).first;

  if (config.reorder) {
    std::vector<index_t> branching = config.branching;
    if (branching.empty()) {
      TTConfig tt = tt_config_for(config, graph.num_nodes);
      branching.assign(tt.row_factors.begin(), tt.row_factors.end() - 1);
    }
    PartitionHierarchy hierarchy =
        build_hierarchy(graph, branching, mix_seed(config.seed, kPartitionSalt));
    std::vector<index_t> perm =
        permute_level(hierarchy, config.perm_level, mix_seed(config.seed, kPermSalt));
    graph = apply_permutation(graph, perm);
  }
  return graph;
}

RunResult run_single(const RunConfig& config, TrainState* trained) {
  CsrGraph graph = prepare_graph(config);

  EmbeddingBackend backend = [&] {
    if (config.backend == BackendKind::full)
      return EmbeddingBackend::full_table(graph.num_nodes, config.emb_dim,
                                          mix_seed(config.seed, kInitSalt),
                                          config.gaussian_std, OptKind::adam, config.lr);
    TTConfig tt_cfg = tt_config_for(config, graph.num_nodes);
    InitSpec init{config.init, mix_seed(config.seed, kInitSalt), config.gaussian_std, {}};
    return EmbeddingBackend::tensor_train(init_embedding(tt_cfg, init), OptKind::adam,
                                          config.lr);
  }();

  TrainConfig tc;
  tc.layer_type = config.layer_type;
  tc.hidden_dim = config.hidden_dim;
  tc.num_layers = config.num_layers;
  tc.epochs = config.epochs;
  tc.lr = config.lr;
  tc.seed = mix_seed(config.seed, kTrainSalt);

  RunResult result;
  result.config = config;
  result.embedding_params = backend.param_count();
  result.compression = double(graph.num_nodes) * double(config.emb_dim) /
                       double(result.embedding_params);

  TrainState state = train(graph, std::move(backend), tc);
  result.final = state.final_metrics();
  result.seconds_per_epoch = state.seconds_per_epoch;
  if (trained) {
    result.history = state.history;
    *trained = std::move(state);
  } else {
    result.history = std::move(state.history);
  }
  return result;
}

namespace {

std::string cell_key(const RunConfig& c) {
  std::ostringstream os;
  os << "backend=" << (c.backend == BackendKind::tt ? "tt" : "full");
  if (c.backend == BackendKind::tt)
    os << ",rank=" << c.rank << ",init=" << to_string(c.init);
  os << ",reorder=" << (c.reorder ? 1 : 0) << ",perm=" << to_string(c.perm_level);
  return os.str();
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

}  // namespace

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / double(xs.size() - 1));
}

double pooled_std(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() + b.size() < 3) return 0.0;
  const double sa = sample_std(a), sb = sample_std(b);
  const double dof = double(a.size() + b.size() - 2);
  return std::sqrt((sa * sa * double(a.size() - 1) + sb * sb * double(b.size() - 1)) / dof);
}

bool MatrixReport::all_ok() const {
  for (const auto& cell : cells)
    if (!cell.errors.empty() || cell.runs.empty()) return false;
  return true;
}

MatrixReport run_experiment_matrix(const MatrixSpec& spec) {
  auto backends = spec.backends.empty() ? std::vector<BackendKind>{spec.base.backend}
                                        : spec.backends;
  auto ranks = spec.ranks.empty() ? std::vector<index_t>{spec.base.rank} : spec.ranks;
  auto inits = spec.inits.empty() ? std::vector<InitMethod>{spec.base.init} : spec.inits;
  auto reorders = spec.reorder_options.empty() ? std::vector<bool>{spec.base.reorder}
                                               : spec.reorder_options;
  auto perms = spec.perm_levels.empty() ? std::vector<PermLevel>{spec.base.perm_level}
                                        : spec.perm_levels;
  auto seeds = spec.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : spec.seeds;

  std::vector<RunConfig> cell_configs;
  for (BackendKind backend : backends)
    for (index_t rank : ranks)
      for (InitMethod init : inits)
        for (bool reorder : reorders)
          for (PermLevel perm : perms) {
            RunConfig c = spec.base;
            c.backend = backend;
            c.rank = rank;
            c.init = init;
            c.reorder = reorder;
            c.perm_level = reorder ? perm : PermLevel::none;
            cell_configs.push_back(c);
          }
  // Collapse duplicate cells (e.g. full backend repeated across ranks).
  {
    std::vector<RunConfig> unique;
    std::vector<std::string> seen;
    for (auto& c : cell_configs) {
      std::string k = cell_key(c);
      if (std::find(seen.begin(), seen.end(), k) == seen.end()) {
        seen.push_back(std::move(k));
        unique.push_back(c);
      }
    }
    cell_configs = std::move(unique);
  }

  struct Task {
    std::size_t cell;
    RunConfig config;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cell_configs.size(); ++i)
    for (std::uint64_t seed : seeds) {
      RunConfig c = cell_configs[i];
      c.seed = seed;
      tasks.push_back({i, std::move(c)});
    }

  std::vector<std::optional<RunResult>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      try {
        results[t] = run_single(tasks[t].config);
      } catch (const std::exception& e) {
        errors[t] = cell_key(tasks[t].config) + ",seed=" +
                    std::to_string(tasks[t].config.seed) + ": " + e.what();
      }
    }
  };
  const index_t n_threads = std::max<index_t>(1, spec.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (index_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  MatrixReport report;
  report.cells.resize(cell_configs.size());
  for (std::size_t i = 0; i < cell_configs.size(); ++i) {
    report.cells[i].rep_config = cell_configs[i];
    report.cells[i].key = cell_key(cell_configs[i]);
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& cell = report.cells[tasks[t].cell];
    if (results[t]) cell.runs.push_back(std::move(*results[t]));
    else cell.errors.push_back(errors[t]);
  }
  for (auto& cell : report.cells) {
    std::vector<double> test, val, tr, loss, spe;
    for (const auto& r : cell.runs) {
      test.push_back(r.final.test_acc);
      val.push_back(r.final.val_acc);
      tr.push_back(r.final.train_acc);
      loss.push_back(r.final.loss);
      spe.push_back(r.seconds_per_epoch);
    }
    cell.mean_test_acc = mean_of(test);
    cell.std_test_acc = sample_std(test);
    cell.mean_val_acc = mean_of(val);
    cell.mean_train_acc = mean_of(tr);
    cell.mean_loss = mean_of(loss);
    cell.mean_seconds_per_epoch = mean_of(spe);
    cell.embedding_params = cell.runs.empty() ? 0 : cell.runs.front().embedding_params;
  }
  return report;
}

namespace {

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j{
      {"backend", c.backend == BackendKind::tt ? "tt" : "full"},
      {"emb_dim", c.emb_dim},
      {"num_cores", c.num_cores},
      {"rank", c.rank},
      {"init", to_string(c.init)},
      {"gaussian_std", c.gaussian_std},
      {"reorder", c.reorder},
      {"branching", c.branching},
      {"perm_level", to_string(c.perm_level)},
      {"layer_type", to_string(c.layer_type)},
      {"hidden_dim", c.hidden_dim},
      {"num_layers", c.num_layers},
      {"epochs", c.epochs},
      {"lr", c.lr},
      {"seed", c.seed},
  };
  if (!c.graph.edge_path.empty()) {
    j["graph"] = {{"edge_path", c.graph.edge_path}, {"label_path", c.graph.label_path}};
  } else {
    j["graph"] = {{"num_nodes", c.graph.num_nodes},
                  {"num_blocks", c.graph.num_blocks},
                  {"p_in", c.graph.p_in},
                  {"p_out", c.graph.p_out}};
  }
  return j;
}

}  // namespace

std::string run_config_json(const RunConfig& config) {
  return config_to_json(config).dump(2);
}

void write_report_csv(const MatrixReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "backend,rank,init,reorder,perm_level,runs,failures,embedding_params,"
        "mean_test_acc,std_test_acc,mean_val_acc,mean_train_acc,mean_loss,"
        "sec_per_epoch\n";
  for (const auto& cell : report.cells) {
    const auto& c = cell.rep_config;
    os << (c.backend == BackendKind::tt ? "tt" : "full") << ','
       << (c.backend == BackendKind::tt ? std::to_string(c.rank) : "") << ','
       << (c.backend == BackendKind::tt ? to_string(c.init) : "") << ','
       << (c.reorder ? 1 : 0) << ',' << to_string(c.perm_level) << ','
       << cell.runs.size() << ',' << cell.errors.size() << ','
       << cell.embedding_params << ',' << cell.mean_test_acc << ','
       << cell.std_test_acc << ',' << cell.mean_val_acc << ','
       << cell.mean_train_acc << ',' << cell.mean_loss << ','
       << cell.mean_seconds_per_epoch << "\n";
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

void write_report_json(const MatrixReport& report, const std::string& path) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : report.cells) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : cell.runs) {
      nlohmann::json history = nlohmann::json::array();
      for (const auto& m : r.history)
        history.push_back({{"epoch", m.epoch},
                           {"loss", m.loss},
                           {"train_acc", m.train_acc},
                           {"val_acc", m.val_acc},
                           {"test_acc", m.test_acc}});
      runs.push_back({{"config", config_to_json(r.config)},
                      {"embedding_params", r.embedding_params},
                      {"compression", r.compression},
                      {"seconds_per_epoch", r.seconds_per_epoch},
                      {"final", {{"loss", r.final.loss},
                                 {"train_acc", r.final.train_acc},
                                 {"val_acc", r.final.val_acc},
                                 {"test_acc", r.final.test_acc}}},
                      {"history", history}});
    }
    cells.push_back({{"key", cell.key},
                     {"mean_test_acc", cell.mean_test_acc},
                     {"std_test_acc", cell.std_test_acc},
                     {"mean_val_acc", cell.mean_val_acc},
                     {"mean_train_acc", cell.mean_train_acc},
                     {"mean_loss", cell.mean_loss},
                     {"sec_per_epoch", cell.mean_seconds_per_epoch},
                     {"embedding_params", cell.embedding_params},
                     {"errors", cell.errors},
                     {"runs", runs}});
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << nlohmann::json{{"cells", cells}}.dump(2) << "\n";
}

void write_metrics_csv(const RunResult& result, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "epoch,loss,train_acc,val_acc,test_acc\n";
  for (const auto& m : result.history)
    os << m.epoch << ',' << m.loss << ',' << m.train_acc << ',' << m.val_acc << ','
       << m.test_acc << "\n";
  if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace ttgnn

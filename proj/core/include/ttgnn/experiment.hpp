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
#ifndef TTGNN_EXPERIMENT_HPP
#define TTGNN_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "ttgnn/gnn.hpp"
#include "ttgnn/partition.hpp"

namespace ttgnn {

/// Deterministic sub-seed derivation (splitmix-style) so that one run
/// seed fans out into independent graph/init/training streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Desk-scale benchmark graph: a planted-community SBM, or an edge-list
/// file with labels.
struct GraphSpec {
  index_t num_nodes = 1000;
  index_t num_blocks = 10;
  double p_in = 0.08;
  double p_out = 0.002;
  std::string edge_path;   // when set, load instead of generating
  std::string label_path;
};

/// One end-to-end training run: graph prep (pre-shuffle, optional
/// hierarchical reorder, optional block permutation), backend setup,
/// full-batch training.
struct RunConfig {
  GraphSpec graph;
  BackendKind backend = BackendKind::tt;
  index_t emb_dim = 16;
  index_t num_cores = 3;
  index_t rank = 4;
  InitMethod init = InitMethod::ortho_core;
  double gaussian_std = 0.3;
  bool reorder = true;                // hierarchy-based relabeling
  std::vector<index_t> branching;     // empty: first d-1 row factors
  PermLevel perm_level = PermLevel::none;
  LayerType layer_type = LayerType::graphsage_mean;
  index_t hidden_dim = 16;
  index_t num_layers = 2;
  index_t epochs = 300;
  double lr = 1e-3;
  std::uint64_t seed = 1;

  /// Uniform rank list (1, rank, ..., rank, 1) for num_cores cores.
  std::vector<index_t> rank_list() const;
};

struct RunResult {
  RunConfig config;
  index_t embedding_params = 0;
  double compression = 0.0;
  EpochMetrics final;
  double seconds_per_epoch = 0.0;
  std::vector<EpochMetrics> history;
};

/// Prepared graph (before backend/training): pre-shuffled, optionally
/// reordered by the partition hierarchy and block-permuted.
CsrGraph prepare_graph(const RunConfig& config);

/// When `trained` is non-null it receives the final model and backend.
RunResult run_single(const RunConfig& config, TrainState* trained = nullptr);

/// Grid axes over a base config; empty axes keep the base value.
struct MatrixSpec {
  RunConfig base;
  std::vector<BackendKind> backends;
  std::vector<index_t> ranks;
  std::vector<InitMethod> inits;
  std::vector<bool> reorder_options;
  std::vector<PermLevel> perm_levels;
  std::vector<std::uint64_t> seeds;
  index_t threads = 1;
};

struct CellSummary {
  RunConfig rep_config;  // config of the first seed in the cell
  std::string key;
  std::vector<RunResult> runs;  // successful runs
  std::vector<std::string> errors;
  double mean_test_acc = 0.0;
  double std_test_acc = 0.0;
  double mean_val_acc = 0.0;
  double mean_train_acc = 0.0;
  double mean_loss = 0.0;
  double mean_seconds_per_epoch = 0.0;
  index_t embedding_params = 0;
};

struct MatrixReport {
  std::vector<CellSummary> cells;
  bool all_ok() const;
};

/// Runs every (cell, seed) combination; failed runs are recorded in the
/// cell and the matrix continues. Cells may run concurrently.
MatrixReport run_experiment_matrix(const MatrixSpec& spec);

void write_report_csv(const MatrixReport& report, const std::string& path);
void write_report_json(const MatrixReport& report, const std::string& path);
void write_metrics_csv(const RunResult& result, const std::string& path);
std::string run_config_json(const RunConfig& config);

double sample_std(const std::vector<double>& xs);
double pooled_std(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ttgnn

#endif  // TTGNN_EXPERIMENT_HPP

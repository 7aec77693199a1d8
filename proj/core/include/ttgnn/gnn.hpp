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
#ifndef TTGNN_GNN_HPP
#define TTGNN_GNN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ttgnn/autodiff.hpp"
#include "ttgnn/graph.hpp"
#include "ttgnn/initializer.hpp"
#include "ttgnn/tt_embedding.hpp"

namespace ttgnn {

enum class LayerType { graphsage_mean, gcn };
enum class BackendKind { full, tt };

LayerType parse_layer_type(const std::string& name);
std::string to_string(LayerType t);

/// Trainable node-embedding source: either a dense M x N table or a
/// tensor-train parameterization. Both serve lookups of dimension
/// emb_dim and consume row gradients through one optimizer step.
class EmbeddingBackend {
 public:
  static EmbeddingBackend full_table(index_t num_nodes, index_t emb_dim,
                                     std::uint64_t seed, double init_std,
                                     OptKind opt, double lr);
  static EmbeddingBackend full_table_from(MatrixRM table, OptKind opt, double lr);
  static EmbeddingBackend tensor_train(TTEmbedding emb, OptKind opt, double lr);

  BackendKind kind() const { return kind_; }
  index_t num_nodes() const;
  index_t emb_dim() const;
  index_t param_count() const;

  /// Embeddings for all nodes (num_nodes x emb_dim).
  MatrixRM lookup_all() const;
  MatrixRM lookup(std::span<const index_t> indices) const;

  /// One optimizer step from dLoss/dH0 over all rows.
  void apply_gradients(const MatrixRM& grad_rows);

  const TTEmbedding& tt() const;
  const MatrixRM& table() const;

 private:
  BackendKind kind_ = BackendKind::full;
  // full
  MatrixRM table_;
  std::vector<double> m_, v_;
  index_t step_ = 0;
  // tt
  TTEmbedding tt_;
  OptimizerState tt_opt_;
  OptKind opt_kind_ = OptKind::adam;
  double lr_ = 1e-3;
};

/// One message-passing layer. GraphSage-mean keeps separate self and
/// neighbor transforms; GCN uses a single weight over the symmetric
/// normalized aggregation with self-loops. No biases.
struct LayerWeights {
  MatrixRM w_self;   // out x in (sage) / out x in (gcn, the only weight)
  MatrixRM w_neigh;  // out x in (sage only, empty for gcn)
};

struct GnnModel {
  LayerType layer_type = LayerType::graphsage_mean;
  index_t num_layers = 2;
  index_t hidden_dim = 16;
  index_t in_dim = 0;
  index_t out_dim = 0;  // number of classes
  std::vector<LayerWeights> layers;

  static GnnModel make(LayerType type, index_t in_dim, index_t hidden_dim,
                       index_t out_dim, index_t num_layers, std::uint64_t seed);
  index_t param_count() const;
};

/// Per-class logits for every node (num_nodes x out_dim), from embeddings
/// `h0`. Deterministic for fixed weights. Isolated nodes aggregate a zero
/// neighbor mean.
MatrixRM forward(const GnnModel& model, const CsrGraph& graph, const MatrixRM& h0);

/// Logits restricted to `node_set` rows (full-batch compute underneath).
MatrixRM forward(const GnnModel& model, const CsrGraph& graph, const MatrixRM& h0,
                 std::span<const index_t> node_set);

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
  index_t count = 0;
};

enum class Split { train, val, test };

/// Accuracy and mean cross-entropy over the split mask. Pure.
EvalResult evaluate(const MatrixRM& logits, const CsrGraph& graph, Split split);

struct TrainConfig {
  LayerType layer_type = LayerType::graphsage_mean;
  index_t hidden_dim = 16;
  index_t num_layers = 2;
  index_t epochs = 300;
  double lr = 1e-3;
  OptKind opt = OptKind::adam;
  std::uint64_t seed = 0;  // layer-weight init
  index_t log_every = 0;   // 0: silent
};

struct EpochMetrics {
  index_t epoch = 0;
  double loss = 0.0;  // train split
  double train_acc = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
};

struct TrainState {
  GnnModel model;
  EmbeddingBackend backend;
  std::vector<EpochMetrics> history;  // history[0] is the initial state
  double seconds_per_epoch = 0.0;

  const EpochMetrics& final_metrics() const { return history.back(); }
};

/// Full-batch training: forward, softmax cross-entropy on the train mask,
/// backward through the layers and into the embedding backend, optimizer
/// step. Metrics are recorded every epoch, starting with the untrained
/// state. Throws on divergence (non-finite loss).
TrainState train(const CsrGraph& graph, EmbeddingBackend backend,
                 const TrainConfig& config);

}  // namespace ttgnn

#endif  // TTGNN_GNN_HPP

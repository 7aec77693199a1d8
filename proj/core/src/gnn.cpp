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
#include "ttgnn/gnn.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ttgnn {

LayerType parse_layer_type(const std::string& name) {
  if (name == "graphsage-mean" || name == "graphsage_mean" || name == "sage")
    return LayerType::graphsage_mean;
  if (name == "gcn") return LayerType::gcn;
  throw std::invalid_argument("unknown layer type: " + name);
}

std::string to_string(LayerType t) {
  return t == LayerType::graphsage_mean ? "graphsage-mean" : "gcn";
}

// ---------------------------------------------------------------------------
// EmbeddingBackend

EmbeddingBackend EmbeddingBackend::full_table(index_t num_nodes, index_t emb_dim,
                                              std::uint64_t seed, double init_std,
                                              OptKind opt, double lr) {
  MatrixRM table(num_nodes, emb_dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (index_t i = 0; i < num_nodes; ++i)
    for (index_t j = 0; j < emb_dim; ++j) table(i, j) = init_std * normal(rng);
  return full_table_from(std::move(table), opt, lr);
}

EmbeddingBackend EmbeddingBackend::full_table_from(MatrixRM table, OptKind opt,
                                                   double lr) {
  EmbeddingBackend b;
  b.kind_ = BackendKind::full;
  b.table_ = std::move(table);
  b.opt_kind_ = opt;
  b.lr_ = lr;
  if (opt == OptKind::adam) {
    b.m_.assign(b.table_.size(), 0.0);
    b.v_.assign(b.table_.size(), 0.0);
  }
  return b;
}

EmbeddingBackend EmbeddingBackend::tensor_train(TTEmbedding emb, OptKind opt,
                                                double lr) {
  emb.validate();
  EmbeddingBackend b;
  b.kind_ = BackendKind::tt;
  b.tt_opt_ = OptimizerState::make(emb.config, opt, lr);
  b.tt_ = std::move(emb);
  b.opt_kind_ = opt;
  b.lr_ = lr;
  return b;
}

index_t EmbeddingBackend::num_nodes() const {
  return kind_ == BackendKind::full ? table_.rows() : tt_.config.num_nodes;
}

index_t EmbeddingBackend::emb_dim() const {
  return kind_ == BackendKind::full ? table_.cols() : tt_.config.emb_dim;
}

index_t EmbeddingBackend::param_count() const {
  return kind_ == BackendKind::full ? table_.size() : count_params(tt_.config);
}

MatrixRM EmbeddingBackend::lookup_all() const {
  if (kind_ == BackendKind::full) return table_;
  std::vector<index_t> all(tt_.config.num_nodes);
  std::iota(all.begin(), all.end(), 0);
  return lookup_batch(tt_, all);
}

MatrixRM EmbeddingBackend::lookup(std::span<const index_t> indices) const {
  if (kind_ == BackendKind::tt) return lookup_batch(tt_, indices);
  MatrixRM out(indices.size(), table_.cols());
  for (std::size_t b = 0; b < indices.size(); ++b) {
    if (indices[b] < 0 || indices[b] >= table_.rows())
      throw std::out_of_range("lookup: index " + std::to_string(indices[b]) +
                              " at batch position " + std::to_string(b) + " out of range");
    out.row(b) = table_.row(indices[b]);
  }
  return out;
}

void EmbeddingBackend::apply_gradients(const MatrixRM& grad_rows) {
  if (grad_rows.rows() != num_nodes() || grad_rows.cols() != emb_dim())
    throw std::invalid_argument("apply_gradients: bad gradient shape");
  if (kind_ == BackendKind::full) {
    if (!grad_rows.allFinite())
      throw std::invalid_argument("apply_gradients: non-finite table gradient");
    ++step_;
    if (opt_kind_ == OptKind::sgd) {
      table_ -= lr_ * grad_rows;
    } else {
      adam_step({table_.data(), static_cast<std::size_t>(table_.size())},
                {grad_rows.data(), static_cast<std::size_t>(grad_rows.size())},
                m_, v_, step_, lr_, 0.9, 0.999, 1e-8);
    }
    return;
  }
  std::vector<index_t> all(tt_.config.num_nodes);
  std::iota(all.begin(), all.end(), 0);
  CoreGradients grads = backward_lookup(tt_, all, grad_rows);
  apply_update(tt_, grads, tt_opt_);
}

const TTEmbedding& EmbeddingBackend::tt() const {
  if (kind_ != BackendKind::tt) throw std::logic_error("backend is not tensor-train");
  return tt_;
}

const MatrixRM& EmbeddingBackend::table() const {
  if (kind_ != BackendKind::full) throw std::logic_error("backend is not a full table");
  return table_;
}

// ---------------------------------------------------------------------------
// Model

namespace {

MatrixRM uniform_fan_in(index_t out_dim, index_t in_dim, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(double(in_dim));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  MatrixRM w(out_dim, in_dim);
  for (index_t i = 0; i < out_dim; ++i)
    for (index_t j = 0; j < in_dim; ++j) w(i, j) = uniform(rng);
  return w;
}

// Mean over neighbors; rows of `x` are node features. Isolated nodes get
// a zero row.
MatrixRM neighbor_mean(const CsrGraph& g, const MatrixRM& x) {
  MatrixRM out = MatrixRM::Zero(x.rows(), x.cols());
  for (index_t v = 0; v < g.num_nodes; ++v) {
    const auto nbrs = g.neighbors_of(v);
    if (nbrs.empty()) continue;
    for (index_t u : nbrs) out.row(v) += x.row(u);
    out.row(v) /= double(nbrs.size());
  }
  return out;
}

// Transpose of the mean aggregation: scatter row v scaled by 1/deg(v)
// to its neighbors.
MatrixRM neighbor_mean_transpose(const CsrGraph& g, const MatrixRM& x) {
  MatrixRM out = MatrixRM::Zero(x.rows(), x.cols());
  for (index_t v = 0; v < g.num_nodes; ++v) {
    const auto nbrs = g.neighbors_of(v);
    if (nbrs.empty()) continue;
    const double inv = 1.0 / double(nbrs.size());
    for (index_t u : nbrs) out.row(u) += inv * x.row(v);
  }
  return out;
}

// Symmetric-normalized aggregation with self-loops:
// out(v) = sum_{u in N(v) + v} x(u) / sqrt(deg~(u) deg~(v)), deg~ = deg + 1.
// Symmetric, so it is its own transpose.
MatrixRM gcn_aggregate(const CsrGraph& g, const MatrixRM& x) {
  Eigen::VectorXd inv_sqrt(g.num_nodes);
  for (index_t v = 0; v < g.num_nodes; ++v)
    inv_sqrt[v] = 1.0 / std::sqrt(double(g.degree(v)) + 1.0);
  MatrixRM out = MatrixRM::Zero(x.rows(), x.cols());
  for (index_t v = 0; v < g.num_nodes; ++v) {
    out.row(v) = inv_sqrt[v] * inv_sqrt[v] * x.row(v);  // self loop
    for (index_t u : g.neighbors_of(v)) out.row(v) += inv_sqrt[v] * inv_sqrt[u] * x.row(u);
  }
  return out;
}

struct LayerCache {
  MatrixRM input;  // H_{l}
  MatrixRM agg;    // aggregated input
  MatrixRM pre;    // pre-activation Z
};

MatrixRM forward_cached(const GnnModel& model, const CsrGraph& graph,
                        const MatrixRM& h0, std::vector<LayerCache>* caches) {
  MatrixRM h = h0;
  for (index_t l = 0; l < model.num_layers; ++l) {
    const auto& w = model.layers[l];
    MatrixRM agg = model.layer_type == LayerType::graphsage_mean
                       ? neighbor_mean(graph, h)
                       : gcn_aggregate(graph, h);
    MatrixRM z = model.layer_type == LayerType::graphsage_mean
                     ? (h * w.w_self.transpose() + agg * w.w_neigh.transpose()).eval()
                     : (agg * w.w_self.transpose()).eval();
    if (caches) caches->push_back({std::move(h), std::move(agg), z});
    h = l + 1 < model.num_layers ? z.cwiseMax(0.0) : z;
  }
  return h;
}

double softmax_xent_backward(const MatrixRM& logits, const CsrGraph& graph,
                             const std::vector<std::uint8_t>& mask, MatrixRM* dlogits) {
  index_t count = 0;
  double loss = 0.0;
  if (dlogits) *dlogits = MatrixRM::Zero(logits.rows(), logits.cols());
  for (index_t v = 0; v < graph.num_nodes; ++v) {
    if (!mask[v]) continue;
    ++count;
    const auto row = logits.row(v);
    const double mx = row.maxCoeff();
    const double lse = mx + std::log((row.array() - mx).exp().sum());
    loss += lse - row[graph.labels[v]];
    if (dlogits) {
      dlogits->row(v) = (row.array() - lse).exp();
      (*dlogits)(v, graph.labels[v]) -= 1.0;
    }
  }
  if (count == 0) throw std::invalid_argument("empty split");
  if (dlogits) *dlogits /= double(count);
  return loss / double(count);
}

}  // namespace

GnnModel GnnModel::make(LayerType type, index_t in_dim, index_t hidden_dim,
                        index_t out_dim, index_t num_layers, std::uint64_t seed) {
  if (num_layers < 1) throw std::invalid_argument("GnnModel: need at least one layer");
  GnnModel model;
  model.layer_type = type;
  model.num_layers = num_layers;
  model.hidden_dim = hidden_dim;
  model.in_dim = in_dim;
  model.out_dim = out_dim;
  std::mt19937_64 rng(seed ^ 0x6e6eULL);
  for (index_t l = 0; l < num_layers; ++l) {
    const index_t in = l == 0 ? in_dim : hidden_dim;
    const index_t out = l + 1 == num_layers ? out_dim : hidden_dim;
    LayerWeights w;
    w.w_self = uniform_fan_in(out, in, rng);
    if (type == LayerType::graphsage_mean) w.w_neigh = uniform_fan_in(out, in, rng);
    model.layers.push_back(std::move(w));
  }
  return model;
}

index_t GnnModel::param_count() const {
  index_t total = 0;
  for (const auto& w : layers) total += w.w_self.size() + w.w_neigh.size();
  return total;
}

MatrixRM forward(const GnnModel& model, const CsrGraph& graph, const MatrixRM& h0) {
  if (h0.rows() != graph.num_nodes)
    throw std::invalid_argument("forward: h0 rows != num_nodes");
  if (h0.cols() != model.in_dim)
    throw std::invalid_argument("forward: h0 cols != model input dim");
  return forward_cached(model, graph, h0, nullptr);
}

MatrixRM forward(const GnnModel& model, const CsrGraph& graph, const MatrixRM& h0,
                 std::span<const index_t> node_set) {
  MatrixRM all = forward(model, graph, h0);
  MatrixRM out(node_set.size(), all.cols());
  for (std::size_t i = 0; i < node_set.size(); ++i) {
    if (node_set[i] < 0 || node_set[i] >= graph.num_nodes)
      throw std::out_of_range("forward: node set entry out of range");
    out.row(i) = all.row(node_set[i]);
  }
  return out;
}

EvalResult evaluate(const MatrixRM& logits, const CsrGraph& graph, Split split) {
  if (!graph.has_labels() || !graph.has_masks())
    throw std::invalid_argument("evaluate: graph lacks labels or masks");
  const auto& mask = split == Split::train  ? graph.train_mask
                     : split == Split::val ? graph.val_mask
                                           : graph.test_mask;
  EvalResult r;
  double loss = 0.0;
  for (index_t v = 0; v < graph.num_nodes; ++v) {
    if (!mask[v]) continue;
    ++r.count;
    const auto row = logits.row(v);
    Eigen::Index argmax;
    row.maxCoeff(&argmax);
    if (static_cast<std::int32_t>(argmax) == graph.labels[v]) r.accuracy += 1.0;
    const double mx = row.maxCoeff();
    loss += mx + std::log((row.array() - mx).exp().sum()) - row[graph.labels[v]];
  }
  if (r.count == 0) throw std::invalid_argument("evaluate: empty split");
  r.accuracy /= double(r.count);
  r.loss = loss / double(r.count);
  return r;
}

TrainState train(const CsrGraph& graph, EmbeddingBackend backend,
                 const TrainConfig& config) {
  if (!graph.has_labels() || !graph.has_masks())
    throw std::invalid_argument("train: graph needs labels and masks");
  if (backend.num_nodes() != graph.num_nodes)
    throw std::invalid_argument("train: backend size != graph size");
  const index_t num_classes =
      *std::max_element(graph.labels.begin(), graph.labels.end()) + 1;

  TrainState state{
      GnnModel::make(config.layer_type, backend.emb_dim(), config.hidden_dim,
                     num_classes, config.num_layers, config.seed),
      std::move(backend),
      {},
      0.0};
  GnnModel& model = state.model;

  // Adam moments for the layer weights.
  struct Moments { std::vector<double> m, v; };
  std::vector<std::array<Moments, 2>> moments(model.num_layers);
  for (index_t l = 0; l < model.num_layers; ++l) {
    moments[l][0].m.assign(model.layers[l].w_self.size(), 0.0);
    moments[l][0].v.assign(model.layers[l].w_self.size(), 0.0);
    moments[l][1].m.assign(model.layers[l].w_neigh.size(), 0.0);
    moments[l][1].v.assign(model.layers[l].w_neigh.size(), 0.0);
  }
  index_t weight_step = 0;

  auto record = [&](index_t epoch, const MatrixRM& logits) {
    EpochMetrics m;
    m.epoch = epoch;
    auto tr = evaluate(logits, graph, Split::train);
    m.loss = tr.loss;
    m.train_acc = tr.accuracy;
    m.val_acc = evaluate(logits, graph, Split::val).accuracy;
    m.test_acc = evaluate(logits, graph, Split::test).accuracy;
    state.history.push_back(m);
    if (config.log_every > 0 && epoch % config.log_every == 0)
      std::cerr << "epoch " << epoch << " loss " << m.loss << " train " << m.train_acc
                << " val " << m.val_acc << " test " << m.test_acc << "\n";
  };

  record(0, forward_cached(model, graph, state.backend.lookup_all(), nullptr));

  const auto t0 = std::chrono::steady_clock::now();
  for (index_t epoch = 1; epoch <= config.epochs; ++epoch) {
    MatrixRM h0 = state.backend.lookup_all();
    std::vector<LayerCache> caches;
    caches.reserve(model.num_layers);
    MatrixRM logits = forward_cached(model, graph, h0, &caches);

    MatrixRM dz;
    const double loss = softmax_xent_backward(logits, graph, graph.train_mask, &dz);
    if (!std::isfinite(loss))
      throw std::runtime_error("train: loss diverged (non-finite) at epoch " +
                               std::to_string(epoch));

    ++weight_step;
    for (index_t l = model.num_layers - 1; l >= 0; --l) {
      auto& w = model.layers[l];
      const auto& cache = caches[l];
      if (l < model.num_layers - 1)  // ReLU mask of this layer's output
        dz = dz.cwiseProduct((cache.pre.array() > 0.0).cast<double>().matrix());

      MatrixRM d_wself, d_wneigh, dh;
      if (model.layer_type == LayerType::graphsage_mean) {
        d_wself = dz.transpose() * cache.input;
        d_wneigh = dz.transpose() * cache.agg;
        dh = dz * w.w_self + neighbor_mean_transpose(graph, dz * w.w_neigh);
      } else {
        d_wself = dz.transpose() * cache.agg;
        dh = gcn_aggregate(graph, dz * w.w_self);
      }

      if (config.opt == OptKind::sgd) {
        w.w_self -= config.lr * d_wself;
        if (model.layer_type == LayerType::graphsage_mean)
          w.w_neigh -= config.lr * d_wneigh;
      } else {
        adam_step({w.w_self.data(), static_cast<std::size_t>(w.w_self.size())},
                  {d_wself.data(), static_cast<std::size_t>(d_wself.size())},
                  moments[l][0].m, moments[l][0].v, weight_step, config.lr, 0.9, 0.999, 1e-8);
        if (model.layer_type == LayerType::graphsage_mean)
          adam_step({w.w_neigh.data(), static_cast<std::size_t>(w.w_neigh.size())},
                    {d_wneigh.data(), static_cast<std::size_t>(d_wneigh.size())},
                    moments[l][1].m, moments[l][1].v, weight_step, config.lr, 0.9, 0.999, 1e-8);
      }
      dz = std::move(dh);
    }
    state.backend.apply_gradients(dz);

    record(epoch, forward_cached(model, graph, state.backend.lookup_all(), nullptr));
  }
  const auto t1 = std::chrono::steady_clock::now();
  if (config.epochs > 0)
    state.seconds_per_epoch =
        std::chrono::duration<double>(t1 - t0).count() / double(config.epochs);
  return state;
}

}  // namespace ttgnn

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
#ifndef TTGNN_AUTODIFF_HPP
#define TTGNN_AUTODIFF_HPP

#include <span>
#include <string>
#include <vector>

#include "ttgnn/tt_embedding.hpp"

namespace ttgnn {

/// Dense per-core gradients. Every looked-up row touches every core, so
/// gradients are inherently dense in the cores; contributions from
/// duplicate indices accumulate additively.
struct CoreGradients {
  std::vector<std::vector<double>> grads;  // grads[k] shaped like core k
  index_t batch_count = 0;

  static CoreGradients zeros(const TTConfig& config);
};

/// Gradient of a scalar loss with respect to every core, given the
/// upstream gradients (batch x emb_dim) of the looked-up rows. Columns
/// beyond emb_dim (padding) receive zero upstream gradient.
CoreGradients backward_lookup(const TTEmbedding& emb,
                              std::span<const index_t> indices,
                              const MatrixRM& upstream);

enum class OptKind { sgd, adam };

struct OptimizerState {
  OptKind kind = OptKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  index_t step = 0;
  std::vector<std::vector<double>> m;  // first moments, adam only
  std::vector<std::vector<double>> v;  // second moments, adam only

  static OptimizerState make(const TTConfig& config, OptKind kind, double lr);
};

/// In-place parameter update. Rejects gradients containing NaN/Inf with
/// a diagnostic identifying the core.
void apply_update(TTEmbedding& emb, const CoreGradients& grads, OptimizerState& opt);

/// Shared scalar-buffer Adam step (bias-corrected), reused for GNN layer
/// weights and dense embedding tables.
void adam_step(std::span<double> param, std::span<const double> grad,
               std::span<double> m, std::span<double> v, index_t step,
               double lr, double beta1, double beta2, double eps);

}  // namespace ttgnn

#endif  // TTGNN_AUTODIFF_HPP

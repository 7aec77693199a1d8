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
#include "ttgnn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ttgnn {

namespace {

// Contiguous copy of the slice unfolding G_k(:, i_k, :, :) as
// R_{k-1} x (n_k * R_k).
MatrixRM slice_unfolding_copy(const TTEmbedding& emb, index_t k, index_t ik) {
  auto s = emb.config.core_shape(k);
  const index_t inner = s[2] * s[3];
  const index_t outer = s[1] * inner;
  MatrixRM out(s[0], inner);
  const double* base = emb.core_data(k) + ik * inner;
  for (index_t r = 0; r < s[0]; ++r)
    for (index_t c = 0; c < inner; ++c) out(r, c) = base[r * outer + c];
  return out;
}

}  // namespace

CoreGradients CoreGradients::zeros(const TTConfig& config) {
  CoreGradients g;
  g.grads.resize(config.num_cores());
  for (index_t k = 0; k < config.num_cores(); ++k)
    g.grads[k].assign(config.core_size(k), 0.0);
  return g;
}

CoreGradients backward_lookup(const TTEmbedding& emb,
                              std::span<const index_t> indices,
                              const MatrixRM& upstream) {
  const TTConfig& cfg = emb.config;
  const index_t d = cfg.num_cores();
  if (upstream.rows() != static_cast<index_t>(indices.size()))
    throw std::invalid_argument("backward_lookup: upstream rows != index count");
  if (upstream.cols() != cfg.emb_dim)
    throw std::invalid_argument("backward_lookup: upstream cols != emb_dim");
  for (std::size_t b = 0; b < indices.size(); ++b)
    if (indices[b] < 0 || indices[b] >= cfg.num_nodes)
      throw std::out_of_range("backward_lookup: index " + std::to_string(indices[b]) +
                              " at batch position " + std::to_string(b) + " out of range");

  CoreGradients out = CoreGradients::zeros(cfg);
  out.batch_count = static_cast<index_t>(indices.size());

  // Column-factor products to the left/right of each core.
  std::vector<index_t> left_cols(d), right_cols(d);
  {
    index_t acc = 1;
    for (index_t k = 0; k < d; ++k) { left_cols[k] = acc; acc *= cfg.col_factors[k]; }
    acc = 1;
    for (index_t k = d - 1; k >= 0; --k) { right_cols[k] = acc; acc *= cfg.col_factors[k]; }
  }

  std::vector<double> padded(cfg.padded_cols());
  std::vector<MatrixRM> unf(d), left(d), right(d);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    RowCoordinate coord = index_to_coordinate(cfg, indices[b]);
    for (index_t k = 0; k < d; ++k) unf[k] = slice_unfolding_copy(emb, k, coord.parts[k]);

    // left[k]: (prod_{p<k} n_p) x R_{k-1}, the chain product before core k.
    left[0] = MatrixRM::Ones(1, 1);
    for (index_t k = 0; k + 1 < d; ++k) {
      MatrixRM prod = left[k] * unf[k];  // (left_cols x n_k*R_k)
      left[k + 1] = Eigen::Map<MatrixRM>(prod.data(), left_cols[k + 1], cfg.ranks[k + 1]);
    }
    // right[k]: R_k x (prod_{p>k} n_p), the chain product after core k.
    right[d - 1] = MatrixRM::Ones(1, 1);
    for (index_t k = d - 1; k > 0; --k) {
      Eigen::Map<MatrixRM> tall(unf[k].data(), cfg.ranks[k] * cfg.col_factors[k],
                                cfg.ranks[k + 1]);
      MatrixRM prod = tall * right[k];  // (R_{k-1}*n_k x right_cols)
      right[k - 1] = Eigen::Map<MatrixRM>(prod.data(), cfg.ranks[k],
                                          cfg.col_factors[k] * right_cols[k]);
    }

    std::fill(padded.begin(), padded.end(), 0.0);
    for (index_t j = 0; j < cfg.emb_dim; ++j) padded[j] = upstream(b, j);

    for (index_t k = 0; k < d; ++k) {
      const index_t n = cfg.col_factors[k];
      const index_t r_prev = cfg.ranks[k];
      const index_t r_next = cfg.ranks[k + 1];
      const index_t ik = coord.parts[k];
      double* grad = out.grads[k].data();
      for (index_t j = 0; j < n; ++j) {
        // Upstream reshaped (left_cols, n_k, right_cols), sliced at j.
        Eigen::Map<const MatrixRM, Eigen::Unaligned, Eigen::OuterStride<>> u_slice(
            padded.data() + j * right_cols[k], left_cols[k], right_cols[k],
            Eigen::OuterStride<>(n * right_cols[k]));
        MatrixRM contrib = left[k].transpose() * u_slice * right[k].transpose();
        for (index_t r = 0; r < r_prev; ++r)
          for (index_t s = 0; s < r_next; ++s)
            grad[((r * cfg.row_factors[k] + ik) * n + j) * r_next + s] += contrib(r, s);
      }
    }
  }
  return out;
}

OptimizerState OptimizerState::make(const TTConfig& config, OptKind kind, double lr) {
  OptimizerState opt;
  opt.kind = kind;
  opt.learning_rate = lr;
  if (kind == OptKind::adam) {
    opt.m.resize(config.num_cores());
    opt.v.resize(config.num_cores());
    for (index_t k = 0; k < config.num_cores(); ++k) {
      opt.m[k].assign(config.core_size(k), 0.0);
      opt.v[k].assign(config.core_size(k), 0.0);
    }
  }
  return opt;
}

void adam_step(std::span<double> param, std::span<const double> grad,
               std::span<double> m, std::span<double> v, index_t step,
               double lr, double beta1, double beta2, double eps) {
  const double bc1 = 1.0 - std::pow(beta1, double(step));
  const double bc2 = 1.0 - std::pow(beta2, double(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    param[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

void apply_update(TTEmbedding& emb, const CoreGradients& grads, OptimizerState& opt) {
  const index_t d = emb.config.num_cores();
  if (static_cast<index_t>(grads.grads.size()) != d)
    throw std::invalid_argument("apply_update: gradient core count mismatch");
  for (index_t k = 0; k < d; ++k) {
    if (grads.grads[k].size() != emb.cores[k].size())
      throw std::invalid_argument("apply_update: gradient shape mismatch at core " +
                                  std::to_string(k));
    for (double g : grads.grads[k])
      if (!std::isfinite(g))
        throw std::invalid_argument("apply_update: non-finite gradient in core " +
                                    std::to_string(k) + "; update rejected");
  }

  opt.step += 1;
  for (index_t k = 0; k < d; ++k) {
    auto& core = emb.cores[k];
    const auto& g = grads.grads[k];
    if (opt.kind == OptKind::sgd) {
      for (std::size_t i = 0; i < core.size(); ++i)
        core[i] -= opt.learning_rate * g[i];
    } else {
      adam_step(core, g, opt.m[k], opt.v[k], opt.step,
                opt.learning_rate, opt.beta1, opt.beta2, opt.epsilon);
    }
  }
}

}  // namespace ttgnn

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
#include "ttgnn/tt_embedding.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace ttgnn {

namespace {

using ConstMap = Eigen::Map<const MatrixRM, Eigen::Unaligned, Eigen::OuterStride<>>;

// Unfolding of the slice G_k(:, i_k, :, :) as an R_{k-1} x (n_k * R_k)
// matrix. The slice is strided in the flat core: consecutive r are
// m_k*n_k*R_k apart, the n_k*R_k block for one r is contiguous.
ConstMap slice_unfolding(const TTEmbedding& emb, index_t k, index_t ik) {
  auto s = emb.config.core_shape(k);
  const index_t inner = s[2] * s[3];           // n_k * R_k
  const index_t outer = s[1] * inner;          // m_k * n_k * R_k
  return ConstMap(emb.core_data(k) + ik * inner, s[0], inner,
                  Eigen::OuterStride<>(outer));
}

void reconstruct_padded_into(const TTEmbedding& emb, index_t row, double* out) {
  const TTConfig& cfg = emb.config;
  const index_t d = cfg.num_cores();
  RowCoordinate coord = index_to_coordinate(cfg, row);

  // Running product, reshaped to (prod_{p<=k} n_p) x R_k between steps.
  // Row-major storage makes the reshape a reinterpretation. Intermediates
  // can be larger than the final row when ranks exceed trailing factors.
  index_t cap = 0;
  {
    index_t cols = 1;
    for (index_t k = 0; k < d; ++k) {
      cols *= cfg.col_factors[k];
      cap = std::max(cap, cols * cfg.ranks[k + 1]);
    }
  }
  std::vector<double> buf(cap);
  std::vector<double> next(cap);

  auto first = slice_unfolding(emb, 0, coord.parts[0]);  // 1 x (n_1 * R_1)
  Eigen::Map<MatrixRM>(buf.data(), 1, first.cols()) = first;

  index_t cols_done = cfg.col_factors[0];
  for (index_t k = 1; k < d; ++k) {
    auto unf = slice_unfolding(emb, k, coord.parts[k]);  // R_{k-1} x (n_k * R_k)
    Eigen::Map<const MatrixRM> cur(buf.data(), cols_done, cfg.ranks[k]);
    Eigen::Map<MatrixRM> out_map(next.data(), cols_done, unf.cols());
    out_map.noalias() = cur * unf;
    cols_done *= cfg.col_factors[k];
    std::swap(buf, next);
  }
  std::copy(buf.begin(), buf.begin() + cfg.padded_cols(), out);
}

}  // namespace

TTEmbedding TTEmbedding::zeros(const TTConfig& config) {
  config.validate();
  TTEmbedding emb;
  emb.config = config;
  emb.cores.resize(config.num_cores());
  for (index_t k = 0; k < config.num_cores(); ++k)
    emb.cores[k].assign(config.core_size(k), 0.0);
  return emb;
}

void TTEmbedding::validate() const {
  config.validate();
  if (static_cast<index_t>(cores.size()) != config.num_cores())
    throw std::invalid_argument("TTEmbedding: wrong number of cores");
  for (index_t k = 0; k < config.num_cores(); ++k)
    if (static_cast<index_t>(cores[k].size()) != config.core_size(k))
      throw std::invalid_argument("TTEmbedding: core " + std::to_string(k) +
                                  " storage size mismatch");
}

std::vector<double> reconstruct_row_padded(const TTEmbedding& emb, index_t row) {
  if (row < 0 || row >= emb.config.num_nodes)
    throw std::out_of_range("reconstruct_row: index " + std::to_string(row) +
                            " out of [0, " + std::to_string(emb.config.num_nodes) + ")");
  std::vector<double> out(emb.config.padded_cols());
  reconstruct_padded_into(emb, row, out.data());
  return out;
}

std::vector<double> reconstruct_row(const TTEmbedding& emb, index_t row) {
  std::vector<double> padded = reconstruct_row_padded(emb, row);
  padded.resize(emb.config.emb_dim);
  return padded;
}

MatrixRM lookup_batch(const TTEmbedding& emb, std::span<const index_t> indices) {
  const index_t n = emb.config.emb_dim;
  for (std::size_t b = 0; b < indices.size(); ++b) {
    if (indices[b] < 0 || indices[b] >= emb.config.num_nodes)
      throw std::out_of_range("lookup_batch: index " + std::to_string(indices[b]) +
                              " at batch position " + std::to_string(b) +
                              " out of [0, " + std::to_string(emb.config.num_nodes) + ")");
  }
  MatrixRM out(indices.size(), n);
  std::vector<double> padded(emb.config.padded_cols());
  for (std::size_t b = 0; b < indices.size(); ++b) {
    reconstruct_padded_into(emb, indices[b], padded.data());
    for (index_t j = 0; j < n; ++j) out(b, j) = padded[j];
  }
  return out;
}

Eigen::MatrixXd materialize(const TTEmbedding& emb, index_t guard) {
  const index_t rows = emb.config.padded_rows();
  const index_t cols = emb.config.padded_cols();
  if (rows * cols > guard)
    throw std::invalid_argument("materialize: " + std::to_string(rows * cols) +
                                " entries exceed guard " + std::to_string(guard));
  Eigen::MatrixXd table(rows, cols);
  std::vector<double> padded(cols);
  for (index_t i = 0; i < rows; ++i) {
    reconstruct_padded_into(emb, i, padded.data());
    for (index_t j = 0; j < cols; ++j) table(i, j) = padded[j];
  }
  return table;
}

}  // namespace ttgnn

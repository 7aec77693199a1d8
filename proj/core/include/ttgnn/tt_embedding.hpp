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
#ifndef TTGNN_TT_EMBEDDING_HPP
#define TTGNN_TT_EMBEDDING_HPP

#include <Eigen/Core>
#include <span>
#include <vector>

#include "ttgnn/tt_config.hpp"

namespace ttgnn {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Trainable tensor-train parameterization of an M x N embedding table.
/// Core k is stored flat, row-major over (R_{k-1}, m_k, n_k, R_k).
struct TTEmbedding {
  TTConfig config;
  std::vector<std::vector<double>> cores;

  double* core_data(index_t k) { return cores[k].data(); }
  const double* core_data(index_t k) const { return cores[k].data(); }

  /// All cores zero-filled.
  static TTEmbedding zeros(const TTConfig& config);

  /// Throws std::invalid_argument if core storage does not match config.
  void validate() const;
};

/// Row i of the logical table, truncated to the served emb_dim columns.
/// Computed with d-1 small matrix products over the per-core slices at
/// the mixed-radix coordinate of i.
std::vector<double> reconstruct_row(const TTEmbedding& emb, index_t row);

/// Row i over all prod(n) padded columns (test and verification paths).
std::vector<double> reconstruct_row_padded(const TTEmbedding& emb, index_t row);

/// Batched reconstruction; output row b corresponds to indices[b].
/// Duplicate indices are allowed. Any out-of-range index fails the whole
/// batch, reporting the offending position.
MatrixRM lookup_batch(const TTEmbedding& emb, std::span<const index_t> indices);

/// Full padded table prod(m) x prod(n). Guarded against materializing
/// more than `guard` entries (default 1e7).
Eigen::MatrixXd materialize(const TTEmbedding& emb, index_t guard = 10'000'000);

}  // namespace ttgnn

#endif  // TTGNN_TT_EMBEDDING_HPP

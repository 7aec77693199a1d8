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
#ifndef TTGNN_TT_CONFIG_HPP
#define TTGNN_TT_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ttgnn {

using index_t = std::int64_t;

/// Factorization plan for a tensor-train matrix: an M x N table is
/// represented by d four-way cores, core k of shape
/// (rank[k-1], row_factor[k], col_factor[k], rank[k]).
///
/// prod(row_factors) >= num_nodes and prod(col_factors) >= emb_dim; the
/// excess rows/columns are zero-padding that is never served.
struct TTConfig {
  index_t num_nodes = 0;  // M, logical rows
  index_t emb_dim = 0;    // N, logical columns
  std::vector<index_t> row_factors;  // m_1..m_d
  std::vector<index_t> col_factors;  // n_1..n_d
  std::vector<index_t> ranks;        // R_0..R_d, R_0 = R_d = 1

  index_t num_cores() const { return static_cast<index_t>(row_factors.size()); }
  index_t padded_rows() const;  // prod(m)
  index_t padded_cols() const;  // prod(n)

  /// (R_{k-1}, m_k, n_k, R_k) for 0-based core index k.
  std::array<index_t, 4> core_shape(index_t k) const;
  index_t core_size(index_t k) const;

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;

  bool operator==(const TTConfig&) const = default;
};

/// Per-core row coordinate (i_1..i_d), the mixed-radix digits of a flat
/// row index with radices (m_1..m_d), i_1 most significant.
struct RowCoordinate {
  std::vector<index_t> parts;

  bool operator==(const RowCoordinate&) const = default;
};

/// Builds a TTConfig by factoring M and N into d near-equal factors,
/// padding each dimension upward minimally when it has no balanced
/// factorization. `ranks` is the full list R_0..R_d with R_0 = R_d = 1.
///
/// With `ortho_friendly` (default), row factors are ordered ascending and
/// column factors descending, so the largest m and the smallest n come
/// last; this maximizes feasibility of the orthogonal core initializer.
TTConfig plan_factorization(index_t num_nodes, index_t emb_dim, index_t d,
                            const std::vector<index_t>& ranks,
                            bool ortho_friendly = true);

/// Same plan but with caller-supplied factors (e.g. to reproduce a
/// published decomposition). Factors are used verbatim, no reordering.
TTConfig plan_factorization(index_t num_nodes, index_t emb_dim,
                            std::vector<index_t> row_factors,
                            std::vector<index_t> col_factors,
                            const std::vector<index_t>& ranks);

/// Factors `value` (padded upward minimally if needed) into `d` near-equal
/// integers, ascending. Deterministic.
std::vector<index_t> balanced_factors(index_t value, index_t d);

RowCoordinate index_to_coordinate(const TTConfig& config, index_t row);
index_t coordinate_to_index(const TTConfig& config, const RowCoordinate& coord);

/// Exact number of trainable entries: sum_k R_{k-1} * m_k * n_k * R_k.
index_t count_params(const TTConfig& config);

/// (M * N) / count_params, as a real.
double compression_ratio(const TTConfig& config);

std::string to_string(const TTConfig& config);

}  // namespace ttgnn

#endif  // TTGNN_TT_CONFIG_HPP

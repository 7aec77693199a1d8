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
#ifndef TTGNN_INITIALIZER_HPP
#define TTGNN_INITIALIZER_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "ttgnn/tt_embedding.hpp"

namespace ttgnn {

enum class InitMethod { gaussian, ortho_core, decomp_ortho };

InitMethod parse_init_method(const std::string& name);
std::string to_string(InitMethod m);

/// Seed fully determines the output for a fixed method and config.
struct InitSpec {
  InitMethod method = InitMethod::ortho_core;
  std::uint64_t seed = 0;
  double gaussian_std = 0.1;
  /// Target alpha for W^T W = alpha I; unset means "whatever the
  /// construction yields" (1 for exactly orthonormal slice vectors).
  std::optional<double> target_scale;
};

/// Raised when a core cannot host the required orthonormal family, i.e.
/// n_k * R_{k-1} > m_k * R_k.
class InfeasibleRanksError : public std::runtime_error {
 public:
  InfeasibleRanksError(index_t core, index_t needed, index_t available);
  index_t core_index;   // 0-based offending core
  index_t num_vectors;  // n_k * R_{k-1}
  index_t vector_dim;   // m_k * R_k
};

/// i.i.d. normal(0, gaussian_std^2) entries in every core.
TTEmbedding init_gaussian(const TTConfig& config, const InitSpec& spec);

/// Per-core orthonormal slice construction: for core k, draws
/// n_k * R_{k-1} Gaussian vectors of length m_k * R_k, orthonormalizes
/// them, and writes vector (r, j) into the slice G_k(r, :, j, :).
/// The induced logical table then satisfies W^T W = alpha I.
/// Throws InfeasibleRanksError when some core is too small.
TTEmbedding init_ortho_core(const TTConfig& config, const InitSpec& spec);

/// Draws a random column-orthogonal prod(m) x prod(n) matrix (QR of a
/// Gaussian matrix, sign-corrected) and decomposes it into TT cores by
/// successive truncated SVDs. Exact when the ranks are not binding.
TTEmbedding init_decomp_ortho(const TTConfig& config, const InitSpec& spec);

/// Dispatch on spec.method.
TTEmbedding init_embedding(const TTConfig& config, const InitSpec& spec);

struct Claim1Report {
  double alpha = 0.0;          // mean diagonal of W^T W
  double max_deviation = 0.0;  // max |W^T W - alpha I|
  bool pass = false;           // max_deviation <= tol * alpha
};

/// Materializes the padded table and checks W^T W = alpha I.
Claim1Report verify_claim1(const TTEmbedding& emb, double tol,
                           index_t guard = 10'000'000);

/// Decomposes a padded prod(m) x prod(n) table into TT cores with the
/// config's ranks by successive truncated SVDs (rank R_k at step k).
/// When `step_truncation_sq` is non-null, it receives the sum of squared
/// discarded singular values per step.
TTEmbedding ttm_decompose(const Eigen::MatrixXd& table, const TTConfig& config,
                          std::vector<double>* step_truncation_sq = nullptr);

/// Random matrix with orthonormal columns (rows >= cols), Haar-like via
/// QR of an i.i.d. Gaussian matrix with the R diagonal made positive.
Eigen::MatrixXd random_orthonormal_columns(index_t rows, index_t cols,
                                           std::mt19937_64& rng);

}  // namespace ttgnn

#endif  // TTGNN_INITIALIZER_HPP

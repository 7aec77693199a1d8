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
#include "ttgnn/initializer.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace ttgnn {

InitMethod parse_init_method(const std::string& name) {
  if (name == "gaussian") return InitMethod::gaussian;
  if (name == "ortho-core" || name == "ortho_core") return InitMethod::ortho_core;
  if (name == "decomp-ortho" || name == "decomp_ortho") return InitMethod::decomp_ortho;
  throw std::invalid_argument("unknown init method: " + name);
}

std::string to_string(InitMethod m) {
  switch (m) {
    case InitMethod::gaussian: return "gaussian";
    case InitMethod::ortho_core: return "ortho-core";
    case InitMethod::decomp_ortho: return "decomp-ortho";
  }
  return "?";
}

InfeasibleRanksError::InfeasibleRanksError(index_t core, index_t needed, index_t available)
    : std::runtime_error("ortho-core init infeasible at core " + std::to_string(core) +
                         ": needs " + std::to_string(needed) +
                         " orthonormal vectors of length " + std::to_string(available) +
                         " (require n_k*R_{k-1} <= m_k*R_k)"),
      core_index(core), num_vectors(needed), vector_dim(available) {}

namespace {

constexpr int kGramSchmidtRetries = 8;

// Modified Gram-Schmidt with one re-orthogonalization pass. Each new
// vector is drawn i.i.d. Gaussian from `rng`; a degenerate draw (norm
// collapses after projection) is redrawn up to a bounded retry count.
// Rows of the returned matrix form the orthonormal family.
Eigen::MatrixXd gram_schmidt_rows(index_t count, index_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd basis(count, dim);
  Eigen::VectorXd v(dim);
  for (index_t i = 0; i < count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kGramSchmidtRetries && !placed; ++attempt) {
      for (index_t j = 0; j < dim; ++j) v[j] = normal(rng);
      const double raw_norm = v.norm();
      for (int pass = 0; pass < 2; ++pass)
        for (index_t p = 0; p < i; ++p)
          v -= basis.row(p).dot(v) * basis.row(p).transpose();
      const double norm = v.norm();
      if (norm > 1e-10 * raw_norm && norm > 0.0) {
        basis.row(i) = v.transpose() / norm;
        placed = true;
      }
    }
    if (!placed)
      throw std::runtime_error("gram_schmidt_rows: degenerate draws for vector " +
                               std::to_string(i) + " after " +
                               std::to_string(kGramSchmidtRetries) + " retries");
  }
  return basis;
}

void scale_cores(TTEmbedding& emb, const InitSpec& spec) {
  if (!spec.target_scale) return;
  if (*spec.target_scale <= 0.0)
    throw std::invalid_argument("target_scale must be positive");
  const double c = std::pow(*spec.target_scale, 1.0 / (2.0 * double(emb.config.num_cores())));
  for (auto& core : emb.cores)
    for (double& x : core) x *= c;
}

}  // namespace

TTEmbedding init_gaussian(const TTConfig& config, const InitSpec& spec) {
  config.validate();
  if (spec.gaussian_std < 0.0)
    throw std::invalid_argument("gaussian_std must be nonnegative");
  TTEmbedding emb = TTEmbedding::zeros(config);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& core : emb.cores)
    for (double& x : core) x = spec.gaussian_std * normal(rng);
  return emb;
}

TTEmbedding init_ortho_core(const TTConfig& config, const InitSpec& spec) {
  config.validate();
  const index_t d = config.num_cores();
  for (index_t k = 0; k < d; ++k) {
    const index_t count = config.col_factors[k] * config.ranks[k];
    const index_t dim = config.row_factors[k] * config.ranks[k + 1];
    if (count > dim) throw InfeasibleRanksError(k, count, dim);
  }

  TTEmbedding emb = TTEmbedding::zeros(config);
  std::mt19937_64 rng(spec.seed);
  for (index_t k = 0; k < d; ++k) {
    const index_t r_prev = config.ranks[k];
    const index_t r_next = config.ranks[k + 1];
    const index_t m = config.row_factors[k];
    const index_t n = config.col_factors[k];
    Eigen::MatrixXd basis = gram_schmidt_rows(n * r_prev, m * r_next, rng);
    // Vector (r, j) becomes the slice G_k(r, :, j, :), reshaped (m, R_k).
    double* core = emb.core_data(k);
    for (index_t r = 0; r < r_prev; ++r)
      for (index_t j = 0; j < n; ++j) {
        const auto& vec = basis.row(r * n + j);
        for (index_t i = 0; i < m; ++i)
          for (index_t s = 0; s < r_next; ++s)
            core[((r * m + i) * n + j) * r_next + s] = vec[i * r_next + s];
      }
  }
  scale_cores(emb, spec);
  return emb;
}

Eigen::MatrixXd random_orthonormal_columns(index_t rows, index_t cols,
                                           std::mt19937_64& rng) {
  if (rows < cols)
    throw std::invalid_argument("random_orthonormal_columns: need rows >= cols");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(rows, cols);
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  // Make the factorization unique (Haar-like): force R's diagonal positive.
  for (index_t j = 0; j < cols; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

TTEmbedding ttm_decompose(const Eigen::MatrixXd& table, const TTConfig& config,
                          std::vector<double>* step_truncation_sq) {
  config.validate();
  const index_t d = config.num_cores();
  const index_t rows = config.padded_rows();
  const index_t cols = config.padded_cols();
  if (table.rows() != rows || table.cols() != cols)
    throw std::invalid_argument("ttm_decompose: table must be the padded prod(m) x prod(n)");

  // Reshape to the 2d-way tensor (m_1..m_d, n_1..n_d) and interleave the
  // axes to (m_1, n_1, m_2, n_2, ..., m_d, n_d), flattened row-major.
  std::vector<double> y(static_cast<std::size_t>(rows) * cols);
  {
    const auto& m = config.row_factors;
    const auto& n = config.col_factors;
    // Strides of axis pairs (i_k, j_k) in the interleaved layout.
    std::vector<index_t> stride(2 * d);
    index_t s = 1;
    for (index_t k = d - 1; k >= 0; --k) {
      stride[2 * k + 1] = s;  // j_k
      s *= n[k];
      stride[2 * k] = s;      // i_k
      s *= m[k];
    }
    std::vector<index_t> id(d), jd(d);
    for (index_t i = 0; i < rows; ++i) {
      index_t rem = i;
      for (index_t k = d - 1; k >= 0; --k) { id[k] = rem % m[k]; rem /= m[k]; }
      for (index_t j = 0; j < cols; ++j) {
        index_t remj = j;
        for (index_t k = d - 1; k >= 0; --k) { jd[k] = remj % n[k]; remj /= n[k]; }
        index_t t = 0;
        for (index_t k = 0; k < d; ++k) t += id[k] * stride[2 * k] + jd[k] * stride[2 * k + 1];
        y[t] = table(i, j);
      }
    }
  }

  if (step_truncation_sq) step_truncation_sq->assign(d - 1, 0.0);

  TTEmbedding emb = TTEmbedding::zeros(config);
  index_t lead_rank = 1;
  index_t remaining = rows * cols;
  for (index_t k = 0; k < d - 1; ++k) {
    const index_t unfold_rows = lead_rank * config.row_factors[k] * config.col_factors[k];
    const index_t unfold_cols = remaining / unfold_rows;
    const index_t rank = config.ranks[k + 1];
    if (rank > std::min(unfold_rows, unfold_cols))
      throw std::invalid_argument(
          "ttm_decompose: rank " + std::to_string(rank) + " exceeds unfolding bound " +
          std::to_string(std::min(unfold_rows, unfold_cols)) + " at core " + std::to_string(k));

    Eigen::Map<const MatrixRM> unfolding(y.data(), unfold_rows, unfold_cols);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(unfolding, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (step_truncation_sq)
      for (index_t i = rank; i < sv.size(); ++i)
        (*step_truncation_sq)[k] += sv[i] * sv[i];

    // U's rows run over (R_{k-1}, m_k, n_k); columns are the new rank.
    Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
    Eigen::Map<MatrixRM>(emb.core_data(k), unfold_rows, rank) = u;

    MatrixRM carry = sv.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).transpose();
    remaining = rank * unfold_cols;
    std::copy(carry.data(), carry.data() + remaining, y.begin());
    lead_rank = rank;
  }
  // Remainder is the last core (R_{d-1}, m_d, n_d, 1).
  std::copy(y.begin(), y.begin() + remaining, emb.core_data(d - 1));
  return emb;
}

TTEmbedding init_decomp_ortho(const TTConfig& config, const InitSpec& spec) {
  config.validate();
  const index_t rows = config.padded_rows();
  const index_t cols = config.padded_cols();
  if (rows * cols > 10'000'000)
    throw std::invalid_argument("init_decomp_ortho: padded table of " +
                                std::to_string(rows * cols) +
                                " entries exceeds the materialization guard");
  std::mt19937_64 rng(spec.seed);
  Eigen::MatrixXd x = random_orthonormal_columns(rows, cols, rng);
  TTEmbedding emb = ttm_decompose(x, config);
  scale_cores(emb, spec);
  return emb;
}

TTEmbedding init_embedding(const TTConfig& config, const InitSpec& spec) {
  switch (spec.method) {
    case InitMethod::gaussian: return init_gaussian(config, spec);
    case InitMethod::ortho_core: return init_ortho_core(config, spec);
    case InitMethod::decomp_ortho: return init_decomp_ortho(config, spec);
  }
  throw std::logic_error("init_embedding: bad method");
}

Claim1Report verify_claim1(const TTEmbedding& emb, double tol, index_t guard) {
  Eigen::MatrixXd w = materialize(emb, guard);
  Eigen::MatrixXd gram = w.transpose() * w;
  Claim1Report report;
  report.alpha = gram.diagonal().mean();
  Eigen::MatrixXd dev = gram;
  dev.diagonal().array() -= report.alpha;
  report.max_deviation = dev.cwiseAbs().maxCoeff();
  report.pass = report.max_deviation <= tol * report.alpha;
  return report;
}

}  // namespace ttgnn

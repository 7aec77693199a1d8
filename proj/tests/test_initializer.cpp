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
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_oracles.hpp"
#include "ttgnn/initializer.hpp"

using namespace ttgnn;

namespace {

// Gram matrix of the n_k*R_{k-1} slice vectors of core k.
Eigen::MatrixXd slice_gram(const TTEmbedding& emb, index_t k) {
  const auto shape = emb.config.core_shape(k);
  const index_t count = shape[2] * shape[0];
  const index_t dim = shape[1] * shape[3];
  Eigen::MatrixXd v(count, dim);
  for (index_t r = 0; r < shape[0]; ++r)
    for (index_t j = 0; j < shape[2]; ++j)
      for (index_t i = 0; i < shape[1]; ++i)
        for (index_t s = 0; s < shape[3]; ++s)
          v(r * shape[2] + j, i * shape[3] + s) =
              emb.cores[k][((r * shape[1] + i) * shape[2] + j) * shape[3] + s];
  return v * v.transpose();
}

}  // namespace

TEST_CASE("gaussian init is deterministic per seed and honors std") {
  TTConfig cfg = plan_factorization(12, 8, {2, 3, 2}, {2, 2, 2}, {1, 2, 2, 1});
  InitSpec spec{InitMethod::gaussian, 42, 0.1, {}};
  TTEmbedding a = init_gaussian(cfg, spec);
  TTEmbedding b = init_gaussian(cfg, spec);
  CHECK(a.cores == b.cores);

  spec.gaussian_std = 0.0;
  TTEmbedding z = init_gaussian(cfg, spec);
  for (const auto& core : z.cores)
    for (double x : core) CHECK(x == 0.0);
}

TEST_CASE("gaussian sample moments match the requested distribution") {
  // ~110k entries: mean within 3 sigma / sqrt(n), std within 5%.
  TTConfig cfg = plan_factorization(125000, 125, {50, 50, 50}, {5, 5, 5}, {1, 20, 20, 1});
  InitSpec spec{InitMethod::gaussian, 7, 0.1, {}};
  TTEmbedding emb = init_gaussian(cfg, spec);
  double sum = 0.0, sum2 = 0.0;
  index_t n = 0;
  for (const auto& core : emb.cores)
    for (double x : core) { sum += x; sum2 += x * x; ++n; }
  REQUIRE(n >= 100000);
  const double mean = sum / double(n);
  const double std = std::sqrt(sum2 / double(n) - mean * mean);
  CHECK(std::abs(mean) <= 3.0 * 0.1 / std::sqrt(double(n)));
  CHECK(std == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("orthogonal cores give a semi-orthogonal 4x4 table") {
  // Note (2,2)x(2,2) at rank 2 is NOT feasible: the last core would need
  // n_2*R_1 = 4 orthonormal vectors of length m_2*R_2 = 2. Rank 1 is the
  // feasible variant of this shape.
  TTConfig cfg = plan_factorization(4, 4, {2, 2}, {2, 2}, {1, 1, 1});
  TTEmbedding emb = init_ortho_core(cfg, {InitMethod::ortho_core, 3, 0.1, {}});
  Eigen::MatrixXd w = materialize(emb);
  Eigen::MatrixXd gram = w.transpose() * w;
  const double alpha = gram(0, 0);
  CHECK(alpha > 0.0);
  Eigen::MatrixXd dev = gram - alpha * Eigen::MatrixXd::Identity(4, 4);
  CHECK(dev.cwiseAbs().maxCoeff() <= 1e-10);

  TTConfig infeasible = plan_factorization(4, 4, {2, 2}, {2, 2}, {1, 2, 1});
  CHECK_THROWS_AS(static_cast<void>(init_ortho_core(infeasible, {InitMethod::ortho_core, 3, 0.1, {}})),
                  InfeasibleRanksError);

  // A rank-2 shape that does satisfy the bound on every core.
  TTConfig wide = plan_factorization(8, 4, {2, 4}, {2, 2}, {1, 2, 1});
  TTEmbedding emb2 = init_ortho_core(wide, {InitMethod::ortho_core, 5, 0.1, {}});
  Claim1Report report = verify_claim1(emb2, 1e-10);
  CHECK(report.pass);
}

TEST_CASE("all ranks one with unit column factors gives a unit-norm column") {
  TTConfig cfg = plan_factorization(12, 1, {3, 4}, {1, 1}, {1, 1, 1});
  TTEmbedding emb = init_ortho_core(cfg, {InitMethod::ortho_core, 5, 0.1, {}});
  Eigen::MatrixXd w = materialize(emb);
  CHECK(w.col(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("infeasible ranks are rejected with the offending core and bound") {
  TTConfig cfg = plan_factorization(169363, 128, {55, 55, 56}, {8, 4, 4}, {1, 32, 32, 1});
  try {
    init_ortho_core(cfg, {InitMethod::ortho_core, 1, 0.1, {}});
    FAIL("expected InfeasibleRanksError");
  } catch (const InfeasibleRanksError& e) {
    CHECK(e.core_index == 2);     // the last core
    CHECK(e.num_vectors == 128);  // n_3 * R_2 = 4 * 32
    CHECK(e.vector_dim == 56);    // m_3 * R_3 = 56 * 1
  }

  // Rank 8 obeys the bound (4 * 8 = 32 <= 56) and succeeds.
  TTConfig ok = plan_factorization(169363, 128, {55, 55, 56}, {8, 4, 4}, {1, 8, 8, 1});
  TTEmbedding emb = init_ortho_core(ok, {InitMethod::ortho_core, 1, 0.1, {}});
  for (index_t k = 0; k < 3; ++k) {
    Eigen::MatrixXd gram = slice_gram(emb, k);
    Eigen::MatrixXd dev = gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    CHECK(dev.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("ortho-core passes the semi-orthogonality check on random feasible configs") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<index_t> mf(2, 16), nf(1, 4), rpick(1, 8), dpick(2, 3);
  int accepted = 0;
  while (accepted < 20) {
    const index_t d = dpick(rng);
    std::vector<index_t> m(d), n(d), ranks(d + 1, 1);
    for (index_t k = 0; k < d; ++k) { m[k] = mf(rng); n[k] = nf(rng); }
    for (index_t k = 1; k < d; ++k) ranks[k] = rpick(rng);
    index_t pm = 1, pn = 1;
    for (index_t k = 0; k < d; ++k) { pm *= m[k]; pn *= n[k]; }
    if (pm > 4096 || pn > 64) continue;
    bool feasible = true;
    for (index_t k = 0; k < d; ++k)
      if (n[k] * ranks[k] > m[k] * ranks[k + 1]) feasible = false;
    if (!feasible) continue;
    ++accepted;
    TTConfig cfg = plan_factorization(pm, pn, m, n, ranks);
    TTEmbedding emb = init_ortho_core(cfg, {InitMethod::ortho_core, std::uint64_t(accepted), 0.1, {}});
    Claim1Report report = verify_claim1(emb, 1e-8);
    CAPTURE(to_string(cfg));
    CHECK(report.pass);
    for (index_t k = 0; k < d; ++k) {
      Eigen::MatrixXd gram = slice_gram(emb, k);
      Eigen::MatrixXd dev = gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
      CHECK(dev.cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("a gaussian table is far from semi-orthogonal") {
  TTConfig cfg = plan_factorization(256, 16, {16, 16}, {4, 4}, {1, 4, 1});
  TTEmbedding emb = init_gaussian(cfg, {InitMethod::gaussian, 21, 0.1, {}});
  CHECK_FALSE(verify_claim1(emb, 1e-3).pass);
}

TEST_CASE("a 1x1 table passes trivially with alpha = its square") {
  TTConfig cfg = plan_factorization(1, 1, {1, 1}, {1, 1}, {1, 1, 1});
  TTEmbedding emb = init_gaussian(cfg, {InitMethod::gaussian, 2, 0.5, {}});
  const double w = materialize(emb)(0, 0);
  Claim1Report report = verify_claim1(emb, 1e-8);
  CHECK(report.pass);
  CHECK(report.alpha == doctest::Approx(w * w));
}

TEST_CASE("verify_claim1 refuses to materialize past its guard") {
  TTConfig cfg = plan_factorization(169363, 128, {55, 55, 56}, {8, 4, 4}, {1, 8, 8, 1});
  TTEmbedding emb = init_ortho_core(cfg, {InitMethod::ortho_core, 1, 0.1, {}});
  CHECK_THROWS_AS(static_cast<void>(verify_claim1(emb, 1e-8)), std::invalid_argument);
}

TEST_CASE("target scale rescales the table to the requested alpha") {
  TTConfig cfg = plan_factorization(16, 4, {4, 4}, {2, 2}, {1, 2, 1});
  TTEmbedding emb = init_ortho_core(cfg, {InitMethod::ortho_core, 13, 0.1, 4.0});
  Claim1Report report = verify_claim1(emb, 1e-8);
  CHECK(report.pass);
  CHECK(report.alpha == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("decomposed random orthogonal matrices reconstruct exactly at full rank") {
  TTConfig cfg = plan_factorization(8, 4, {4, 2}, {2, 2}, {1, 4, 1});
  TTEmbedding emb = init_decomp_ortho(cfg, {InitMethod::decomp_ortho, 31, 0.1, {}});
  Claim1Report report = verify_claim1(emb, 1e-9);
  CHECK(report.pass);
  CHECK(report.alpha == doctest::Approx(1.0).epsilon(1e-9));

  // Same seed twice: identical cores.
  TTEmbedding again = init_decomp_ortho(cfg, {InitMethod::decomp_ortho, 31, 0.1, {}});
  CHECK(again.cores == emb.cores);
}

TEST_CASE("decomposing identity columns is exact at full rank") {
  TTConfig cfg = plan_factorization(8, 4, {4, 2}, {2, 2}, {1, 4, 1});
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(8, 4);
  TTEmbedding emb = ttm_decompose(x, cfg);
  Eigen::MatrixXd w = materialize(emb);
  CHECK((w - x).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("truncated decomposition error equals the discarded singular values") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::MatrixXd x = random_orthonormal_columns(16, 4, rng);
    TTConfig cfg = plan_factorization(16, 4, {4, 2, 2}, {2, 2, 1}, {1, 2, 2, 1});
    std::vector<double> discarded;
    TTEmbedding emb = ttm_decompose(x, cfg, &discarded);
    const double err2 = (materialize(emb) - x).squaredNorm();
    double bound = 0.0;
    for (double e : discarded) bound += e;
    CHECK(err2 == doctest::Approx(bound).epsilon(1e-8));
  }
}

TEST_CASE("full-rank decomposition round-trips arbitrary matrices") {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> normal;
  // Sequential full ranks: step 1 bound min(m1*n1, rest) = 2, step 2
  // bound min(R1*m2*n2, m3*n3) = 12. Nothing is truncated.
  TTConfig cfg = plan_factorization(24, 6, {2, 3, 4}, {1, 2, 3}, {1, 2, 12, 1});
  Eigen::MatrixXd x(24, 6);
  for (index_t i = 0; i < 24; ++i)
    for (index_t j = 0; j < 6; ++j) x(i, j) = normal(rng);
  std::vector<double> discarded;
  TTEmbedding emb = ttm_decompose(x, cfg, &discarded);
  for (double e : discarded) CHECK(e <= 1e-18);
  const double rel = std::sqrt((materialize(emb) - x).squaredNorm()) / x.norm();
  CHECK(rel <= 1e-9);
}

TEST_CASE("ranks beyond an unfolding bound are rejected") {
  TTConfig cfg = plan_factorization(8, 4, {4, 2}, {2, 2}, {1, 5, 1});
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(8, 4);
  CHECK_THROWS_WITH_AS(static_cast<void>(ttm_decompose(x, cfg)),
                       doctest::Contains("unfolding"), std::invalid_argument);
}

TEST_CASE("init dispatcher routes by method and stays deterministic") {
  TTConfig cfg = plan_factorization(12, 4, {3, 4}, {2, 2}, {1, 2, 1});
  for (InitMethod method :
       {InitMethod::gaussian, InitMethod::ortho_core, InitMethod::decomp_ortho}) {
    InitSpec spec{method, 1234, 0.1, {}};
    TTEmbedding a = init_embedding(cfg, spec);
    TTEmbedding b = init_embedding(cfg, spec);
    CHECK(a.cores == b.cores);
  }
}

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
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit status is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "ttgnn/experiment.hpp"
#include "ttgnn/initializer.hpp"
#include "ttgnn/partition.hpp"
#include "ttgnn/tt_io.hpp"

using namespace ttgnn;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL") << " — "
            << detail << std::endl;
  if (!pass) ++failures;
}

// Scalar oracle: W(i, j) as the explicit product of per-core slices.
double ttm_entry_oracle(const TTEmbedding& emb, index_t row, index_t col) {
  const TTConfig& cfg = emb.config;
  const index_t d = cfg.num_cores();
  std::vector<index_t> i(d), j(d);
  index_t ri = row, rj = col;
  for (index_t k = d - 1; k >= 0; --k) {
    i[k] = ri % cfg.row_factors[k];
    ri /= cfg.row_factors[k];
    j[k] = rj % cfg.col_factors[k];
    rj /= cfg.col_factors[k];
  }
  auto entry = [&](index_t k, index_t r, index_t s) {
    const auto shape = cfg.core_shape(k);
    return emb.cores[k][((r * shape[1] + i[k]) * shape[2] + j[k]) * shape[3] + s];
  };
  std::vector<double> cur(cfg.ranks[1]);
  for (index_t s = 0; s < cfg.ranks[1]; ++s) cur[s] = entry(0, 0, s);
  for (index_t k = 1; k < d; ++k) {
    std::vector<double> next(cfg.ranks[k + 1], 0.0);
    for (index_t s = 0; s < cfg.ranks[k + 1]; ++s)
      for (index_t r = 0; r < cfg.ranks[k]; ++r) next[s] += cur[r] * entry(k, r, s);
    cur = std::move(next);
  }
  return cur[0];
}

// --------------------------------------------------------------------------
// 1. Published parameter-count and reduction cells.
void criterion_1() {
  struct Cell {
    const char* name;
    index_t nodes;
    std::vector<index_t> m, n;
    index_t rank, params, reduction;
  };
  const std::vector<Cell> cells = {
      {"arxiv", 169363, {55, 55, 56}, {8, 4, 4}, 16, 66944, 323},
      {"arxiv", 169363, {55, 55, 56}, {8, 4, 4}, 32, 246528, 88},
      {"arxiv", 169363, {55, 55, 56}, {8, 4, 4}, 64, 943616, 23},
      {"products", 2449029, {125, 140, 140}, {4, 5, 5}, 16, 198400, 1580},
      {"products", 2449029, {125, 140, 140}, {4, 5, 5}, 32, 755200, 415},
      {"products", 2449029, {125, 140, 140}, {4, 5, 5}, 64, 2944000, 106},
      {"papers100M", 111059956, {480, 500, 500}, {8, 4, 4}, 16, 605440, 23479},
      {"papers100M", 111059956, {480, 500, 500}, {8, 4, 4}, 32, 2234880, 6360},
      {"papers100M", 111059956, {480, 500, 500}, {8, 4, 4}, 64, 8565760, 1659},
  };
  bool ok = true;
  std::ostringstream detail;
  for (const auto& cell : cells) {
    index_t pn = 1;
    for (index_t f : cell.n) pn *= f;
    TTConfig cfg = plan_factorization(cell.nodes, pn, cell.m, cell.n,
                                      {1, cell.rank, cell.rank, 1});
    const index_t params = count_params(cfg);
    // Reductions are quoted against a 128-dim full table for every
    // dataset; the printed integers are display roundings (floor or
    // nearest) of the exact ratio.
    const double ratio = double(cell.nodes) * 128.0 / double(params);
    const bool cell_ok =
        params == cell.params &&
        (static_cast<index_t>(std::floor(ratio)) == cell.reduction ||
         static_cast<index_t>(std::llround(ratio)) == cell.reduction);
    if (!cell_ok) {
      ok = false;
      detail << cell.name << "/R=" << cell.rank << " got params=" << params
             << " ratio=" << ratio << "; ";
    }
  }
  if (ok) detail << "all nine parameter counts exact, reductions reproduce the table";
  report(1, ok, detail.str());
}

// --------------------------------------------------------------------------
// 2. Chained-GEMM reconstruction vs the elementwise oracle.
void criterion_2() {
  std::mt19937_64 rng(20240512);
  std::uniform_int_distribution<index_t> factor(1, 4), rankpick(1, 4), dpick(2, 3);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  int done = 0;
  while (done < 50) {
    const index_t d = dpick(rng);
    std::vector<index_t> m(d), n(d), ranks(d + 1, 1);
    index_t pm = 1, pn = 1;
    for (index_t k = 0; k < d; ++k) {
      m[k] = factor(rng);
      n[k] = factor(rng);
      pm *= m[k];
      pn *= n[k];
    }
    if (pm > 64 || pn > 16) continue;
    for (index_t k = 1; k < d; ++k) ranks[k] = rankpick(rng);
    ++done;
    TTConfig cfg = plan_factorization(pm, pn, m, n, ranks);
    TTEmbedding emb = TTEmbedding::zeros(cfg);
    for (auto& core : emb.cores)
      for (double& x : core) x = normal(rng);
    for (index_t i = 0; i < pm; ++i) {
      auto row = reconstruct_row(emb, i);
      for (index_t j = 0; j < pn; ++j)
        worst = std::max(worst, std::abs(row[j] - ttm_entry_oracle(emb, i, j)));
    }
  }
  std::ostringstream detail;
  detail << "50 random configs, max |gemm - oracle| = " << worst;
  report(2, worst <= 1e-12, detail.str());
}

// --------------------------------------------------------------------------
// 3. Semi-orthogonality of the constructed table.
void criterion_3() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<index_t> mf(2, 16), nf(1, 4), rpick(1, 8), dpick(2, 3);
  int accepted = 0;
  double worst_rel = 0.0;
  bool ok = true;
  while (accepted < 20) {
    const index_t d = dpick(rng);
    std::vector<index_t> m(d), n(d), ranks(d + 1, 1);
    for (index_t k = 0; k < d; ++k) { m[k] = mf(rng); n[k] = nf(rng); }
    for (index_t k = 1; k < d; ++k) ranks[k] = rpick(rng);
    index_t pm = 1, pn = 1;
    bool feasible = true;
    for (index_t k = 0; k < d; ++k) {
      pm *= m[k];
      pn *= n[k];
      if (n[k] * ranks[k] > m[k] * ranks[k + 1]) feasible = false;
    }
    if (!feasible || pm > 4096 || pn > 64) continue;
    ++accepted;
    TTConfig cfg = plan_factorization(pm, pn, m, n, ranks);
    TTEmbedding emb =
        init_ortho_core(cfg, {InitMethod::ortho_core, std::uint64_t(accepted), 0.1, {}});
    Claim1Report r = verify_claim1(emb, 1e-8);
    ok = ok && r.pass;
    if (r.alpha > 0) worst_rel = std::max(worst_rel, r.max_deviation / r.alpha);
  }
  // The same check must reject a Gaussian table.
  TTConfig gcfg = plan_factorization(256, 16, {16, 16}, {4, 4}, {1, 4, 1});
  TTEmbedding gauss = init_gaussian(gcfg, {InitMethod::gaussian, 5, 0.1, {}});
  const bool gauss_fails = !verify_claim1(gauss, 1e-3).pass;
  std::ostringstream detail;
  detail << "20 feasible configs, worst |W'W - aI|/a = " << worst_rel
         << "; gaussian rejected: " << (gauss_fails ? "yes" : "no");
  report(3, ok && gauss_fails, detail.str());
}

// --------------------------------------------------------------------------
// 4. Decomposition exactness and truncation error accounting.
void criterion_4() {
  std::mt19937_64 rng(99);
  bool ok = true;
  double worst_rel = 0.0, worst_trunc = 0.0;

  // Full sequential ranks: exact round trips up to 256 x 32.
  struct Shape { std::vector<index_t> m, n, ranks; };
  const std::vector<Shape> shapes = {
      {{4, 2}, {2, 2}, {1, 4, 1}},
      {{16, 16}, {8, 4}, {1, 64, 1}},
      {{4, 8, 8}, {2, 4, 4}, {1, 8, 32, 1}},
  };
  for (const auto& s : shapes) {
    index_t pm = 1, pn = 1;
    for (index_t f : s.m) pm *= f;
    for (index_t f : s.n) pn *= f;
    Eigen::MatrixXd x = random_orthonormal_columns(pm, pn, rng);
    TTConfig cfg = plan_factorization(pm, pn, s.m, s.n, s.ranks);
    TTEmbedding emb = ttm_decompose(x, cfg);
    const double rel = std::sqrt((materialize(emb) - x).squaredNorm()) / x.norm();
    worst_rel = std::max(worst_rel, rel);
    ok = ok && rel <= 1e-9;
  }

  // Truncated ranks: squared error equals the discarded singular values.
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd x = random_orthonormal_columns(64, 8, rng);
    TTConfig cfg = plan_factorization(64, 8, {4, 4, 4}, {2, 2, 2}, {1, 2, 2, 1});
    std::vector<double> discarded;
    TTEmbedding emb = ttm_decompose(x, cfg, &discarded);
    double expect = 0.0;
    for (double e : discarded) expect += e;
    const double err2 = (materialize(emb) - x).squaredNorm();
    worst_trunc = std::max(worst_trunc, std::abs(err2 - expect));
    ok = ok && std::abs(err2 - expect) <= 1e-8;
  }
  std::ostringstream detail;
  detail << "max relative round-trip error " << worst_rel
         << ", max |err^2 - discarded| " << worst_trunc;
  report(4, ok, detail.str());
}

// --------------------------------------------------------------------------
// 5. Gradients vs central finite differences.
void criterion_5() {
  std::mt19937_64 rng(2025);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    TTConfig cfg = plan_factorization(12, 8, {3, 2, 2}, {2, 2, 2}, {1, 3, 2, 1});
    TTEmbedding emb = TTEmbedding::zeros(cfg);
    for (auto& core : emb.cores)
      for (double& x : core) x = normal(rng);
    std::uniform_int_distribution<index_t> pick(0, 11);
    std::vector<index_t> idx(5);
    for (auto& i : idx) i = pick(rng);
    MatrixRM target(5, 8);
    for (index_t r = 0; r < 5; ++r)
      for (index_t c = 0; c < 8; ++c) target(r, c) = normal(rng);

    auto loss = [&](const TTEmbedding& e) {
      return 0.5 * (lookup_batch(e, idx) - target).squaredNorm();
    };
    MatrixRM upstream = lookup_batch(emb, idx) - target;
    CoreGradients analytic = backward_lookup(emb, idx, upstream);
    const double h = 1e-6;
    for (index_t k = 0; k < cfg.num_cores(); ++k)
      for (std::size_t e = 0; e < emb.cores[k].size(); ++e) {
        const double save = emb.cores[k][e];
        emb.cores[k][e] = save + h;
        const double up = loss(emb);
        emb.cores[k][e] = save - h;
        const double dn = loss(emb);
        emb.cores[k][e] = save;
        const double fd = (up - dn) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(analytic.grads[k][e]), 1e-8});
        worst = std::max(worst, std::abs(fd - analytic.grads[k][e]) / denom);
      }
  }
  std::ostringstream detail;
  detail << "10 instances, max relative error vs finite differences = " << worst;
  report(5, worst <= 1e-4, detail.str());
}

// --------------------------------------------------------------------------
// 6. Partitioner quality against the random balanced baseline.
void criterion_6() {
  bool ok = true;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CsrGraph g = generate_sbm(1000, 10, 0.08, 0.002, seed);
    auto assignment = partition(g, 10, seed);
    const double cut = double(edge_cut(g, assignment));
    const double baseline = random_balanced_cut(g, 10, 20, seed);
    ok = ok && cut <= 0.5 * baseline;
    detail << cut << "/" << baseline << " ";
  }
  report(6, ok, "cut/baseline per seed: " + detail.str());
}

// --------------------------------------------------------------------------
// Shared experiment settings for the training-property criteria.

// Frozen desk-scale benchmark recipe. Level-1 partitions are finer than
// the planted blocks (50 parts of ~20 nodes, leaves of ~10) so that a
// first-level block shuffle genuinely splits communities across G_1
// slices; with block-aligned level-1 partitions the shuffle would be an
// exact relabeling symmetry and carry no signal.
RunConfig benchmark_base() {
  RunConfig c;
  c.graph.num_nodes = 1000;
  c.graph.num_blocks = 10;
  c.graph.p_in = 0.08;
  c.graph.p_out = 0.002;
  c.emb_dim = 16;
  c.num_cores = 3;
  c.rank = 4;
  c.init = InitMethod::ortho_core;
  c.reorder = true;
  c.branching = {50, 2};
  c.perm_level = PermLevel::none;
  c.layer_type = LayerType::graphsage_mean;
  c.hidden_dim = 16;
  c.num_layers = 2;
  c.epochs = 250;
  c.lr = 3e-3;
  return c;
}

std::vector<std::uint64_t> benchmark_seeds() {
  std::vector<std::uint64_t> seeds(20);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
  return seeds;
}

std::vector<double> cell_accs(const CellSummary& cell) {
  std::vector<double> accs;
  for (const auto& r : cell.runs) accs.push_back(r.final.test_acc);
  return accs;
}

// 7. Fig.-6 style ordering: no-perm >= 1st-level >= 2nd-level, with the
// no-perm vs 2nd-level gap exceeding one pooled standard deviation.
void criterion_7() {
  MatrixSpec spec;
  spec.base = benchmark_base();
  spec.perm_levels = {PermLevel::none, PermLevel::first, PermLevel::second};
  spec.seeds = benchmark_seeds();
  spec.threads = 2;
  MatrixReport rep = run_experiment_matrix(spec);
  if (!rep.all_ok()) {
    report(7, false, "matrix had failing cells");
    return;
  }
  const auto& none = rep.cells[0];
  const auto& first = rep.cells[1];
  const auto& second = rep.cells[2];
  const double pooled = pooled_std(cell_accs(none), cell_accs(second));
  const bool chain = none.mean_test_acc >= first.mean_test_acc &&
                     first.mean_test_acc >= second.mean_test_acc;
  const bool gap = none.mean_test_acc - second.mean_test_acc > pooled;
  std::ostringstream detail;
  detail << "no-perm " << none.mean_test_acc << " >= 1st " << first.mean_test_acc
         << " >= 2nd " << second.mean_test_acc << "; gap "
         << none.mean_test_acc - second.mean_test_acc << " vs pooled std " << pooled;
  report(7, chain && gap, detail.str());
}

// 8. Hierarchy reordering beats the shuffled order.
void criterion_8() {
  MatrixSpec spec;
  spec.base = benchmark_base();
  spec.reorder_options = {true, false};
  spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  spec.threads = 2;
  MatrixReport rep = run_experiment_matrix(spec);
  if (!rep.all_ok()) {
    report(8, false, "matrix had failing cells");
    return;
  }
  const auto& reordered = rep.cells[0];
  const auto& shuffled = rep.cells[1];
  std::ostringstream detail;
  detail << "reordered " << reordered.mean_test_acc << " vs shuffled "
         << shuffled.mean_test_acc;
  report(8, reordered.mean_test_acc >= shuffled.mean_test_acc, detail.str());
}

// 9. Accuracy is (weakly) monotone in the TT rank.
void criterion_9() {
  MatrixSpec spec;
  spec.base = benchmark_base();
  spec.base.init = InitMethod::decomp_ortho;  // feasible at every rank here
  spec.ranks = {2, 4, 8};
  spec.seeds = {1, 2, 3, 4, 5};
  spec.threads = 2;
  MatrixReport rep = run_experiment_matrix(spec);
  if (!rep.all_ok()) {
    report(9, false, "matrix had failing cells");
    return;
  }
  int inversions = 0;
  bool within = true;
  for (std::size_t i = 0; i + 1 < rep.cells.size(); ++i) {
    const double lo = rep.cells[i].mean_test_acc;
    const double hi = rep.cells[i + 1].mean_test_acc;
    if (hi < lo) {
      ++inversions;
      const double pooled = pooled_std(cell_accs(rep.cells[i]), cell_accs(rep.cells[i + 1]));
      within = within && (lo - hi) <= pooled;
    }
  }
  std::ostringstream detail;
  detail << "mean acc by rank {2,4,8}: " << rep.cells[0].mean_test_acc << ", "
         << rep.cells[1].mean_test_acc << ", " << rep.cells[2].mean_test_acc << " ("
         << inversions << " inversion(s))";
  report(9, inversions == 0 || (inversions == 1 && within), detail.str());
}

// 10. Orthogonal initialization does not trail Gaussian.
void criterion_10() {
  MatrixSpec spec;
  spec.base = benchmark_base();
  spec.inits = {InitMethod::ortho_core, InitMethod::gaussian};
  spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  spec.threads = 2;
  MatrixReport rep = run_experiment_matrix(spec);
  if (!rep.all_ok()) {
    report(10, false, "matrix had failing cells");
    return;
  }
  const auto& ortho = rep.cells[0];
  const auto& gauss = rep.cells[1];
  auto oa = cell_accs(ortho), ga = cell_accs(gauss);
  const double pooled = pooled_std(oa, ga);
  int wins = 0;
  for (std::size_t i = 0; i < oa.size(); ++i) wins += oa[i] > ga[i];
  std::ostringstream detail;
  detail << "ortho " << ortho.mean_test_acc << " vs gaussian " << gauss.mean_test_acc
         << " (pooled std " << pooled << ", ortho wins " << wins << "/" << oa.size() << ")";
  report(10, ortho.mean_test_acc >= gauss.mean_test_acc - pooled, detail.str());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::cout << (failures == 0 ? "all criteria passed" : "criteria failed") << std::endl;
  return failures;
}

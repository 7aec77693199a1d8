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
#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "ttgnn/autodiff.hpp"
#include "ttgnn/graph.hpp"
#include "ttgnn/initializer.hpp"
#include "ttgnn/partition.hpp"

namespace {

using namespace ttgnn;

TTEmbedding make_embedding(index_t nodes, index_t dim, index_t rank) {
  TTConfig cfg = plan_factorization(nodes, dim, 3, {1, rank, rank, 1});
  return init_gaussian(cfg, {InitMethod::gaussian, 42, 0.1, {}});
}

std::vector<index_t> make_batch(index_t nodes, index_t batch) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<index_t> pick(0, nodes - 1);
  std::vector<index_t> idx(batch);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

void BM_ReconstructRow(benchmark::State& state) {
  TTEmbedding emb = make_embedding(100000, 64, state.range(0));
  index_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reconstruct_row(emb, i));
    i = (i + 9973) % emb.config.num_nodes;
  }
}
BENCHMARK(BM_ReconstructRow)->Arg(2)->Arg(8)->Arg(32);

void BM_LookupBatch(benchmark::State& state) {
  TTEmbedding emb = make_embedding(100000, 64, state.range(0));
  auto idx = make_batch(100000, 4096);
  for (auto _ : state) benchmark::DoNotOptimize(lookup_batch(emb, idx));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_LookupBatch)->Arg(2)->Arg(8)->Arg(32);

void BM_BackwardLookup(benchmark::State& state) {
  TTEmbedding emb = make_embedding(100000, 64, state.range(0));
  auto idx = make_batch(100000, 4096);
  MatrixRM upstream = MatrixRM::Random(4096, 64);
  for (auto _ : state) benchmark::DoNotOptimize(backward_lookup(emb, idx, upstream));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_BackwardLookup)->Arg(2)->Arg(8)->Arg(32);

void BM_FullTableGather(benchmark::State& state) {
  const index_t nodes = 100000, dim = 64;
  MatrixRM table = MatrixRM::Random(nodes, dim);
  auto idx = make_batch(nodes, 4096);
  for (auto _ : state) {
    MatrixRM out(4096, dim);
    for (std::size_t b = 0; b < idx.size(); ++b) out.row(b) = table.row(idx[b]);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_FullTableGather);

void BM_Partition(benchmark::State& state) {
  CsrGraph g = generate_sbm(state.range(0), 10, 0.08, 0.002, 3);
  for (auto _ : state) benchmark::DoNotOptimize(partition(g, 10, 5));
}
BENCHMARK(BM_Partition)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();

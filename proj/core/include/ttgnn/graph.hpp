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
#ifndef TTGNN_GRAPH_HPP
#define TTGNN_GRAPH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ttgnn/tt_config.hpp"

namespace ttgnn {

/// Undirected graph in compressed sparse row form. Every edge (u, v) is
/// stored as the two arcs u->v and v->u; self-loops appear once.
struct CsrGraph {
  index_t num_nodes = 0;
  std::vector<index_t> row_offsets;  // length num_nodes + 1
  std::vector<index_t> neighbors;
  std::vector<std::int32_t> labels;      // optional, class id per node
  std::vector<std::uint8_t> train_mask;  // optional, parallel to nodes
  std::vector<std::uint8_t> val_mask;
  std::vector<std::uint8_t> test_mask;

  index_t num_arcs() const { return static_cast<index_t>(neighbors.size()); }
  index_t degree(index_t v) const { return row_offsets[v + 1] - row_offsets[v]; }
  std::span<const index_t> neighbors_of(index_t v) const {
    return {neighbors.data() + row_offsets[v],
            static_cast<std::size_t>(degree(v))};
  }
  bool has_labels() const { return !labels.empty(); }
  bool has_masks() const { return !train_mask.empty(); }
};

/// Builds CSR from an edge list; symmetrizes (adds reversed arcs) and
/// deduplicates. Self-loops are kept as a single arc.
CsrGraph build_csr(index_t num_nodes,
                   std::span<const std::pair<index_t, index_t>> edges);

/// Stochastic block model with `num_blocks` planted communities of
/// near-equal size; labels are block ids and train/val/test masks are a
/// deterministic 60/20/20 split within each class.
CsrGraph generate_sbm(index_t num_nodes, index_t num_blocks, double p_in,
                      double p_out, std::uint64_t seed);

/// Deterministic per-class split; fractions must sum to at most 1, the
/// remainder goes to test.
void assign_splits(CsrGraph& graph, std::uint64_t seed, double train_frac = 0.6,
                   double val_frac = 0.2);

/// Whitespace-separated "u v" pairs, 0-based ids, one edge per line.
/// Blank lines and lines starting with '#' are skipped. Malformed lines
/// are reported with their line number. An empty graph is an error.
CsrGraph load_edge_list(const std::string& path);
void save_edge_list(const CsrGraph& graph, const std::string& path);

/// "node_id label" per line; every node must be covered.
void load_labels(CsrGraph& graph, const std::string& path);
void save_labels(const CsrGraph& graph, const std::string& path);

/// Permutation file: line i holds the new id of old node i.
std::vector<index_t> load_permutation(const std::string& path);
void save_permutation(std::span<const index_t> perm, const std::string& path);

/// Relabels nodes: node v becomes perm[v]. Adjacency, labels and masks
/// all move with the nodes; neighbor lists are re-sorted.
CsrGraph apply_permutation(const CsrGraph& graph, std::span<const index_t> perm);

std::vector<index_t> inverse_permutation(std::span<const index_t> perm);

/// Uniformly random relabeling. Returns the graph and the permutation
/// (old id -> new id) that produced it.
std::pair<CsrGraph, std::vector<index_t>> shuffle_nodes(const CsrGraph& graph,
                                                        std::uint64_t seed);

/// Number of undirected edges crossing parts under `assignment`.
index_t edge_cut(const CsrGraph& graph, std::span<const std::int32_t> assignment);

/// Mean cut of uniformly random balanced assignments into k parts.
double random_balanced_cut(const CsrGraph& graph, index_t k, index_t trials,
                           std::uint64_t seed);

}  // namespace ttgnn

#endif  // TTGNN_GRAPH_HPP

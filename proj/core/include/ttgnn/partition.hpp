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
#ifndef TTGNN_PARTITION_HPP
#define TTGNN_PARTITION_HPP

#include <cstdint>
#include <vector>

#include "ttgnn/graph.hpp"

namespace ttgnn {

/// Balanced k-way partitioning by multilevel recursive bisection:
/// heavy-edge-matching coarsening, greedy region-growing initial
/// bisection, and Fiduccia-Mattheyses refinement at every level.
/// max part size <= ceil(n/k) * (1 + imbalance).
std::vector<std::int32_t> partition(const CsrGraph& graph, index_t k,
                                    std::uint64_t seed, double imbalance = 0.05);

/// Nested partitions from recursively splitting each level's parts, and
/// the node relabeling that packs every leaf into a contiguous id range.
struct PartitionHierarchy {
  index_t num_nodes = 0;
  std::vector<index_t> branching;  // p_1..p_L
  /// assignment[l][v]: global partition id of node v at level l+1
  /// (prod_{j<=l+1} p_j partitions). Node ids refer to the input graph.
  std::vector<std::vector<std::int32_t>> assignment;
  std::vector<index_t> permutation;  // old id -> new id
  std::vector<index_t> inverse;      // new id -> old id

  index_t levels() const { return static_cast<index_t>(branching.size()); }
  index_t parts_at_level(index_t level) const;  // 1-based level
};

/// Recursively applies `partition` with branching factors p_1..p_L; each
/// level splits every current part independently. Nodes of each leaf get
/// contiguous new ids, leaves packed in partition-id order, input order
/// preserved within a leaf.
PartitionHierarchy build_hierarchy(const CsrGraph& graph,
                                   const std::vector<index_t>& branching,
                                   std::uint64_t seed, double imbalance = 0.05);

/// Relabels the graph by the hierarchy's permutation.
CsrGraph reorder(const CsrGraph& graph, const PartitionHierarchy& hierarchy);

enum class PermLevel { none, first, second };

PermLevel parse_perm_level(const std::string& name);
std::string to_string(PermLevel level);

/// Derives a node permutation (old id -> new id) from the hierarchy with
/// a block-level shuffle: `none` returns the hierarchy permutation
/// unchanged; `first` shuffles the order of the p_1 top-level blocks;
/// `second` shuffles all p_1*p_2 second-level blocks globally. Within a
/// shuffled block the node order is preserved.
std::vector<index_t> permute_level(const PartitionHierarchy& hierarchy,
                                   PermLevel level, std::uint64_t seed);

/// Edge cut per hierarchy level (cut of assignment[l]).
std::vector<index_t> hierarchy_cuts(const CsrGraph& graph,
                                    const PartitionHierarchy& hierarchy);

}  // namespace ttgnn

#endif  // TTGNN_PARTITION_HPP

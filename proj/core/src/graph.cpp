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
#include "ttgnn/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ttgnn {

CsrGraph build_csr(index_t num_nodes,
                   std::span<const std::pair<index_t, index_t>> edges) {
  if (num_nodes <= 0) throw std::invalid_argument("build_csr: empty graph");
  std::vector<std::pair<index_t, index_t>> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes)
      throw std::out_of_range("build_csr: endpoint out of range");
    arcs.emplace_back(u, v);
    if (u != v) arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  CsrGraph g;
  g.num_nodes = num_nodes;
  g.row_offsets.assign(num_nodes + 1, 0);
  for (auto& [u, v] : arcs) g.row_offsets[u + 1]++;
  std::partial_sum(g.row_offsets.begin(), g.row_offsets.end(), g.row_offsets.begin());
  g.neighbors.resize(arcs.size());
  std::vector<index_t> fill(g.row_offsets.begin(), g.row_offsets.end() - 1);
  for (auto& [u, v] : arcs) g.neighbors[fill[u]++] = v;
  return g;
}

CsrGraph generate_sbm(index_t num_nodes, index_t num_blocks, double p_in,
                      double p_out, std::uint64_t seed) {
  if (num_nodes <= 0) throw std::invalid_argument("generate_sbm: num_nodes must be positive");
  if (num_blocks <= 0 || num_blocks > num_nodes)
    throw std::invalid_argument("generate_sbm: bad block count");
  if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
    throw std::invalid_argument("generate_sbm: probabilities must be in [0, 1]");
  if (p_in < p_out)
    throw std::invalid_argument("generate_sbm: homophilic model requires p_in >= p_out");

  // Nodes are dealt into blocks contiguously; the remainder is spread
  // over the leading blocks.
  const index_t base = num_nodes / num_blocks;
  const index_t extra = num_nodes % num_blocks;
  std::vector<std::int32_t> block(num_nodes);
  {
    index_t v = 0;
    for (index_t b = 0; b < num_blocks; ++b) {
      const index_t size = base + (b < extra ? 1 : 0);
      for (index_t i = 0; i < size; ++i) block[v++] = static_cast<std::int32_t>(b);
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<index_t, index_t>> edges;
  for (index_t u = 0; u < num_nodes; ++u)
    for (index_t v = u + 1; v < num_nodes; ++v) {
      const double p = block[u] == block[v] ? p_in : p_out;
      if (p > 0.0 && unit(rng) < p) edges.emplace_back(u, v);
    }

  CsrGraph g = build_csr(num_nodes, edges);
  g.labels = std::move(block);
  assign_splits(g, seed);
  return g;
}

void assign_splits(CsrGraph& graph, std::uint64_t seed, double train_frac,
                   double val_frac) {
  if (!graph.has_labels()) throw std::invalid_argument("assign_splits: graph has no labels");
  if (train_frac < 0 || val_frac < 0 || train_frac + val_frac > 1.0)
    throw std::invalid_argument("assign_splits: bad fractions");
  graph.train_mask.assign(graph.num_nodes, 0);
  graph.val_mask.assign(graph.num_nodes, 0);
  graph.test_mask.assign(graph.num_nodes, 0);

  const std::int32_t num_classes =
      graph.labels.empty() ? 0 : *std::max_element(graph.labels.begin(), graph.labels.end()) + 1;
  std::mt19937_64 rng(seed ^ 0x5eed5eedULL);
  for (std::int32_t c = 0; c < num_classes; ++c) {
    std::vector<index_t> members;
    for (index_t v = 0; v < graph.num_nodes; ++v)
      if (graph.labels[v] == c) members.push_back(v);
    std::shuffle(members.begin(), members.end(), rng);
    const index_t n_train = static_cast<index_t>(members.size() * train_frac);
    const index_t n_val = static_cast<index_t>(members.size() * val_frac);
    for (index_t i = 0; i < static_cast<index_t>(members.size()); ++i) {
      if (i < n_train) graph.train_mask[members[i]] = 1;
      else if (i < n_train + n_val) graph.val_mask[members[i]] = 1;
      else graph.test_mask[members[i]] = 1;
    }
  }
}

CsrGraph load_edge_list(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<std::pair<index_t, index_t>> edges;
  index_t max_node = -1;
  std::string line;
  index_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    index_t u, v;
    if (!(ls >> u >> v) || u < 0 || v < 0) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed edge line '" + line + "'");
    }
    edges.emplace_back(u, v);
    max_node = std::max({max_node, u, v});
  }
  if (edges.empty())
    throw std::runtime_error(path + ": no edges; refusing to build a 0-node graph");
  return build_csr(max_node + 1, edges);
}

void save_edge_list(const CsrGraph& graph, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  for (index_t u = 0; u < graph.num_nodes; ++u)
    for (index_t v : graph.neighbors_of(u))
      if (u <= v) os << u << " " << v << "\n";
  if (!os) throw std::runtime_error("write failed for " + path);
}

void load_labels(CsrGraph& graph, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<std::int32_t> labels(graph.num_nodes, -1);
  std::string line;
  index_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    index_t v;
    std::int32_t label;
    if (!(ls >> v >> label) || v < 0 || v >= graph.num_nodes)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed label line '" + line + "'");
    labels[v] = label;
  }
  for (index_t v = 0; v < graph.num_nodes; ++v)
    if (labels[v] < 0)
      throw std::runtime_error(path + ": node " + std::to_string(v) + " has no label");
  graph.labels = std::move(labels);
}

void save_labels(const CsrGraph& graph, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  for (index_t v = 0; v < graph.num_nodes; ++v) os << v << " " << graph.labels[v] << "\n";
  if (!os) throw std::runtime_error("write failed for " + path);
}

std::vector<index_t> load_permutation(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<index_t> perm;
  std::string line;
  index_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    index_t p;
    if (!(ls >> p) || p < 0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed permutation line '" + line + "'");
    perm.push_back(p);
  }
  auto inv = inverse_permutation(perm);  // validates bijectivity
  (void)inv;
  return perm;
}

void save_permutation(std::span<const index_t> perm, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  for (index_t p : perm) os << p << "\n";
  if (!os) throw std::runtime_error("write failed for " + path);
}

std::vector<index_t> inverse_permutation(std::span<const index_t> perm) {
  std::vector<index_t> inv(perm.size(), -1);
  for (std::size_t old_id = 0; old_id < perm.size(); ++old_id) {
    const index_t new_id = perm[old_id];
    if (new_id < 0 || new_id >= static_cast<index_t>(perm.size()) || inv[new_id] != -1)
      throw std::invalid_argument("inverse_permutation: not a bijection");
    inv[new_id] = static_cast<index_t>(old_id);
  }
  return inv;
}

CsrGraph apply_permutation(const CsrGraph& graph, std::span<const index_t> perm) {
  if (static_cast<index_t>(perm.size()) != graph.num_nodes)
    throw std::invalid_argument("apply_permutation: permutation size mismatch");
  auto inv = inverse_permutation(perm);

  CsrGraph out;
  out.num_nodes = graph.num_nodes;
  out.row_offsets.assign(graph.num_nodes + 1, 0);
  for (index_t new_u = 0; new_u < graph.num_nodes; ++new_u)
    out.row_offsets[new_u + 1] = graph.degree(inv[new_u]);
  std::partial_sum(out.row_offsets.begin(), out.row_offsets.end(), out.row_offsets.begin());
  out.neighbors.resize(graph.neighbors.size());
  for (index_t new_u = 0; new_u < graph.num_nodes; ++new_u) {
    const index_t old_u = inv[new_u];
    index_t pos = out.row_offsets[new_u];
    for (index_t old_v : graph.neighbors_of(old_u)) out.neighbors[pos++] = perm[old_v];
    std::sort(out.neighbors.begin() + out.row_offsets[new_u],
              out.neighbors.begin() + out.row_offsets[new_u + 1]);
  }
  if (graph.has_labels()) {
    out.labels.resize(graph.num_nodes);
    for (index_t v = 0; v < graph.num_nodes; ++v) out.labels[perm[v]] = graph.labels[v];
  }
  if (graph.has_masks()) {
    out.train_mask.resize(graph.num_nodes);
    out.val_mask.resize(graph.num_nodes);
    out.test_mask.resize(graph.num_nodes);
    for (index_t v = 0; v < graph.num_nodes; ++v) {
      out.train_mask[perm[v]] = graph.train_mask[v];
      out.val_mask[perm[v]] = graph.val_mask[v];
      out.test_mask[perm[v]] = graph.test_mask[v];
    }
  }
  return out;
}

std::pair<CsrGraph, std::vector<index_t>> shuffle_nodes(const CsrGraph& graph,
                                                        std::uint64_t seed) {
  std::vector<index_t> perm(graph.num_nodes);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return {apply_permutation(graph, perm), perm};
}

index_t edge_cut(const CsrGraph& graph, std::span<const std::int32_t> assignment) {
  if (static_cast<index_t>(assignment.size()) != graph.num_nodes)
    throw std::invalid_argument("edge_cut: assignment size mismatch");
  index_t crossing_arcs = 0;
  for (index_t u = 0; u < graph.num_nodes; ++u)
    for (index_t v : graph.neighbors_of(u))
      if (assignment[u] != assignment[v]) ++crossing_arcs;
  return crossing_arcs / 2;
}

double random_balanced_cut(const CsrGraph& graph, index_t k, index_t trials,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::int32_t> assignment(graph.num_nodes);
  for (index_t v = 0; v < graph.num_nodes; ++v)
    assignment[v] = static_cast<std::int32_t>(v % k);
  double total = 0.0;
  for (index_t t = 0; t < trials; ++t) {
    std::shuffle(assignment.begin(), assignment.end(), rng);
    total += double(edge_cut(graph, assignment));
  }
  return total / double(trials);
}

}  // namespace ttgnn

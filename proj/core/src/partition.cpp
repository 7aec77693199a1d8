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
#include "ttgnn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>

namespace ttgnn {

namespace {

// Weighted working graph for the multilevel scheme.
struct WorkGraph {
  std::vector<index_t> xadj;    // n+1
  std::vector<index_t> adjncy;
  std::vector<index_t> adjwgt;
  std::vector<index_t> vwgt;

  index_t n() const { return static_cast<index_t>(vwgt.size()); }
  index_t total_weight() const { return std::accumulate(vwgt.begin(), vwgt.end(), index_t{0}); }
};

WorkGraph from_csr(const CsrGraph& g) {
  WorkGraph w;
  w.xadj = g.row_offsets;
  w.adjncy = g.neighbors;
  w.adjwgt.assign(g.neighbors.size(), 1);
  w.vwgt.assign(g.num_nodes, 1);
  return w;
}

index_t cut_weight(const WorkGraph& g, const std::vector<std::int8_t>& side) {
  index_t cut = 0;
  for (index_t u = 0; u < g.n(); ++u)
    for (index_t e = g.xadj[u]; e < g.xadj[u + 1]; ++e)
      if (side[u] != side[g.adjncy[e]]) cut += g.adjwgt[e];
  return cut / 2;
}

// Heavy-edge matching; returns coarse graph and fine->coarse map, or an
// empty optional-style flag via coarse.n() == fine.n() (no shrinkage).
struct Coarsening {
  WorkGraph coarse;
  std::vector<index_t> fine_to_coarse;
};

Coarsening coarsen_once(const WorkGraph& g, index_t max_vwgt, std::mt19937_64& rng) {
  const index_t n = g.n();
  std::vector<index_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<index_t> match(n, -1);
  for (index_t v : order) {
    if (match[v] != -1) continue;
    index_t best = -1, best_w = -1;
    for (index_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      const index_t u = g.adjncy[e];
      if (u == v || match[u] != -1) continue;
      if (g.vwgt[v] + g.vwgt[u] > max_vwgt) continue;
      if (g.adjwgt[e] > best_w) { best_w = g.adjwgt[e]; best = u; }
    }
    match[v] = best == -1 ? v : best;
    if (best != -1) match[best] = v;
  }

  Coarsening c;
  c.fine_to_coarse.assign(n, -1);
  index_t nc = 0;
  for (index_t v : order) {
    if (c.fine_to_coarse[v] != -1) continue;
    c.fine_to_coarse[v] = nc;
    if (match[v] != v) c.fine_to_coarse[match[v]] = nc;
    ++nc;
  }

  c.coarse.vwgt.assign(nc, 0);
  for (index_t v = 0; v < n; ++v) c.coarse.vwgt[c.fine_to_coarse[v]] += g.vwgt[v];

  // Aggregate edges between coarse vertices.
  std::vector<std::vector<std::pair<index_t, index_t>>> buckets(nc);
  for (index_t v = 0; v < n; ++v) {
    const index_t cv = c.fine_to_coarse[v];
    for (index_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      const index_t cu = c.fine_to_coarse[g.adjncy[e]];
      if (cu != cv) buckets[cv].emplace_back(cu, g.adjwgt[e]);
    }
  }
  c.coarse.xadj.assign(nc + 1, 0);
  for (index_t cv = 0; cv < nc; ++cv) {
    auto& b = buckets[cv];
    std::sort(b.begin(), b.end());
    index_t unique_count = 0;
    for (std::size_t i = 0; i < b.size();) {
      std::size_t j = i;
      while (j < b.size() && b[j].first == b[i].first) ++j;
      ++unique_count;
      i = j;
    }
    c.coarse.xadj[cv + 1] = c.coarse.xadj[cv] + unique_count;
  }
  c.coarse.adjncy.resize(c.coarse.xadj[nc]);
  c.coarse.adjwgt.resize(c.coarse.xadj[nc]);
  for (index_t cv = 0; cv < nc; ++cv) {
    auto& b = buckets[cv];
    index_t pos = c.coarse.xadj[cv];
    for (std::size_t i = 0; i < b.size();) {
      std::size_t j = i;
      index_t w = 0;
      while (j < b.size() && b[j].first == b[i].first) { w += b[j].second; ++j; }
      c.coarse.adjncy[pos] = b[i].first;
      c.coarse.adjwgt[pos] = w;
      ++pos;
      i = j;
    }
  }
  return c;
}

// Gain of moving u to the other side: external - internal edge weight.
index_t move_gain(const WorkGraph& g, const std::vector<std::int8_t>& side, index_t u) {
  index_t gain = 0;
  for (index_t e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
    if (g.adjncy[e] == u) continue;
    gain += side[g.adjncy[e]] != side[u] ? g.adjwgt[e] : -g.adjwgt[e];
  }
  return gain;
}

// One Fiduccia-Mattheyses pass with rollback to the best prefix. Sides
// must stay within [lo, hi] for the side-0 weight. Returns cut improvement.
index_t fm_pass(const WorkGraph& g, std::vector<std::int8_t>& side,
                index_t& w0, index_t lo, index_t hi) {
  const index_t n = g.n();
  // Lazy max-heaps per side: (gain, vertex); stale entries re-checked on pop.
  using Entry = std::pair<index_t, index_t>;
  std::priority_queue<Entry> heap[2];
  std::vector<index_t> gain(n);
  std::vector<std::int8_t> moved(n, 0);
  for (index_t v = 0; v < n; ++v) {
    gain[v] = move_gain(g, side, v);
    heap[side[v]].push({gain[v], v});
  }

  std::vector<index_t> sequence;
  index_t cur_delta = 0, best_delta = 0, best_len = 0;
  index_t cur_w0 = w0;

  auto pop_side = [&](int s) -> index_t {
    auto& h = heap[s];
    while (!h.empty()) {
      auto [cached, v] = h.top();
      if (moved[v] || side[v] != s) { h.pop(); continue; }
      if (cached != gain[v]) { h.pop(); h.push({gain[v], v}); continue; }
      return v;
    }
    return -1;
  };

  for (index_t step = 0; step < n; ++step) {
    // Feasible donor sides: moving from side 0 shrinks w0, from side 1 grows it.
    const index_t cand0 = pop_side(0);
    const index_t cand1 = pop_side(1);
    index_t pick = -1;
    const bool can0 = cand0 != -1 && cur_w0 - g.vwgt[cand0] >= lo;
    const bool can1 = cand1 != -1 && cur_w0 + g.vwgt[cand1] <= hi;
    if (can0 && can1) pick = gain[cand0] >= gain[cand1] ? cand0 : cand1;
    else if (can0) pick = cand0;
    else if (can1) pick = cand1;
    if (pick == -1) break;

    heap[side[pick]].pop();
    moved[pick] = 1;
    cur_delta += gain[pick];
    cur_w0 += side[pick] == 0 ? -g.vwgt[pick] : g.vwgt[pick];
    side[pick] = static_cast<std::int8_t>(1 - side[pick]);
    sequence.push_back(pick);
    for (index_t e = g.xadj[pick]; e < g.xadj[pick + 1]; ++e) {
      const index_t u = g.adjncy[e];
      if (u == pick) continue;
      gain[u] = move_gain(g, side, u);
      if (!moved[u]) heap[side[u]].push({gain[u], u});
    }
    if (cur_delta > best_delta) { best_delta = cur_delta; best_len = static_cast<index_t>(sequence.size()); }
  }

  // Roll back moves past the best prefix, then recompute w0.
  for (index_t i = static_cast<index_t>(sequence.size()) - 1; i >= best_len; --i)
    side[sequence[i]] = static_cast<std::int8_t>(1 - side[sequence[i]]);
  index_t w = 0;
  for (index_t v = 0; v < n; ++v) if (side[v] == 0) w += g.vwgt[v];
  w0 = w;
  return best_delta;
}

// Forced rebalance: while a side is too heavy, move its cheapest vertex
// across regardless of cut impact.
void rebalance(const WorkGraph& g, std::vector<std::int8_t>& side, index_t& w0,
               index_t lo, index_t hi) {
  auto move_best_from = [&](int s) {
    index_t best = -1, best_gain = 0;
    for (index_t v = 0; v < g.n(); ++v)
      if (side[v] == s) {
        const index_t gain = move_gain(g, side, v);
        if (best == -1 || gain > best_gain) { best = v; best_gain = gain; }
      }
    if (best == -1) return false;
    w0 += s == 0 ? -g.vwgt[best] : g.vwgt[best];
    side[best] = static_cast<std::int8_t>(1 - s);
    return true;
  };
  while (w0 > hi)
    if (!move_best_from(0)) break;
  while (w0 < lo)
    if (!move_best_from(1)) break;
}

void refine(const WorkGraph& g, std::vector<std::int8_t>& side, index_t& w0,
            index_t lo, index_t hi, int max_passes = 8) {
  rebalance(g, side, w0, lo, hi);
  for (int pass = 0; pass < max_passes; ++pass)
    if (fm_pass(g, side, w0, lo, hi) <= 0) break;
  rebalance(g, side, w0, lo, hi);
}

// Greedy region growing from a random start until side 0 reaches the
// target weight. Restarts pick a fresh unreached vertex on disconnects.
std::vector<std::int8_t> grow_bisection(const WorkGraph& g, index_t target0,
                                        std::mt19937_64& rng) {
  const index_t n = g.n();
  std::vector<std::int8_t> side(n, 1);
  std::vector<std::int8_t> visited(n, 0);
  std::uniform_int_distribution<index_t> pick(0, n - 1);

  index_t w0 = 0;
  // (gain, vertex) frontier; prefer pulling strongly-connected vertices.
  std::priority_queue<std::pair<index_t, index_t>> frontier;
  index_t start = pick(rng);
  frontier.push({0, start});
  while (w0 < target0) {
    if (frontier.empty()) {
      index_t fresh = -1;
      for (index_t tries = 0; tries < 4 && fresh == -1; ++tries) {
        index_t cand = pick(rng);
        if (!visited[cand]) fresh = cand;
      }
      if (fresh == -1)
        for (index_t v = 0; v < n && fresh == -1; ++v)
          if (!visited[v]) fresh = v;
      if (fresh == -1) break;
      frontier.push({0, fresh});
      continue;
    }
    auto [prio, v] = frontier.top();
    frontier.pop();
    if (visited[v]) continue;
    visited[v] = 1;
    side[v] = 0;
    w0 += g.vwgt[v];
    for (index_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      const index_t u = g.adjncy[e];
      if (!visited[u]) frontier.push({g.adjwgt[e], u});
    }
  }
  return side;
}

// Balance window for the side-0 weight around the target, clamped to the
// hard bounds [min0, max0] that keep both sides large enough to host
// their share of parts.
std::pair<index_t, index_t> balance_window(index_t total, index_t target0,
                                           double eps, index_t max_vwgt,
                                           index_t min0, index_t max0) {
  const auto slack = std::max<index_t>(static_cast<index_t>(std::ceil(eps * double(total))),
                                       max_vwgt);
  index_t lo = std::max(target0 - slack, min0);
  index_t hi = std::min(target0 + slack, max0);
  if (lo > hi) { lo = min0; hi = max0; }
  return {lo, hi};
}

// Multilevel bisection: side-0 weight lands within eps of target0 and
// inside the hard bounds [min0, max0].
std::vector<std::int8_t> multilevel_bisect(const WorkGraph& g, index_t target0,
                                           double eps, index_t min0, index_t max0,
                                           std::mt19937_64& rng) {
  constexpr index_t kCoarsenTarget = 64;
  const index_t total = g.total_weight();

  if (g.n() > kCoarsenTarget) {
    const index_t max_vwgt =
        std::max<index_t>(1, static_cast<index_t>(1.5 * double(total) / double(kCoarsenTarget)));
    Coarsening c = coarsen_once(g, max_vwgt, rng);
    if (c.coarse.n() < static_cast<index_t>(0.98 * double(g.n()))) {
      std::vector<std::int8_t> coarse_side =
          multilevel_bisect(c.coarse, target0, eps, min0, max0, rng);
      std::vector<std::int8_t> side(g.n());
      for (index_t v = 0; v < g.n(); ++v) side[v] = coarse_side[c.fine_to_coarse[v]];
      index_t w0 = 0;
      for (index_t v = 0; v < g.n(); ++v) if (side[v] == 0) w0 += g.vwgt[v];
      const index_t finest_vwgt = *std::max_element(g.vwgt.begin(), g.vwgt.end());
      auto [lo, hi] = balance_window(total, target0, eps, finest_vwgt, min0, max0);
      refine(g, side, w0, lo, hi);
      return side;
    }
    // Matching stalled; fall through to direct bisection.
  }

  const index_t max_vwgt = *std::max_element(g.vwgt.begin(), g.vwgt.end());
  auto [lo, hi] = balance_window(total, target0, eps, max_vwgt, min0, max0);
  std::vector<std::int8_t> best;
  index_t best_cut = -1;
  bool best_balanced = false;
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<std::int8_t> side = grow_bisection(g, target0, rng);
    index_t w0 = 0;
    for (index_t v = 0; v < g.n(); ++v) if (side[v] == 0) w0 += g.vwgt[v];
    refine(g, side, w0, lo, hi);
    const index_t cut = cut_weight(g, side);
    const bool balanced = w0 >= lo && w0 <= hi;
    const bool better = best.empty() || (balanced && !best_balanced) ||
                        (balanced == best_balanced && cut < best_cut);
    if (better) { best = side; best_cut = cut; best_balanced = balanced; }
  }
  return best;
}

// Recursive k-way partitioning into out[v] in [part_base, part_base + k).
// cap_leaf is the absolute bound on any final part's weight; each
// bisection constrains both sides so that every leaf can stay under it.
void partition_recursive(const WorkGraph& g, const std::vector<index_t>& global_ids,
                         index_t k, index_t part_base, double eps, index_t cap_leaf,
                         std::mt19937_64& rng, std::vector<std::int32_t>& out) {
  if (k == 1) {
    for (index_t id : global_ids) out[id] = static_cast<std::int32_t>(part_base);
    return;
  }
  const index_t k_left = (k + 1) / 2;
  const index_t k_right = k - k_left;
  const index_t total = g.total_weight();
  const index_t target0 = static_cast<index_t>(std::llround(double(total) * double(k_left) / double(k)));
  // Tighter per-level window so imbalance does not compound across levels.
  const double level_eps = eps / (std::ceil(std::log2(double(k))) + 1.0);

  const index_t min0 = std::max(k_left, total - k_right * cap_leaf);
  const index_t max0 = std::min(total - k_right, k_left * cap_leaf);
  std::vector<std::int8_t> side = multilevel_bisect(g, target0, level_eps, min0, max0, rng);

  for (int s = 0; s < 2; ++s) {
    std::vector<index_t> sub_ids;
    std::vector<index_t> local(g.n(), -1);
    for (index_t v = 0; v < g.n(); ++v)
      if (side[v] == s) {
        local[v] = static_cast<index_t>(sub_ids.size());
        sub_ids.push_back(v);
      }
    WorkGraph sub;
    sub.vwgt.resize(sub_ids.size());
    sub.xadj.assign(sub_ids.size() + 1, 0);
    for (std::size_t i = 0; i < sub_ids.size(); ++i) {
      const index_t v = sub_ids[i];
      sub.vwgt[i] = g.vwgt[v];
      for (index_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e)
        if (side[g.adjncy[e]] == s) sub.xadj[i + 1]++;
    }
    std::partial_sum(sub.xadj.begin(), sub.xadj.end(), sub.xadj.begin());
    sub.adjncy.resize(sub.xadj.back());
    sub.adjwgt.resize(sub.xadj.back());
    std::vector<index_t> fill(sub.xadj.begin(), sub.xadj.end() - 1);
    for (std::size_t i = 0; i < sub_ids.size(); ++i) {
      const index_t v = sub_ids[i];
      for (index_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        const index_t u = g.adjncy[e];
        if (side[u] != s) continue;
        sub.adjncy[fill[i]] = local[u];
        sub.adjwgt[fill[i]] = g.adjwgt[e];
        ++fill[i];
      }
    }
    std::vector<index_t> sub_globals(sub_ids.size());
    for (std::size_t i = 0; i < sub_ids.size(); ++i) sub_globals[i] = global_ids[sub_ids[i]];
    partition_recursive(sub, sub_globals, s == 0 ? k_left : k_right,
                        s == 0 ? part_base : part_base + k_left, eps, cap_leaf, rng, out);
  }
}

}  // namespace

std::vector<std::int32_t> partition(const CsrGraph& graph, index_t k,
                                    std::uint64_t seed, double imbalance) {
  if (k < 1 || k > graph.num_nodes)
    throw std::invalid_argument("partition: k must be in [1, num_nodes]");
  std::vector<std::int32_t> out(graph.num_nodes, 0);
  if (k == 1) return out;

  WorkGraph g = from_csr(graph);
  std::vector<index_t> ids(graph.num_nodes);
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  const index_t cap_leaf = static_cast<index_t>(
      std::floor(double((graph.num_nodes + k - 1) / k) * (1.0 + imbalance)));
  partition_recursive(g, ids, k, 0, imbalance, std::max<index_t>(cap_leaf, 1), rng, out);
  return out;
}

index_t PartitionHierarchy::parts_at_level(index_t level) const {
  index_t p = 1;
  for (index_t l = 0; l < level; ++l) p *= branching[l];
  return p;
}

PartitionHierarchy build_hierarchy(const CsrGraph& graph,
                                   const std::vector<index_t>& branching,
                                   std::uint64_t seed, double imbalance) {
  if (branching.empty()) throw std::invalid_argument("build_hierarchy: empty branching");
  index_t leaves = 1;
  for (index_t p : branching) {
    if (p < 1) throw std::invalid_argument("build_hierarchy: branching factors must be >= 1");
    leaves *= p;
  }
  if (leaves > graph.num_nodes)
    throw std::invalid_argument("build_hierarchy: product of branching exceeds node count");

  PartitionHierarchy h;
  h.num_nodes = graph.num_nodes;
  h.branching = branching;

  // Groups of original node ids, refined level by level; input order is
  // preserved inside every group.
  std::vector<std::vector<index_t>> groups{std::vector<index_t>(graph.num_nodes)};
  std::iota(groups[0].begin(), groups[0].end(), 0);

  std::mt19937_64 rng(seed);
  for (std::size_t level = 0; level < branching.size(); ++level) {
    const index_t p = branching[level];
    std::vector<std::vector<index_t>> next;
    next.reserve(groups.size() * p);
    for (const auto& group : groups) {
      if (p == 1) {
        next.push_back(group);
        continue;
      }
      if (static_cast<index_t>(group.size()) < p)
        throw std::invalid_argument("build_hierarchy: a part has fewer nodes than its branching");
      // Induced subgraph over the group, local ids in group order.
      std::vector<index_t> local(graph.num_nodes, -1);
      for (std::size_t i = 0; i < group.size(); ++i) local[group[i]] = static_cast<index_t>(i);
      std::vector<std::pair<index_t, index_t>> edges;
      for (std::size_t i = 0; i < group.size(); ++i)
        for (index_t nb : graph.neighbors_of(group[i]))
          if (local[nb] != -1 && local[nb] >= static_cast<index_t>(i))
            edges.emplace_back(static_cast<index_t>(i), local[nb]);
      CsrGraph sub = build_csr(static_cast<index_t>(group.size()), edges);
      std::uniform_int_distribution<std::uint64_t> subseed;
      auto assignment = partition(sub, p, subseed(rng), imbalance);
      std::vector<std::vector<index_t>> parts(p);
      for (std::size_t i = 0; i < group.size(); ++i)
        parts[assignment[i]].push_back(group[i]);
      for (auto& part : parts) next.push_back(std::move(part));
    }
    groups = std::move(next);
    h.assignment.emplace_back(graph.num_nodes, 0);
    for (std::size_t gid = 0; gid < groups.size(); ++gid)
      for (index_t v : groups[gid]) h.assignment[level][v] = static_cast<std::int32_t>(gid);
  }

  h.permutation.assign(graph.num_nodes, 0);
  index_t next_id = 0;
  for (const auto& group : groups)
    for (index_t v : group) h.permutation[v] = next_id++;
  h.inverse = inverse_permutation(h.permutation);
  return h;
}

CsrGraph reorder(const CsrGraph& graph, const PartitionHierarchy& hierarchy) {
  if (graph.num_nodes != hierarchy.num_nodes)
    throw std::invalid_argument("reorder: hierarchy built on a different graph");
  return apply_permutation(graph, hierarchy.permutation);
}

PermLevel parse_perm_level(const std::string& name) {
  if (name == "none") return PermLevel::none;
  if (name == "first") return PermLevel::first;
  if (name == "second") return PermLevel::second;
  throw std::invalid_argument("unknown permutation level: " + name);
}

std::string to_string(PermLevel level) {
  switch (level) {
    case PermLevel::none: return "none";
    case PermLevel::first: return "first";
    case PermLevel::second: return "second";
  }
  return "?";
}

std::vector<index_t> permute_level(const PartitionHierarchy& hierarchy,
                                   PermLevel level, std::uint64_t seed) {
  if (level == PermLevel::none) return hierarchy.permutation;
  const index_t depth = level == PermLevel::first ? 1 : 2;
  if (hierarchy.levels() < depth)
    throw std::invalid_argument("permute_level: hierarchy has fewer than " +
                                std::to_string(depth) + " levels");

  const auto& assignment = hierarchy.assignment[depth - 1];
  const index_t num_blocks = hierarchy.parts_at_level(depth);

  // Blocks occupy contiguous new-id ranges; gather sizes, shuffle the
  // block order, and repack keeping within-block order.
  std::vector<index_t> block_size(num_blocks, 0);
  for (index_t v = 0; v < hierarchy.num_nodes; ++v) block_size[assignment[v]]++;

  std::vector<index_t> block_order(num_blocks);
  std::iota(block_order.begin(), block_order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(block_order.begin(), block_order.end(), rng);

  std::vector<index_t> new_start(num_blocks, 0);
  index_t offset = 0;
  for (index_t b : block_order) { new_start[b] = offset; offset += block_size[b]; }

  // Blocks are contiguous in the hierarchy order; each block's first new
  // id marks the start of its current range.
  std::vector<index_t> old_start(num_blocks, -1);
  for (index_t new_id = 0; new_id < hierarchy.num_nodes; ++new_id) {
    const index_t b = assignment[hierarchy.inverse[new_id]];
    if (old_start[b] == -1) old_start[b] = new_id;
  }

  std::vector<index_t> perm(hierarchy.num_nodes);
  for (index_t v = 0; v < hierarchy.num_nodes; ++v) {
    const index_t b = assignment[v];
    perm[v] = new_start[b] + (hierarchy.permutation[v] - old_start[b]);
  }
  return perm;
}

std::vector<index_t> hierarchy_cuts(const CsrGraph& graph,
                                    const PartitionHierarchy& hierarchy) {
  std::vector<index_t> cuts;
  cuts.reserve(hierarchy.assignment.size());
  for (const auto& a : hierarchy.assignment) cuts.push_back(edge_cut(graph, a));
  return cuts;
}

}  // namespace ttgnn

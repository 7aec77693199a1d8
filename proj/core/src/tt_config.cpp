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
#include "ttgnn/tt_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ttgnn {

namespace {

index_t checked_product(const std::vector<index_t>& v) {
  index_t p = 1;
  for (index_t x : v) p *= x;
  return p;
}

// Best d-way factorization of `value` with every factor inside
// [min_factor, max_factor], minimizing the max-minus-min spread (ties:
// lexicographically smallest). Empty when no such factorization exists.
std::vector<index_t> best_factorization(index_t value, index_t d, index_t min_factor,
                                        index_t max_factor) {
  if (d == 1)
    return (value >= min_factor && value <= max_factor) ? std::vector<index_t>{value}
                                                        : std::vector<index_t>{};
  std::vector<index_t> best;
  index_t best_spread = std::numeric_limits<index_t>::max();

  // Recursive divisor search, factors emitted in nondecreasing order.
  std::vector<index_t> current;
  auto rec = [&](auto&& self, index_t rem, index_t parts, index_t lo) -> void {
    if (parts == 1) {
      if (rem < lo || rem > max_factor) return;
      current.push_back(rem);
      const index_t spread = current.back() - current.front();
      if (spread < best_spread ||
          (spread == best_spread &&
           std::lexicographical_compare(current.begin(), current.end(),
                                        best.begin(), best.end()))) {
        best = current;
        best_spread = spread;
      }
      current.pop_back();
      return;
    }
    // Keep the sequence nondecreasing: the next factor cannot exceed
    // rem^(1/parts), or the remainder could not stay above it.
    const index_t cap = std::min(
        max_factor,
        static_cast<index_t>(std::floor(std::pow(double(rem), 1.0 / double(parts)))) + 1);
    for (index_t f = lo; f <= cap; ++f) {
      if (rem % f != 0) continue;
      current.push_back(f);
      self(self, rem / f, parts - 1, f);
      current.pop_back();
    }
  };
  rec(rec, value, d, min_factor);
  return best;
}

}  // namespace

index_t TTConfig::padded_rows() const { return checked_product(row_factors); }
index_t TTConfig::padded_cols() const { return checked_product(col_factors); }

std::array<index_t, 4> TTConfig::core_shape(index_t k) const {
  return {ranks[k], row_factors[k], col_factors[k], ranks[k + 1]};
}

index_t TTConfig::core_size(index_t k) const {
  auto s = core_shape(k);
  return s[0] * s[1] * s[2] * s[3];
}

void TTConfig::validate() const {
  if (num_nodes <= 0) throw std::invalid_argument("TTConfig: num_nodes must be positive");
  if (emb_dim <= 0) throw std::invalid_argument("TTConfig: emb_dim must be positive");
  const index_t d = num_cores();
  if (d < 2) throw std::invalid_argument("TTConfig: need at least 2 cores");
  if (static_cast<index_t>(col_factors.size()) != d)
    throw std::invalid_argument("TTConfig: row/col factor lists differ in length");
  if (static_cast<index_t>(ranks.size()) != d + 1)
    throw std::invalid_argument("TTConfig: rank list must have d+1 entries");
  if (ranks.front() != 1 || ranks.back() != 1)
    throw std::invalid_argument("TTConfig: boundary ranks R_0 and R_d must be 1");
  for (index_t r : ranks)
    if (r <= 0) throw std::invalid_argument("TTConfig: ranks must be positive");
  for (index_t k = 0; k < d; ++k) {
    if (row_factors[k] <= 0 || col_factors[k] <= 0)
      throw std::invalid_argument("TTConfig: factors must be positive");
  }
  if (padded_rows() < num_nodes)
    throw std::invalid_argument("TTConfig: prod(row_factors) < num_nodes");
  if (padded_cols() < emb_dim)
    throw std::invalid_argument("TTConfig: prod(col_factors) < emb_dim");
}

std::vector<index_t> balanced_factors(index_t value, index_t d) {
  if (value <= 0) throw std::invalid_argument("balanced_factors: value must be positive");
  if (d <= 0) throw std::invalid_argument("balanced_factors: d must be positive");
  if (value == 1) return std::vector<index_t>(d, 1);

  // Among padded values within a small window above `value`, pick the
  // most balanced factorization (smallest max-minus-min spread, then the
  // least padding). Factors are confined to 1.5x of ceil(value^(1/d))
  // on either side; the window doubles until some candidate fits.
  const index_t root = static_cast<index_t>(std::ceil(std::pow(double(value), 1.0 / double(d))));
  const index_t min_factor = std::max<index_t>(1, (2 * root) / 3);
  const index_t max_factor = std::max<index_t>(2, (3 * root + 1) / 2);
  for (index_t window = std::max<index_t>(8, value / 1000);; window *= 2) {
    std::vector<index_t> best;
    index_t best_spread = std::numeric_limits<index_t>::max();
    for (index_t padded = value; padded <= value + window; ++padded) {
      auto f = best_factorization(padded, d, min_factor, max_factor);
      if (f.empty()) continue;
      const index_t spread = f.back() - f.front();
      if (spread < best_spread) {
        best = std::move(f);
        best_spread = spread;
        if (spread == 0) break;
      }
    }
    if (!best.empty()) return best;
  }
}

TTConfig plan_factorization(index_t num_nodes, index_t emb_dim, index_t d,
                            const std::vector<index_t>& ranks,
                            bool ortho_friendly) {
  if (num_nodes <= 0 || emb_dim <= 0)
    throw std::invalid_argument("plan_factorization: dimensions must be positive");
  if (d < 2) throw std::invalid_argument("plan_factorization: d must be >= 2");
  if (static_cast<index_t>(ranks.size()) != d + 1)
    throw std::invalid_argument("plan_factorization: rank list must have d+1 entries");

  std::vector<index_t> m = balanced_factors(num_nodes, d);
  std::vector<index_t> n = balanced_factors(emb_dim, d);
  if (ortho_friendly) {
    std::sort(m.begin(), m.end());                    // largest m last
    std::sort(n.begin(), n.end(), std::greater<>());  // smallest n last
  }
  return plan_factorization(num_nodes, emb_dim, std::move(m), std::move(n), ranks);
}

TTConfig plan_factorization(index_t num_nodes, index_t emb_dim,
                            std::vector<index_t> row_factors,
                            std::vector<index_t> col_factors,
                            const std::vector<index_t>& ranks) {
  TTConfig config;
  config.num_nodes = num_nodes;
  config.emb_dim = emb_dim;
  config.row_factors = std::move(row_factors);
  config.col_factors = std::move(col_factors);
  config.ranks = ranks;
  config.validate();
  return config;
}

RowCoordinate index_to_coordinate(const TTConfig& config, index_t row) {
  if (row < 0 || row >= config.padded_rows())
    throw std::out_of_range("index_to_coordinate: row index " + std::to_string(row) +
                            " out of [0, " + std::to_string(config.padded_rows()) + ")");
  const index_t d = config.num_cores();
  RowCoordinate coord;
  coord.parts.resize(d);
  index_t rem = row;
  for (index_t k = d - 1; k >= 0; --k) {
    coord.parts[k] = rem % config.row_factors[k];
    rem /= config.row_factors[k];
  }
  return coord;
}

index_t coordinate_to_index(const TTConfig& config, const RowCoordinate& coord) {
  const index_t d = config.num_cores();
  if (static_cast<index_t>(coord.parts.size()) != d)
    throw std::invalid_argument("coordinate_to_index: wrong coordinate length");
  index_t row = 0;
  for (index_t k = 0; k < d; ++k) {
    if (coord.parts[k] < 0 || coord.parts[k] >= config.row_factors[k])
      throw std::out_of_range("coordinate_to_index: digit out of range");
    row = row * config.row_factors[k] + coord.parts[k];
  }
  return row;
}

index_t count_params(const TTConfig& config) {
  index_t total = 0;
  for (index_t k = 0; k < config.num_cores(); ++k) total += config.core_size(k);
  return total;
}

double compression_ratio(const TTConfig& config) {
  return double(config.num_nodes) * double(config.emb_dim) / double(count_params(config));
}

std::string to_string(const TTConfig& config) {
  std::ostringstream os;
  os << config.num_nodes << "x" << config.emb_dim << " as ";
  for (index_t k = 0; k < config.num_cores(); ++k) {
    auto s = config.core_shape(k);
    if (k) os << " * ";
    os << "(" << s[0] << "," << s[1] << "," << s[2] << "," << s[3] << ")";
  }
  return os.str();
}

}  // namespace ttgnn

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

#include "test_oracles.hpp"
#include "ttgnn/tt_config.hpp"

using namespace ttgnn;

namespace {

// The three published decompositions used as arithmetic fixtures.
TTConfig arxiv_config(index_t rank) {
  return plan_factorization(169363, 128, {55, 55, 56}, {8, 4, 4}, {1, rank, rank, 1});
}
TTConfig products_config(index_t rank) {
  return plan_factorization(2449029, 100, {125, 140, 140}, {4, 5, 5}, {1, rank, rank, 1});
}
TTConfig papers_config(index_t rank) {
  return plan_factorization(111059956, 128, {480, 500, 500}, {8, 4, 4}, {1, rank, rank, 1});
}

}  // namespace

TEST_CASE("explicit factorization reproduces the published core shapes") {
  TTConfig cfg = arxiv_config(16);
  CHECK(cfg.core_shape(0) == std::array<index_t, 4>{1, 55, 8, 16});
  CHECK(cfg.core_shape(1) == std::array<index_t, 4>{16, 55, 4, 16});
  CHECK(cfg.core_shape(2) == std::array<index_t, 4>{16, 56, 4, 1});
  CHECK(cfg.padded_rows() == 169400);
  CHECK(cfg.padded_cols() == 128);
}

TEST_CASE("balanced planning of an exact cube needs no padding") {
  TTConfig cfg = plan_factorization(8, 8, 3, {1, 1, 1, 1});
  CHECK(cfg.row_factors == std::vector<index_t>{2, 2, 2});
  CHECK(cfg.col_factors == std::vector<index_t>{2, 2, 2});
  CHECK(cfg.padded_rows() == 8);  // zero padding
}

TEST_CASE("auto planning pads minimally and orders factors for the initializer") {
  // 169363 has no balanced 3-factorization; the closest padded value that
  // does is 169400 = 55 * 55 * 56.
  TTConfig cfg = plan_factorization(169363, 128, 3, {1, 8, 8, 1});
  CHECK(cfg.row_factors == std::vector<index_t>{55, 55, 56});  // largest last
  CHECK(cfg.col_factors == std::vector<index_t>{8, 4, 4});     // smallest last
}

TEST_CASE("planning rejects degenerate dimensions and bad rank lists") {
  CHECK_THROWS_AS(plan_factorization(0, 8, 3, {1, 2, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(plan_factorization(8, 0, 3, {1, 2, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(plan_factorization(8, 8, 3, {1, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(plan_factorization(8, 8, 1, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(plan_factorization(8, 8, {2, 2, 2}, {2, 2, 2}, {2, 2, 2, 2}),
                  std::invalid_argument);
}

TEST_CASE("node 46 of a 48-row plan maps to coordinate (2,3,2)") {
  TTConfig cfg = plan_factorization(48, 8, {3, 4, 4}, {2, 2, 2}, {1, 2, 2, 1});
  CHECK(index_to_coordinate(cfg, 46).parts == std::vector<index_t>{2, 3, 2});
}

TEST_CASE("coordinate mapping matches the mixed-radix odometer") {
  TTConfig cfg = plan_factorization(125, 8, {5, 5, 5}, {2, 2, 2}, {1, 2, 2, 1});
  auto all = oracle::enumerate_coordinates({5, 5, 5});
  REQUIRE(all.size() == 125);
  for (index_t i = 0; i < 125; ++i) {
    CHECK(index_to_coordinate(cfg, i).parts == all[i]);
    CHECK(coordinate_to_index(cfg, {all[i]}) == i);
  }
  CHECK(index_to_coordinate(cfg, 124).parts == std::vector<index_t>{4, 4, 4});
  CHECK(index_to_coordinate(cfg, 0).parts == std::vector<index_t>{0, 0, 0});
  CHECK_THROWS_AS(index_to_coordinate(cfg, 125), std::out_of_range);
  CHECK_THROWS_AS(index_to_coordinate(cfg, -1), std::out_of_range);
}

TEST_CASE("coordinate round trip is exact up to 1e5 rows") {
  for (auto factors : {std::vector<index_t>{47, 45, 47}, std::vector<index_t>{99, 101},
                       std::vector<index_t>{7, 3, 9, 11}}) {
    index_t rows = 1;
    for (index_t f : factors) rows *= f;
    REQUIRE(rows <= 100000);
    std::vector<index_t> ranks(factors.size() + 1, 1);
    TTConfig cfg = plan_factorization(rows, 1, factors,
                                      std::vector<index_t>(factors.size(), 1), ranks);
    for (index_t i = 0; i < rows; ++i)
      CHECK(coordinate_to_index(cfg, index_to_coordinate(cfg, i)) == i);
  }
}

TEST_CASE("parameter counts reproduce all nine published cells") {
  struct Cell { TTConfig cfg; index_t params; index_t reduction; double full_dim; };
  // The published reductions are quoted against 128-dimensional full
  // tables for all three datasets (including the 100-dim one).
  const std::vector<Cell> cells = {
      {arxiv_config(16), 66944, 323, 128},    {arxiv_config(32), 246528, 88, 128},
      {arxiv_config(64), 943616, 23, 128},    {products_config(16), 198400, 1580, 128},
      {products_config(32), 755200, 415, 128},{products_config(64), 2944000, 106, 128},
      {papers_config(16), 605440, 23479, 128},{papers_config(32), 2234880, 6360, 128},
      {papers_config(64), 8565760, 1659, 128},
  };
  for (const auto& cell : cells) {
    CAPTURE(cell.params);
    CHECK(count_params(cell.cfg) == cell.params);
    const double ratio = double(cell.cfg.num_nodes) * cell.full_dim / double(cell.params);
    // The published integers mix truncation and nearest rounding, so
    // accept whichever of the two the true ratio yields.
    const bool display_matches = static_cast<index_t>(std::floor(ratio)) == cell.reduction ||
                                 static_cast<index_t>(std::llround(ratio)) == cell.reduction;
    CHECK(display_matches);
  }
}

TEST_CASE("compression ratio follows its definition") {
  TTConfig cfg = arxiv_config(16);
  CHECK(compression_ratio(cfg) == doctest::Approx(169363.0 * 128.0 / 66944.0).epsilon(1e-12));
}

TEST_CASE("parameter count is strictly increasing in each interior rank") {
  for (index_t k = 1; k <= 2; ++k) {
    std::vector<index_t> ranks{1, 4, 4, 1};
    TTConfig base = plan_factorization(60, 8, {3, 4, 5}, {2, 2, 2}, ranks);
    ranks[k] += 1;
    TTConfig bumped = plan_factorization(60, 8, {3, 4, 5}, {2, 2, 2}, ranks);
    CHECK(count_params(bumped) > count_params(base));
  }
}

TEST_CASE("small dimensions factor with unit padding factors") {
  TTConfig cfg = plan_factorization(100, 4, 3, {1, 2, 2, 1});
  CHECK(cfg.padded_cols() >= 4);
  CHECK(cfg.col_factors.size() == 3);
}

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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ttgnn/experiment.hpp"

using namespace ttgnn;

namespace {

RunConfig tiny_config() {
  RunConfig c;
  // 512 = 8*8*8 keeps ortho-core feasible up to rank 4 (n_3 R_2 <= m_3).
  c.graph.num_nodes = 512;
  c.graph.num_blocks = 4;
  c.graph.p_in = 0.1;
  c.graph.p_out = 0.01;
  c.emb_dim = 8;
  c.rank = 2;
  c.epochs = 20;
  c.lr = 1e-2;
  c.hidden_dim = 8;
  c.seed = 1;
  return c;
}

}  // namespace

TEST_CASE("a single run is deterministic given its config") {
  RunConfig c = tiny_config();
  RunResult a = run_single(c);
  RunResult b = run_single(c);
  CHECK(a.final.loss == b.final.loss);
  CHECK(a.final.test_acc == b.final.test_acc);
  CHECK(a.embedding_params == b.embedding_params);
}

TEST_CASE("a one-cell grid produces a one-row report") {
  MatrixSpec spec;
  spec.base = tiny_config();
  MatrixReport report = run_experiment_matrix(spec);
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].runs.size() == 1);
  CHECK(report.all_ok());
}

TEST_CASE("reported parameter counts match the factorization arithmetic") {
  MatrixSpec spec;
  spec.base = tiny_config();
  spec.ranks = {2, 4};
  spec.seeds = {1, 2};
  MatrixReport report = run_experiment_matrix(spec);
  REQUIRE(report.cells.size() == 2);
  for (const auto& cell : report.cells) {
    TTConfig cfg = plan_factorization(512, 8, cell.rep_config.num_cores,
                                      cell.rep_config.rank_list());
    CHECK(cell.embedding_params == count_params(cfg));
    CHECK(cell.runs.size() == 2);
  }
}

TEST_CASE("a failing cell is recorded while the matrix continues") {
  MatrixSpec spec;
  spec.base = tiny_config();
  // Rank 40 is infeasible for ortho-core on this shape (n_d R_{d-1} >
  // m_d R_d), so that cell fails while rank 2 succeeds.
  spec.ranks = {2, 40};
  MatrixReport report = run_experiment_matrix(spec);
  REQUIRE(report.cells.size() == 2);
  CHECK(report.cells[0].runs.size() == 1);
  CHECK(report.cells[1].runs.empty());
  CHECK(report.cells[1].errors.size() == 1);
  CHECK_FALSE(report.all_ok());
}

TEST_CASE("mean and std summaries come from the per-seed finals") {
  MatrixSpec spec;
  spec.base = tiny_config();
  spec.seeds = {1, 2, 3};
  MatrixReport report = run_experiment_matrix(spec);
  REQUIRE(report.cells.size() == 1);
  const auto& cell = report.cells[0];
  std::vector<double> accs;
  for (const auto& r : cell.runs) accs.push_back(r.final.test_acc);
  double mean = 0;
  for (double a : accs) mean += a;
  mean /= double(accs.size());
  CHECK(cell.mean_test_acc == doctest::Approx(mean));
  CHECK(cell.std_test_acc == doctest::Approx(sample_std(accs)));
}

TEST_CASE("report files are written with the documented schemas") {
  MatrixSpec spec;
  spec.base = tiny_config();
  spec.perm_levels = {PermLevel::none, PermLevel::second};
  MatrixReport report = run_experiment_matrix(spec);

  auto csv_path = (std::filesystem::temp_directory_path() / "ttgnn_report.csv").string();
  auto json_path = (std::filesystem::temp_directory_path() / "ttgnn_report.json").string();
  write_report_csv(report, csv_path);
  write_report_json(report, json_path);

  std::ifstream csv(csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header.find("mean_test_acc") != std::string::npos);
  index_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == static_cast<index_t>(report.cells.size()));

  std::ifstream js(json_path);
  std::stringstream buf;
  buf << js.rdbuf();
  CHECK(buf.str().find("\"cells\"") != std::string::npos);
  CHECK(buf.str().find("\"history\"") != std::string::npos);
  std::remove(csv_path.c_str());
  std::remove(json_path.c_str());
}

TEST_CASE("threaded and sequential matrices agree") {
  MatrixSpec spec;
  spec.base = tiny_config();
  spec.base.epochs = 10;
  spec.perm_levels = {PermLevel::none, PermLevel::first};
  spec.seeds = {1, 2};
  MatrixReport seq = run_experiment_matrix(spec);
  spec.threads = 2;
  MatrixReport par = run_experiment_matrix(spec);
  REQUIRE(seq.cells.size() == par.cells.size());
  for (std::size_t i = 0; i < seq.cells.size(); ++i)
    CHECK(seq.cells[i].mean_test_acc == doctest::Approx(par.cells[i].mean_test_acc));
}

TEST_CASE("pooled standard deviation follows the two-sample formula") {
  std::vector<double> a{1.0, 2.0, 3.0};
  std::vector<double> b{2.0, 4.0};
  // var_a = 1, var_b = 2 -> pooled = sqrt((2*1 + 1*2)/3).
  CHECK(pooled_std(a, b) == doctest::Approx(std::sqrt(4.0 / 3.0)));
}

TEST_CASE("run config serializes to json with every knob") {
  std::string j = run_config_json(tiny_config());
  for (const char* key : {"backend", "rank", "init", "perm_level", "epochs", "seed", "p_in"})
    CHECK(j.find(key) != std::string::npos);
}

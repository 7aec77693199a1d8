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
#include "ttgnn/tt_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ttgnn {

namespace {

static_assert(std::endian::native == std::endian::little,
              "core file IO assumes a little-endian host");

constexpr char kMagic[4] = {'T', 'T', 'E', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw std::runtime_error("core file truncated in header");
  return v;
}

}  // namespace

void save_tt(const TTEmbedding& emb, const std::string& path) {
  emb.validate();
  const TTConfig& cfg = emb.config;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  write_u32(os, static_cast<std::uint32_t>(cfg.num_cores()));
  for (index_t k = 0; k < cfg.num_cores(); ++k) {
    auto s = cfg.core_shape(k);
    write_u32(os, static_cast<std::uint32_t>(s[1]));  // m_k
    write_u32(os, static_cast<std::uint32_t>(s[2]));  // n_k
    write_u32(os, static_cast<std::uint32_t>(s[0]));  // R_{k-1}
    write_u32(os, static_cast<std::uint32_t>(s[3]));  // R_k
  }
  for (index_t k = 0; k < cfg.num_cores(); ++k) {
    os.write(reinterpret_cast<const char*>(emb.cores[k].data()),
             static_cast<std::streamsize>(emb.cores[k].size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("write failed for " + path);

  nlohmann::json sidecar{
      {"num_nodes", cfg.num_nodes},
      {"emb_dim", cfg.emb_dim},
      {"row_factors", cfg.row_factors},
      {"col_factors", cfg.col_factors},
      {"ranks", cfg.ranks},
  };
  std::ofstream js(path + ".json");
  if (!js) throw std::runtime_error("cannot open " + path + ".json for writing");
  js << sidecar.dump(2) << "\n";
}

TTEmbedding load_tt(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path + ": not a TTE1 core file");

  const std::uint32_t d = read_u32(is);
  if (d < 2 || d > 64) throw std::runtime_error(path + ": implausible core count");

  TTConfig cfg;
  cfg.row_factors.resize(d);
  cfg.col_factors.resize(d);
  cfg.ranks.assign(d + 1, 1);
  for (std::uint32_t k = 0; k < d; ++k) {
    cfg.row_factors[k] = read_u32(is);
    cfg.col_factors[k] = read_u32(is);
    const std::uint32_t r_prev = read_u32(is);
    const std::uint32_t r_next = read_u32(is);
    if (k == 0 && r_prev != 1) throw std::runtime_error(path + ": R_0 != 1");
    if (k > 0 && static_cast<index_t>(r_prev) != cfg.ranks[k])
      throw std::runtime_error(path + ": inconsistent ranks between cores");
    cfg.ranks[k + 1] = r_next;
  }
  if (cfg.ranks.back() != 1) throw std::runtime_error(path + ": R_d != 1");

  cfg.num_nodes = cfg.padded_rows();
  cfg.emb_dim = cfg.padded_cols();
  if (std::filesystem::exists(path + ".json")) {
    std::ifstream js(path + ".json");
    nlohmann::json sidecar = nlohmann::json::parse(js);
    cfg.num_nodes = sidecar.at("num_nodes").get<index_t>();
    cfg.emb_dim = sidecar.at("emb_dim").get<index_t>();
  }

  TTEmbedding emb = TTEmbedding::zeros(cfg);
  for (std::uint32_t k = 0; k < d; ++k) {
    is.read(reinterpret_cast<char*>(emb.cores[k].data()),
            static_cast<std::streamsize>(emb.cores[k].size() * sizeof(double)));
    if (!is) throw std::runtime_error(path + ": truncated core data");
  }
  return emb;
}

}  // namespace ttgnn

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
#ifndef TTGNN_TT_IO_HPP
#define TTGNN_TT_IO_HPP

#include <string>

#include "ttgnn/tt_embedding.hpp"

namespace ttgnn {

/// Binary core file: magic "TTE1", d, then per-core m_k, n_k, R_{k-1}, R_k
/// (all little-endian u32), followed by the cores in order as little-endian
/// 64-bit floats, row-major over (R_{k-1}, m_k, n_k, R_k).
///
/// A JSON sidecar at `path`.json mirrors the TTConfig (including the
/// logical M and N, which the binary header does not carry).
void save_tt(const TTEmbedding& emb, const std::string& path);

/// Loads a core file. Uses the JSON sidecar for the logical M and N when
/// present; otherwise falls back to the padded dimensions.
TTEmbedding load_tt(const std::string& path);

}  // namespace ttgnn

#endif  // TTGNN_TT_IO_HPP

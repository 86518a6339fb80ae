// Copyright 2026 The stainaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "stainaug/contrastive_loss.hpp"
#include "stainaug/separation.hpp"

namespace stainaug {

// Binary matrix planes:
//   "SRAM" | u32 planes | u32 rows | u32 cols | planes*rows*cols f32
// plane-major, each plane row-major; all integers and floats little-endian.
//
// Feature batches:
//   "SRAF" | u32 rows | u32 cols | rows*cols f32, row-major, little-endian.

struct MatrixPlanes {
  std::uint32_t planes = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> data;

  std::span<const float> plane(std::uint32_t p) const {
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    return std::span<const float>(data).subspan(p * n, n);
  }
};

std::vector<std::byte> encode_matrix_planes(const MatrixPlanes& m);
/// Throws BadMagic, or ParseError naming the byte offset where data ran out.
MatrixPlanes decode_matrix_planes(std::span<const std::byte> bytes);
void write_matrix_planes(const std::filesystem::path& path, const MatrixPlanes& m);
MatrixPlanes read_matrix_planes(const std::filesystem::path& path);

/// Concentration map as three planes (alpha, beta, gamma).
MatrixPlanes to_planes(const ConcentrationMap& map);
ConcentrationMap from_planes(const MatrixPlanes& m);

std::vector<std::byte> encode_features(const FeatureBatch& batch);
FeatureBatch decode_features(std::span<const std::byte> bytes);
void write_features(const std::filesystem::path& path, const FeatureBatch& batch);
FeatureBatch read_features(const std::filesystem::path& path);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace stainaug

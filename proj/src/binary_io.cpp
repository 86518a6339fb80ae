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

#include "stainaug/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <string>
#include <string_view>

#include "stainaug/error.hpp"

namespace stainaug {
namespace {

constexpr std::string_view kMatrixMagic = "SRAM";
constexpr std::string_view kFeatureMagic = "SRAF";

class Writer {
 public:
  void magic(std::string_view m) {
    for (char c : m) out_.push_back(static_cast<std::byte>(c));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  void magic(std::string_view expected) {
    if (bytes_.size() < expected.size() ||
        std::memcmp(bytes_.data(), expected.data(), expected.size()) != 0) {
      throw Error(Errc::BadMagic, "expected magic \"" + std::string(expected) + "\" at byte offset 0");
    }
    pos_ = expected.size();
  }
  std::uint32_t u32(const char* what) {
    if (bytes_.size() - pos_ < 4) {
      throw Error(Errc::ParseError, std::string("truncated ") + what + " at byte offset " +
                                        std::to_string(pos_));
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  void expect_remaining(std::size_t values) const {
    const std::size_t need = values * 4;
    if (bytes_.size() - pos_ < need) {
      throw Error(Errc::ParseError, "payload truncated at byte offset " +
                                        std::to_string(bytes_.size()) + ", expected " +
                                        std::to_string(pos_ + need) + " bytes");
    }
    if (bytes_.size() - pos_ > need) {
      throw Error(Errc::ParseError, "trailing bytes after payload at byte offset " +
                                        std::to_string(pos_ + need));
    }
  }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

/// Element count from header dimensions; rejects products that cannot fit a file.
std::size_t element_count(std::initializer_list<std::uint32_t> dims) {
  std::size_t n = 1;
  for (std::uint32_t d : dims) {
    if (d != 0 && n > (std::size_t{1} << 60) / d) {
      throw Error(Errc::ParseError, "header dimensions overflow at byte offset 4");
    }
    n *= d;
  }
  return n;
}

}  // namespace

std::vector<std::byte> encode_matrix_planes(const MatrixPlanes& m) {
  if (m.data.size() != static_cast<std::size_t>(m.planes) * m.rows * m.cols) {
    throw Error(Errc::ShapeMismatch, "matrix data length does not match planes*rows*cols");
  }
  Writer w;
  w.magic(kMatrixMagic);
  w.u32(m.planes);
  w.u32(m.rows);
  w.u32(m.cols);
  for (float v : m.data) w.f32(v);
  return w.take();
}

MatrixPlanes decode_matrix_planes(std::span<const std::byte> bytes) {
  Reader r(bytes);
  r.magic(kMatrixMagic);
  MatrixPlanes m;
  m.planes = r.u32("plane count");
  m.rows = r.u32("row count");
  m.cols = r.u32("column count");
  const std::size_t n = element_count({m.planes, m.rows, m.cols});
  r.expect_remaining(n);
  m.data.resize(n);
  for (float& v : m.data) v = r.f32("value");
  return m;
}

MatrixPlanes to_planes(const ConcentrationMap& map) {
  MatrixPlanes m{3, static_cast<std::uint32_t>(map.height()), static_cast<std::uint32_t>(map.width()),
                 {}};
  const std::size_t n = map.pixel_count();
  m.data.resize(3 * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t c = 0; c < 3; ++c) m.data[c * n + p] = map.pixel(p)[c];
  }
  return m;
}

ConcentrationMap from_planes(const MatrixPlanes& m) {
  if (m.planes != 3) throw Error(Errc::ShapeMismatch, "concentration map needs exactly 3 planes");
  ConcentrationMap map(static_cast<int>(m.cols), static_cast<int>(m.rows));
  const std::size_t n = map.pixel_count();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t c = 0; c < 3; ++c) map.pixel(p)[c] = m.data[c * n + p];
  }
  return map;
}

std::vector<std::byte> encode_features(const FeatureBatch& batch) {
  Writer w;
  w.magic(kFeatureMagic);
  w.u32(static_cast<std::uint32_t>(batch.rows()));
  w.u32(static_cast<std::uint32_t>(batch.cols()));
  for (double v : batch.values()) w.f32(static_cast<float>(v));
  return w.take();
}

FeatureBatch decode_features(std::span<const std::byte> bytes) {
  Reader r(bytes);
  r.magic(kFeatureMagic);
  const std::uint32_t rows = r.u32("row count");
  const std::uint32_t cols = r.u32("column count");
  const std::size_t n = element_count({rows, cols});
  r.expect_remaining(n);
  std::vector<double> data(n);
  for (double& v : data) v = r.f32("value");
  return FeatureBatch(rows, cols, std::move(data));
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

void write_matrix_planes(const std::filesystem::path& path, const MatrixPlanes& m) {
  write_file_bytes(path, encode_matrix_planes(m));
}

MatrixPlanes read_matrix_planes(const std::filesystem::path& path) {
  return decode_matrix_planes(read_file_bytes(path));
}

void write_features(const std::filesystem::path& path, const FeatureBatch& batch) {
  write_file_bytes(path, encode_features(batch));
}

FeatureBatch read_features(const std::filesystem::path& path) {
  return decode_features(read_file_bytes(path));
}

}  // namespace stainaug

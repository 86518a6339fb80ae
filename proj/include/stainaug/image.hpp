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
#include <span>
#include <vector>

#include "stainaug/error.hpp"

namespace stainaug {

/// Interleaved three-channel raster, row-major. Used for 8-bit RGB patches,
/// 32-bit OD images and concentration maps alike.
template <typename T>
class Image3 {
 public:
  using value_type = T;

  Image3() = default;
  Image3(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}
  Image3(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) {
      throw Error(Errc::ShapeMismatch, "buffer length does not match 3*width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const noexcept { return data_.empty(); }

  T* pixel(std::size_t index) noexcept { return data_.data() + 3 * index; }
  const T* pixel(std::size_t index) const noexcept { return data_.data() + 3 * index; }
  T* pixel(int x, int y) noexcept { return pixel(static_cast<std::size_t>(y) * width_ + x); }
  const T* pixel(int x, int y) const noexcept {
    return pixel(static_cast<std::size_t>(y) * width_ + x);
  }

  std::span<T> samples() noexcept { return data_; }
  std::span<const T> samples() const noexcept { return data_; }

  bool same_shape(const auto& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Image3&, const Image3&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(Errc::InvalidArgument, "negative image dimension");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using RgbImage = Image3<std::uint8_t>;
using OdImage = Image3<float>;

}  // namespace stainaug

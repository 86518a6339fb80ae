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

#include <array>
#include <cstdint>

namespace stainaug {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
/// pure function of (key, counter), so any worker can produce any element of
/// any stream without coordination.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// Uniform double in [0, 1) from 53 bits of two 32-bit words.
inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

/// Sequential reader over one Philox stream. The stream is identified by a
/// 64-bit key and three 32-bit words; the fourth counter word is the block
/// index, advanced as draws are consumed.
class CounterStream {
 public:
  CounterStream(std::uint64_t key, std::uint32_t w0, std::uint32_t w1, std::uint32_t w2) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        counter_{w0, w1, w2, 0} {}

  std::uint32_t next_u32() noexcept {
    if (lane_ == 4) refill();
    return block_[lane_++];
  }

  double next_uniform() noexcept {
    const std::uint32_t hi = next_u32();
    const std::uint32_t lo = next_u32();
    return to_unit_double(hi, lo);
  }

  double next_uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_uniform(); }

 private:
  void refill() noexcept {
    block_ = Philox4x32::generate(counter_, key_);
    ++counter_[3];
    lane_ = 0;
  }

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter block_{};
  int lane_ = 4;
};

}  // namespace stainaug

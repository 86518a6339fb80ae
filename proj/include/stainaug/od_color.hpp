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
#include <compare>
#include <cstdint>

#include <Eigen/Core>

namespace stainaug {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Incident light intensity: 8-bit white.
inline constexpr double kIncidentIntensity = 255.0;

/// -log10(1/255): optical density of a fully absorbing (clamped) channel.
inline constexpr double kOdMax = 2.40654018043395517;

struct RgbPixel {
  std::uint8_t r = 255;
  std::uint8_t g = 255;
  std::uint8_t b = 255;

  friend auto operator<=>(const RgbPixel&, const RgbPixel&) = default;
};

struct OdPixel {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  Vec3 vec() const { return {r, g, b}; }
  static OdPixel from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  double mean() const { return (r + g + b) / 3.0; }

  friend bool operator==(const OdPixel&, const OdPixel&) = default;
};

/// Beer-Lambert: od = -log10(max(i, 1) / 255).
double intensity_to_od(int intensity) noexcept;

/// i = round-half-up(255 * 10^-od), saturating to [0, 255]; NaN maps to 255.
std::uint8_t od_to_intensity(double od) noexcept;

OdPixel rgb_to_od(RgbPixel p) noexcept;
RgbPixel od_to_rgb(const OdPixel& p) noexcept;

/// Precomputed tables for the image kernels. `od(i)` is bit-identical to
/// intensity_to_od(i). `quantize(od)` returns the same intensity as
/// od_to_intensity but by comparing against the exact rounding thresholds
///   i >= k  <=>  od <= -log10((k - 0.5) / 255)
/// instead of evaluating pow per sample.
class OdTables {
 public:
  static const OdTables& instance();

  double od(std::uint8_t intensity) const noexcept { return od_[intensity]; }

  std::uint8_t quantize(double od) const noexcept {
    if (!(od > threshold_[255])) return 255;  // also catches NaN
    if (od > threshold_[1]) return 0;
    int k = guess_[static_cast<std::size_t>(od * kGridScale)];
    // The grid is finer than the smallest threshold gap, so at most one step.
    if (k < 255 && od <= threshold_[k + 1]) ++k;
    if (k > 0 && od > threshold_[k]) --k;
    return static_cast<std::uint8_t>(k);
  }

 private:
  OdTables();

  static constexpr double kGridScale = 2048.0;
  static constexpr std::size_t kGridSize = 5600;  // covers od up to threshold_[1] ~ 2.707

  std::array<double, 256> od_{};
  std::array<double, 256> threshold_{};  // threshold_[0] unused (+inf)
  std::array<std::uint8_t, kGridSize> guess_{};
};

}  // namespace stainaug

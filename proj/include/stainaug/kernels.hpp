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

// Data-parallel kernels in two builds: `serial` is the plain reference kept
// for testing and benchmarking, `omp` is what the library uses. Per-pixel
// kernels share their arithmetic and are bit-identical. Reductions in `omp`
// work over fixed blocks merged in block order, so results do not depend on
// the thread count; they agree with `serial` to rounding.

#include <cstddef>
#include <cstdint>
#include <span>

#include "stainaug/contrastive_loss.hpp"
#include "stainaug/separation.hpp"
#include "stainaug/slide_stats.hpp"

namespace stainaug::kernels {

inline constexpr std::size_t kReductionBlock = 4096;

namespace serial {
void rgb_to_od(const RgbImage& in, OdImage& out);
void od_to_rgb(const OdImage& in, RgbImage& out);
void separate(const OdImage& in, const Mat3& inverse, ConcentrationMap& out);
void reconstruct(const ConcentrationMap& in, const StainBasis& basis, const StainTransform& transform,
                 OdImage& out);
void transform_stains(const RgbImage& in, const Separator& separator,
                      const StainTransform& transform, RgbImage& out);
PixelMoments moments(std::span<const OdPixel> pixels);
/// Adds channel `channel` of `map` (0 = alpha, 1 = beta) at pixels where
/// mask is non-zero; an empty mask selects every pixel.
void histogram(const ConcentrationMap& map, int channel, std::span<const std::uint8_t> mask,
               StainHistogram& hist);
double info_nce(const FeatureBatch& q, const FeatureBatch& k, double tau);
void info_nce_grad(const FeatureBatch& q, const FeatureBatch& k, double tau, FeatureBatch& dq,
                   FeatureBatch& dk);
}  // namespace serial

namespace omp {
void rgb_to_od(const RgbImage& in, OdImage& out);
void od_to_rgb(const OdImage& in, RgbImage& out);
void separate(const OdImage& in, const Mat3& inverse, ConcentrationMap& out);
void reconstruct(const ConcentrationMap& in, const StainBasis& basis, const StainTransform& transform,
                 OdImage& out);
void transform_stains(const RgbImage& in, const Separator& separator,
                      const StainTransform& transform, RgbImage& out);
PixelMoments moments(std::span<const OdPixel> pixels);
void histogram(const ConcentrationMap& map, int channel, std::span<const std::uint8_t> mask,
               StainHistogram& hist);
double info_nce(const FeatureBatch& q, const FeatureBatch& k, double tau);
void info_nce_grad(const FeatureBatch& q, const FeatureBatch& k, double tau, FeatureBatch& dq,
                   FeatureBatch& dk);
}  // namespace omp

}  // namespace stainaug::kernels

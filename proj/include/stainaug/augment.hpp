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

#include <cstdint>
#include <string_view>

#include "stainaug/separation.hpp"
#include "stainaug/slide_stats.hpp"

namespace stainaug {

struct TargetRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Stain reconstruction augmentation settings. Each stain's slide strength is
/// mapped to a target strength drawn from an absolute range.
struct SraConfig {
  TargetRange h_range{0.5, 2.0};
  TargetRange e_range{0.2, 2.0};
  double p_drop = 0.0;
  double drop_h_share = 0.5;  // P(H is the dropped channel | drop)
  bool include_residual = false;
  bool share_across_views = false;  // one draw per patch instead of per view

  /// H [0.5, 2.0], E [0.2, 2.0], no channel drop.
  static SraConfig narrow();
  /// H and E [0.1, 2.5], p_drop 0.1.
  static SraConfig wide();

  void validate() const;
};

/// Baseline: alpha <- alpha * U(1 +- scale_halfwidth) + U(+- bias_halfwidth), same for beta.
struct TsaConfig {
  double scale_halfwidth = 0.05;
  double bias_halfwidth = 0.05;
  bool include_residual = false;

  void validate() const;
};

struct AugmentationSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t patch_index = 0;
  std::uint32_t view_index = 0;
};

enum class DroppedChannel { None, Hematoxylin, Eosin };

std::string_view to_string(DroppedChannel channel) noexcept;

struct SraCoefficients {
  double coef_h = 0.0;
  double coef_e = 0.0;
  DroppedChannel dropped = DroppedChannel::None;
};

struct TsaDraw {
  double scale_h = 1.0;
  double bias_h = 0.0;
  double scale_e = 1.0;
  double bias_e = 0.0;
};

/// coef_h ~ U(h_range), coef_e ~ U(e_range), independently; then with
/// probability p_drop exactly one of them is zeroed.
SraCoefficients sample_coefficients(const SraConfig& cfg, const AugmentationSeed& seed);
TsaDraw sample_tsa(const TsaConfig& cfg, const AugmentationSeed& seed);

StainTransform sra_transform(const SraCoefficients& coef, const SlideStainStats& stats,
                             bool include_residual);
StainTransform tsa_transform(const TsaDraw& draw, bool include_residual);

/// Throws SlideMismatch when `patch_slide_id` differs from stats.slide_id.
/// The drawn coefficients are written to `drawn` when non-null.
RgbImage sra_augment(const RgbImage& patch, std::string_view patch_slide_id,
                     const SlideStainStats& stats, const SraConfig& cfg,
                     const AugmentationSeed& seed, SraCoefficients* drawn = nullptr);

/// SRA with caller-chosen coefficients (no sampling).
RgbImage sra_apply(const RgbImage& patch, const SlideStainStats& stats,
                   const SraCoefficients& coef, bool include_residual);

RgbImage tsa_augment(const RgbImage& patch, std::string_view patch_slide_id,
                     const SlideStainStats& stats, const TsaConfig& cfg,
                     const AugmentationSeed& seed, TsaDraw* drawn = nullptr);

}  // namespace stainaug

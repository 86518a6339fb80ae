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

#include "stainaug/augment.hpp"

#include <string>

#include "stainaug/error.hpp"
#include "stainaug/random.hpp"

namespace stainaug {
namespace {

// Counter layout: (patch lo, patch hi, view ^ tag, block). The tag keeps SRA
// and TSA draws for the same seed triple apart; views must stay below 2^16.
constexpr std::uint32_t kSraStream = 0x5352'0000u;
constexpr std::uint32_t kTsaStream = 0x5453'0000u;

CounterStream stream_for(const AugmentationSeed& seed, std::uint32_t tag) {
  return CounterStream(seed.master_seed, static_cast<std::uint32_t>(seed.patch_index),
                       static_cast<std::uint32_t>(seed.patch_index >> 32),
                       seed.view_index ^ tag);
}

void check_range(const TargetRange& r, const char* name) {
  if (!(r.lo > 0.0 && r.lo <= r.hi)) {
    throw Error(Errc::InvalidArgument, std::string(name) + " must satisfy 0 < lo <= hi");
  }
}

void check_slide(std::string_view patch_slide_id, const SlideStainStats& stats) {
  if (patch_slide_id != stats.slide_id) {
    throw Error(Errc::SlideMismatch, "patch belongs to slide '" + std::string(patch_slide_id) +
                                         "' but stats are for '" + stats.slide_id + "'");
  }
}

}  // namespace

std::string_view to_string(DroppedChannel channel) noexcept {
  switch (channel) {
    case DroppedChannel::None: return "none";
    case DroppedChannel::Hematoxylin: return "H";
    case DroppedChannel::Eosin: return "E";
  }
  return "none";
}

SraConfig SraConfig::narrow() { return SraConfig{{0.5, 2.0}, {0.2, 2.0}, 0.0, 0.5, false, false}; }

SraConfig SraConfig::wide() { return SraConfig{{0.1, 2.5}, {0.1, 2.5}, 0.1, 0.5, false, false}; }

void SraConfig::validate() const {
  check_range(h_range, "h_range");
  check_range(e_range, "e_range");
  if (!(p_drop >= 0.0 && p_drop <= 1.0)) throw Error(Errc::InvalidArgument, "p_drop must lie in [0, 1]");
  if (!(drop_h_share >= 0.0 && drop_h_share <= 1.0)) {
    throw Error(Errc::InvalidArgument, "drop_h_share must lie in [0, 1]");
  }
}

void TsaConfig::validate() const {
  if (!(scale_halfwidth >= 0.0 && scale_halfwidth <= 0.5) ||
      !(bias_halfwidth >= 0.0 && bias_halfwidth <= 0.5)) {
    throw Error(Errc::InvalidArgument, "TSA half-widths must lie in [0, 0.5]");
  }
}

SraCoefficients sample_coefficients(const SraConfig& cfg, const AugmentationSeed& seed) {
  cfg.validate();
  AugmentationSeed effective = seed;
  if (cfg.share_across_views) effective.view_index = 0;
  CounterStream rng = stream_for(effective, kSraStream);
  SraCoefficients coef;
  coef.coef_h = rng.next_uniform(cfg.h_range.lo, cfg.h_range.hi);
  coef.coef_e = rng.next_uniform(cfg.e_range.lo, cfg.e_range.hi);
  const double u_drop = rng.next_uniform();
  const double u_which = rng.next_uniform();
  if (u_drop < cfg.p_drop) {
    if (u_which < cfg.drop_h_share) {
      coef.coef_h = 0.0;
      coef.dropped = DroppedChannel::Hematoxylin;
    } else {
      coef.coef_e = 0.0;
      coef.dropped = DroppedChannel::Eosin;
    }
  }
  return coef;
}

TsaDraw sample_tsa(const TsaConfig& cfg, const AugmentationSeed& seed) {
  cfg.validate();
  CounterStream rng = stream_for(seed, kTsaStream);
  TsaDraw d;
  d.scale_h = rng.next_uniform(1.0 - cfg.scale_halfwidth, 1.0 + cfg.scale_halfwidth);
  d.bias_h = rng.next_uniform(-cfg.bias_halfwidth, cfg.bias_halfwidth);
  d.scale_e = rng.next_uniform(1.0 - cfg.scale_halfwidth, 1.0 + cfg.scale_halfwidth);
  d.bias_e = rng.next_uniform(-cfg.bias_halfwidth, cfg.bias_halfwidth);
  return d;
}

StainTransform sra_transform(const SraCoefficients& coef, const SlideStainStats& stats,
                             bool include_residual) {
  if (!(stats.h_max > 0.0 && stats.e_max > 0.0)) {
    throw Error(Errc::InvalidArgument, "slide strengths must be positive");
  }
  return {coef.coef_h / stats.h_max, 0.0, coef.coef_e / stats.e_max, 0.0, include_residual};
}

StainTransform tsa_transform(const TsaDraw& draw, bool include_residual) {
  return {draw.scale_h, draw.bias_h, draw.scale_e, draw.bias_e, include_residual};
}

RgbImage sra_apply(const RgbImage& patch, const SlideStainStats& stats,
                   const SraCoefficients& coef, bool include_residual) {
  const Separator separator(stats.basis);
  return transform_stains(patch, separator, sra_transform(coef, stats, include_residual));
}

RgbImage sra_augment(const RgbImage& patch, std::string_view patch_slide_id,
                     const SlideStainStats& stats, const SraConfig& cfg,
                     const AugmentationSeed& seed, SraCoefficients* drawn) {
  check_slide(patch_slide_id, stats);
  const SraCoefficients coef = sample_coefficients(cfg, seed);
  if (drawn != nullptr) *drawn = coef;
  return sra_apply(patch, stats, coef, cfg.include_residual);
}

RgbImage tsa_augment(const RgbImage& patch, std::string_view patch_slide_id,
                     const SlideStainStats& stats, const TsaConfig& cfg,
                     const AugmentationSeed& seed, TsaDraw* drawn) {
  check_slide(patch_slide_id, stats);
  const TsaDraw draw = sample_tsa(cfg, seed);
  if (drawn != nullptr) *drawn = draw;
  const Separator separator(stats.basis);
  return transform_stains(patch, separator, tsa_transform(draw, cfg.include_residual));
}

}  // namespace stainaug

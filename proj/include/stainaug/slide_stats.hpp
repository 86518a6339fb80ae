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
#include <span>
#include <string>
#include <vector>

#include "stainaug/separation.hpp"

namespace stainaug {

/// Fixed-bin counter over [lo, hi). Values below lo land in bin 0, values at
/// or above hi in the last bin. Mergeable with exact integer arithmetic.
class StainHistogram {
 public:
  static constexpr std::size_t kDefaultBins = 8192;
  static constexpr double kDefaultHigh = 5.0;

  explicit StainHistogram(std::size_t bins = kDefaultBins, double lo = 0.0,
                          double hi = kDefaultHigh);

  std::size_t bin_count() const noexcept { return counts_.size(); }
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }
  double bin_width() const noexcept { return (hi_ - lo_) / static_cast<double>(counts_.size()); }
  std::uint64_t total() const noexcept { return total_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  std::size_t bin_index(double value) const noexcept {
    const double pos = (value - lo_) * scale_;
    if (!(pos > 0.0)) return 0;  // negatives and NaN
    if (pos >= static_cast<double>(counts_.size())) return counts_.size() - 1;
    return static_cast<std::size_t>(pos);
  }

  void add(double value) noexcept {
    ++counts_[bin_index(value)];
    ++total_;
  }
  void accumulate(std::span<const double> values) noexcept;
  void add_to_bin(std::size_t bin, std::uint64_t n) noexcept {
    counts_[bin] += n;
    total_ += n;
  }

  /// Throws ShapeMismatch unless bin layout is identical.
  void merge(const StainHistogram& other);

  /// Upper edge of the first bin whose cumulative count reaches
  /// ceil(q/100 * total). Throws EmptyHistogram / InvalidArgument.
  double percentile(double q) const;

  bool same_layout(const StainHistogram& other) const noexcept {
    return counts_.size() == other.counts_.size() && lo_ == other.lo_ && hi_ == other.hi_;
  }

  friend bool operator==(const StainHistogram&, const StainHistogram&) = default;

 private:
  double lo_;
  double hi_;
  double scale_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

StainHistogram merge(const StainHistogram& a, const StainHistogram& b);

inline constexpr double kStrengthPercentile = 99.0;

struct SlideStainStats {
  std::string slide_id;
  StainBasis basis;
  double h_max = 0.0;
  double e_max = 0.0;
  std::uint64_t n_tissue_pixels = 0;

  friend bool operator==(const SlideStainStats&, const SlideStainStats&) = default;
};

struct SlideStatsDetail {
  SlideStainStats stats;
  StainHistogram alpha;
  StainHistogram beta;
};

/// Estimate the basis from all tissue pixels, separate them and take the 99th
/// percentiles of alpha and beta (negatives clamp into bin 0).
SlideStatsDetail compute_slide_stats_detail(std::string slide_id, std::span<const OdPixel> pixels,
                                            const BasisConfig& cfg);
SlideStainStats compute_slide_stats(std::string slide_id, std::span<const OdPixel> pixels,
                                    const BasisConfig& cfg);
SlideStainStats compute_slide_stats(std::string slide_id, std::span<const RgbImage> patches,
                                    const BasisConfig& cfg);

/// Tissue pixels of one patch, in raster order.
std::vector<OdPixel> tissue_pixels(const RgbImage& patch, const BasisConfig& cfg);
std::vector<std::uint8_t> tissue_mask(const RgbImage& patch, const BasisConfig& cfg);

struct StainStrength {
  double h = 0.0;
  double e = 0.0;
};

/// 99th-percentile alpha/beta of `image` separated against `basis`,
/// restricted to `mask` (non-zero entries; empty span = all pixels).
/// Used to measure the strength of augmented outputs over the source tissue.
StainStrength measure_stain_strength(const RgbImage& image, const StainBasis& basis,
                                     std::span<const std::uint8_t> mask);

}  // namespace stainaug

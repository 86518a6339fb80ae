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

#include "stainaug/slide_stats.hpp"

#include <cmath>
#include <utility>

#include "stainaug/error.hpp"
#include "stainaug/kernels.hpp"

namespace stainaug {

StainHistogram::StainHistogram(std::size_t bins, double lo, double hi)
    : lo_(lo), hi_(hi), scale_(0.0), counts_(bins, 0) {
  if (bins == 0 || !(hi > lo)) {
    throw Error(Errc::InvalidArgument, "histogram needs bins > 0 and hi > lo");
  }
  scale_ = static_cast<double>(bins) / (hi - lo);
}

void StainHistogram::accumulate(std::span<const double> values) noexcept {
  for (double v : values) add(v);
}

void StainHistogram::merge(const StainHistogram& other) {
  if (!same_layout(other)) {
    throw Error(Errc::ShapeMismatch, "histograms have different bin layouts");
  }
  for (std::size_t b = 0; b < counts_.size(); ++b) counts_[b] += other.counts_[b];
  total_ += other.total_;
}

double StainHistogram::percentile(double q) const {
  if (total_ == 0) throw Error(Errc::EmptyHistogram, "percentile of an empty histogram");
  if (!(q > 0.0 && q < 100.0)) throw Error(Errc::InvalidArgument, "percentile must lie in (0, 100)");
  const double target = std::max(1.0, std::ceil(q * static_cast<double>(total_) / 100.0));
  std::uint64_t cumulative = 0;
  std::size_t bin = counts_.size() - 1;
  for (std::size_t b = 0; b < counts_.size(); ++b) {
    cumulative += counts_[b];
    if (static_cast<double>(cumulative) >= target) {
      bin = b;
      break;
    }
  }
  return lo_ + static_cast<double>(bin + 1) * (hi_ - lo_) / static_cast<double>(counts_.size());
}

StainHistogram merge(const StainHistogram& a, const StainHistogram& b) {
  StainHistogram out = a;
  out.merge(b);
  return out;
}

namespace {

SlideStatsDetail stats_from_tissue(std::string slide_id, std::span<const OdPixel> tissue,
                                   const BasisConfig& cfg) {
  SlideStatsDetail detail;
  detail.stats.slide_id = std::move(slide_id);
  detail.stats.basis = estimate_stain_basis_from_tissue(tissue, cfg);
  detail.stats.n_tissue_pixels = tissue.size();

  const Separator separator(detail.stats.basis);
  ConcentrationMap map(static_cast<int>(tissue.size()), 1);
  const auto count = static_cast<std::ptrdiff_t>(tissue.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const Concentration c = separator.separate(tissue[i]);
    float* dst = map.pixel(static_cast<std::size_t>(i));
    dst[0] = static_cast<float>(c.alpha);
    dst[1] = static_cast<float>(c.beta);
    dst[2] = static_cast<float>(c.gamma);
  }
  kernels::omp::histogram(map, 0, {}, detail.alpha);
  kernels::omp::histogram(map, 1, {}, detail.beta);
  detail.stats.h_max = detail.alpha.percentile(kStrengthPercentile);
  detail.stats.e_max = detail.beta.percentile(kStrengthPercentile);
  return detail;
}

}  // namespace

SlideStatsDetail compute_slide_stats_detail(std::string slide_id, std::span<const OdPixel> pixels,
                                            const BasisConfig& cfg) {
  cfg.validate();
  const std::vector<OdPixel> tissue = filter_tissue(pixels, cfg);
  return stats_from_tissue(std::move(slide_id), tissue, cfg);
}

SlideStainStats compute_slide_stats(std::string slide_id, std::span<const OdPixel> pixels,
                                    const BasisConfig& cfg) {
  return compute_slide_stats_detail(std::move(slide_id), pixels, cfg).stats;
}

SlideStainStats compute_slide_stats(std::string slide_id, std::span<const RgbImage> patches,
                                    const BasisConfig& cfg) {
  cfg.validate();
  std::vector<OdPixel> tissue;
  for (const RgbImage& patch : patches) {
    const std::vector<OdPixel> part = tissue_pixels(patch, cfg);
    tissue.insert(tissue.end(), part.begin(), part.end());
  }
  return stats_from_tissue(std::move(slide_id), tissue, cfg).stats;
}

std::vector<OdPixel> tissue_pixels(const RgbImage& patch, const BasisConfig& cfg) {
  const OdTables& tables = OdTables::instance();
  std::vector<OdPixel> tissue;
  for (std::size_t p = 0; p < patch.pixel_count(); ++p) {
    const std::uint8_t* px = patch.pixel(p);
    const OdPixel od{tables.od(px[0]), tables.od(px[1]), tables.od(px[2])};
    if (is_tissue(od, cfg.tissue_od_threshold)) tissue.push_back(od);
  }
  return tissue;
}

std::vector<std::uint8_t> tissue_mask(const RgbImage& patch, const BasisConfig& cfg) {
  const OdTables& tables = OdTables::instance();
  std::vector<std::uint8_t> mask(patch.pixel_count(), 0);
  for (std::size_t p = 0; p < patch.pixel_count(); ++p) {
    const std::uint8_t* px = patch.pixel(p);
    const OdPixel od{tables.od(px[0]), tables.od(px[1]), tables.od(px[2])};
    mask[p] = is_tissue(od, cfg.tissue_od_threshold) ? 1 : 0;
  }
  return mask;
}

StainStrength measure_stain_strength(const RgbImage& image, const StainBasis& basis,
                                     std::span<const std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != image.pixel_count()) {
    throw Error(Errc::ShapeMismatch, "mask length differs from pixel count");
  }
  const ConcentrationMap map = separate_image(to_od(image), basis);
  StainHistogram alpha;
  StainHistogram beta;
  kernels::omp::histogram(map, 0, mask, alpha);
  kernels::omp::histogram(map, 1, mask, beta);
  return {alpha.percentile(kStrengthPercentile), beta.percentile(kStrengthPercentile)};
}

}  // namespace stainaug

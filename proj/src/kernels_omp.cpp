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

#include <vector>

#include "kernel_ops.hpp"
#include "stainaug/kernels.hpp"

namespace stainaug::kernels::omp {

using Index = std::ptrdiff_t;

void rgb_to_od(const RgbImage& in, OdImage& out) {
  out = OdImage(in.width(), in.height());
  const OdTables& tables = OdTables::instance();
  auto src = in.samples();
  auto dst = out.samples();
  const auto size = static_cast<Index>(src.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < size; ++i) dst[i] = static_cast<float>(tables.od(src[i]));
}

void od_to_rgb(const OdImage& in, RgbImage& out) {
  out = RgbImage(in.width(), in.height());
  const OdTables& tables = OdTables::instance();
  auto src = in.samples();
  auto dst = out.samples();
  const auto size = static_cast<Index>(src.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < size; ++i) dst[i] = tables.quantize(src[i]);
}

void separate(const OdImage& in, const Mat3& inverse, ConcentrationMap& out) {
  out = ConcentrationMap(in.width(), in.height());
  const detail::PixelPlan plan(inverse, StainBasis{}, StainTransform{});
  const auto count = static_cast<Index>(in.pixel_count());
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < count; ++p) {
    const float* src = in.pixel(p);
    const double od[3] = {src[0], src[1], src[2]};
    double c[3];
    detail::separate_pixel(plan.inv, od, c);
    float* dst = out.pixel(p);
    for (int ch = 0; ch < 3; ++ch) dst[ch] = static_cast<float>(c[ch]);
  }
}

void reconstruct(const ConcentrationMap& in, const StainBasis& basis, const StainTransform& transform,
                 OdImage& out) {
  out = OdImage(in.width(), in.height());
  const detail::PixelPlan plan(Mat3::Zero(), basis, transform);
  const auto count = static_cast<Index>(in.pixel_count());
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < count; ++p) {
    const float* c = in.pixel(p);
    double od[3];
    detail::reconstruct_pixel(plan, c[0], c[1], c[2], od);
    float* dst = out.pixel(p);
    for (int ch = 0; ch < 3; ++ch) dst[ch] = static_cast<float>(od[ch]);
  }
}

void transform_stains(const RgbImage& in, const Separator& separator,
                      const StainTransform& transform, RgbImage& out) {
  out = RgbImage(in.width(), in.height());
  const detail::PixelPlan plan(separator.inverse(), separator.basis(), transform);
  const OdTables& tables = OdTables::instance();
  const auto count = static_cast<Index>(in.pixel_count());
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < count; ++p) {
    detail::transform_pixel(plan, tables, in.pixel(p), out.pixel(p));
  }
}

PixelMoments moments(std::span<const OdPixel> pixels) {
  const std::size_t blocks = (pixels.size() + kReductionBlock - 1) / kReductionBlock;
  std::vector<PixelMoments> partial(blocks);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < static_cast<Index>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t end = std::min(begin + kReductionBlock, pixels.size());
    for (std::size_t i = begin; i < end; ++i) partial[b].add(pixels[i]);
  }
  PixelMoments total;
  for (const PixelMoments& m : partial) total.merge(m);
  return total;
}

void histogram(const ConcentrationMap& map, int channel, std::span<const std::uint8_t> mask,
               StainHistogram& hist) {
  const bool masked = !mask.empty();
  const auto count = static_cast<Index>(map.pixel_count());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(hist.bin_count(), 0);
#pragma omp for schedule(static) nowait
    for (Index p = 0; p < count; ++p) {
      if (masked && mask[p] == 0) continue;
      ++local[hist.bin_index(map.pixel(p)[channel])];
    }
#pragma omp critical(stainaug_histogram_merge)
    for (std::size_t b = 0; b < local.size(); ++b) {
      if (local[b] != 0) hist.add_to_bin(b, local[b]);
    }
  }
}

double info_nce(const FeatureBatch& q, const FeatureBatch& k, double tau) {
  const std::size_t n = q.rows();
  std::vector<double> rows(n);
#pragma omp parallel
  {
    std::vector<double> logits(n);
#pragma omp for schedule(static)
    for (Index i = 0; i < static_cast<Index>(n); ++i) {
      rows[i] = detail::info_nce_row(q, k, tau, i, logits.data(), nullptr);
    }
  }
  return detail::pairwise_sum(rows) / static_cast<double>(n);
}

void info_nce_grad(const FeatureBatch& q, const FeatureBatch& k, double tau, FeatureBatch& dq,
                   FeatureBatch& dk) {
  const std::size_t n = q.rows();
  const std::size_t d = q.cols();
  const auto rows = static_cast<Index>(n);
  std::vector<double> weight(n * n);
  const double scale = 1.0 / (static_cast<double>(n) * tau);
  dq = FeatureBatch(n, d);
  dk = FeatureBatch(n, d);
#pragma omp parallel
  {
    std::vector<double> logits(n);
#pragma omp for schedule(static)
    for (Index i = 0; i < rows; ++i) {
      double* w = weight.data() + i * n;
      detail::info_nce_row(q, k, tau, i, logits.data(), w);
      w[i] -= 1.0;
      for (std::size_t j = 0; j < n; ++j) w[j] *= scale;
    }
#pragma omp for schedule(static)
    for (Index i = 0; i < rows; ++i) {
      auto out = dq.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        const double w = weight[i * n + j];
        auto kj = k.row(j);
        for (std::size_t c = 0; c < d; ++c) out[c] += w * kj[c];
      }
    }
#pragma omp for schedule(static)
    for (Index j = 0; j < rows; ++j) {
      auto out = dk.row(j);
      for (std::size_t i = 0; i < n; ++i) {
        const double w = weight[i * n + j];
        auto qi = q.row(i);
        for (std::size_t c = 0; c < d; ++c) out[c] += w * qi[c];
      }
    }
  }
}

}  // namespace stainaug::kernels::omp

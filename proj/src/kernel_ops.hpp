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

// Per-element arithmetic shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stainaug/contrastive_loss.hpp"
#include "stainaug/od_color.hpp"
#include "stainaug/separation.hpp"

namespace stainaug::kernels::detail {

/// Flattened basis, inverse and transform for the hot loop.
struct PixelPlan {
  double inv[9];
  double vh[3];
  double ve[3];
  double vr[3];
  StainTransform t;

  PixelPlan(const Mat3& inverse, const StainBasis& basis, const StainTransform& transform)
      : t(transform) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) inv[3 * r + c] = inverse(r, c);
      vh[r] = basis.v_h[r];
      ve[r] = basis.v_e[r];
      vr[r] = basis.v_res[r];
    }
  }
};

inline void separate_pixel(const double* inv, const double od[3], double c[3]) noexcept {
  for (int r = 0; r < 3; ++r) {
    c[r] = inv[3 * r] * od[0] + inv[3 * r + 1] * od[1] + inv[3 * r + 2] * od[2];
  }
}

inline void reconstruct_pixel(const PixelPlan& plan, double alpha, double beta, double gamma,
                              double od[3]) noexcept {
  const StainTransform& t = plan.t;
  double a = std::max(alpha, 0.0) * t.scale_h + t.bias_h;
  double b = std::max(beta, 0.0) * t.scale_e + t.bias_e;
  a = std::max(a, 0.0);
  b = std::max(b, 0.0);
  const double g = t.include_residual ? gamma : 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    od[ch] = std::max(a * plan.vh[ch] + b * plan.ve[ch] + g * plan.vr[ch], 0.0);
  }
}

inline void transform_pixel(const PixelPlan& plan, const OdTables& tables, const std::uint8_t* in,
                            std::uint8_t* out) noexcept {
  const double od[3] = {tables.od(in[0]), tables.od(in[1]), tables.od(in[2])};
  double c[3];
  separate_pixel(plan.inv, od, c);
  double rec[3];
  reconstruct_pixel(plan, c[0], c[1], c[2], rec);
  for (int ch = 0; ch < 3; ++ch) out[ch] = tables.quantize(rec[ch]);
}

/// Fixed-shape pairwise summation: the tree depends only on the length.
inline double pairwise_sum(std::span<const double> v) noexcept {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Row i of the InfoNCE objective. Fills `prob` with the row softmax when non-null.
inline double info_nce_row(const FeatureBatch& q, const FeatureBatch& k, double tau,
                           std::size_t i, double* logits, double* prob) noexcept {
  const std::size_t n = k.rows();
  double peak = -INFINITY;
  for (std::size_t j = 0; j < n; ++j) {
    logits[j] = dot(q.row(i), k.row(j)) / tau;
    peak = std::max(peak, logits[j]);
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) denom += std::exp(logits[j] - peak);
  if (prob != nullptr) {
    for (std::size_t j = 0; j < n; ++j) prob[j] = std::exp(logits[j] - peak) / denom;
  }
  return -logits[i] + peak + std::log(denom);
}

}  // namespace stainaug::kernels::detail

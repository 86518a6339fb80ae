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

#include "stainaug/image.hpp"
#include "stainaug/stain_basis.hpp"

namespace stainaug {

struct Concentration {
  double alpha = 0.0;  // hematoxylin
  double beta = 0.0;   // eosin
  double gamma = 0.0;  // residual

  friend bool operator==(const Concentration&, const Concentration&) = default;
};

/// Per-pixel (alpha, beta, gamma), row-major, stored as 32-bit floats. Raw
/// solver output: alpha/beta may be slightly negative.
using ConcentrationMap = Image3<float>;

inline Concentration concentration_at(const ConcentrationMap& map, std::size_t index) noexcept {
  const float* c = map.pixel(index);
  return {c[0], c[1], c[2]};
}

/// Inverse of the basis matrix, computed once per basis.
class Separator {
 public:
  explicit Separator(const StainBasis& basis);

  const StainBasis& basis() const noexcept { return basis_; }
  const Mat3& inverse() const noexcept { return inverse_; }

  Concentration separate(const OdPixel& p) const noexcept {
    const Vec3 c = inverse_ * p.vec();
    return {c.x(), c.y(), c.z()};
  }

 private:
  StainBasis basis_;
  Mat3 inverse_;
};

/// Affine edit of the stain channels applied before reconstruction:
///   alpha' = max(alpha, 0) * scale_h + bias_h    (same for beta)
/// followed by OD = max(alpha', 0) v_h + max(beta', 0) v_e [+ gamma v_res],
/// clamped to >= 0 per channel.
struct StainTransform {
  double scale_h = 1.0;
  double bias_h = 0.0;
  double scale_e = 1.0;
  double bias_e = 0.0;
  bool include_residual = false;

  static StainTransform identity(bool include_residual) {
    return {1.0, 0.0, 1.0, 0.0, include_residual};
  }
};

enum class StainChannel { Hematoxylin, Eosin };

Concentration separate_pixel(const OdPixel& p, const StainBasis& basis);
ConcentrationMap separate_image(const OdImage& image, const StainBasis& basis);

OdPixel reconstruct_od(const Concentration& c, const StainBasis& basis, bool include_residual);
OdPixel apply_transform(const Concentration& c, const StainBasis& basis, const StainTransform& t);
OdImage reconstruct_image(const ConcentrationMap& map, const StainBasis& basis, bool include_residual);

/// Whole-image conversions (OpenMP kernels).
OdImage to_od(const RgbImage& image);
RgbImage to_rgb(const OdImage& image);

/// Keep one stain, drop the other and the residual. OD and RGB renders.
OdImage render_single_stain_od(const ConcentrationMap& map, const StainBasis& basis,
                               StainChannel channel);
RgbImage render_single_stain(const ConcentrationMap& map, const StainBasis& basis,
                             StainChannel channel);

/// Fused rgb -> od -> separate -> transform -> reconstruct -> rgb.
RgbImage transform_stains(const RgbImage& image, const Separator& separator,
                          const StainTransform& transform);

}  // namespace stainaug

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

#include "stainaug/separation.hpp"

#include <Eigen/LU>

#include "kernel_ops.hpp"
#include "stainaug/kernels.hpp"

namespace stainaug {

Separator::Separator(const StainBasis& basis) : basis_(basis) {
  basis_.validate();
  inverse_ = basis_.matrix().inverse();
}

Concentration separate_pixel(const OdPixel& p, const StainBasis& basis) {
  return Separator(basis).separate(p);
}

ConcentrationMap separate_image(const OdImage& image, const StainBasis& basis) {
  const Separator separator(basis);
  ConcentrationMap map;
  kernels::omp::separate(image, separator.inverse(), map);
  return map;
}

OdPixel apply_transform(const Concentration& c, const StainBasis& basis, const StainTransform& t) {
  const kernels::detail::PixelPlan plan(Mat3::Zero(), basis, t);
  double od[3];
  kernels::detail::reconstruct_pixel(plan, c.alpha, c.beta, c.gamma, od);
  return {od[0], od[1], od[2]};
}

OdPixel reconstruct_od(const Concentration& c, const StainBasis& basis, bool include_residual) {
  return apply_transform(c, basis, StainTransform::identity(include_residual));
}

OdImage reconstruct_image(const ConcentrationMap& map, const StainBasis& basis,
                          bool include_residual) {
  OdImage od;
  kernels::omp::reconstruct(map, basis, StainTransform::identity(include_residual), od);
  return od;
}

OdImage to_od(const RgbImage& image) {
  OdImage od;
  kernels::omp::rgb_to_od(image, od);
  return od;
}

RgbImage to_rgb(const OdImage& image) {
  RgbImage rgb;
  kernels::omp::od_to_rgb(image, rgb);
  return rgb;
}

namespace {

StainTransform single_stain(StainChannel channel) {
  StainTransform t = StainTransform::identity(false);
  if (channel == StainChannel::Hematoxylin) {
    t.scale_e = 0.0;
  } else {
    t.scale_h = 0.0;
  }
  return t;
}

}  // namespace

OdImage render_single_stain_od(const ConcentrationMap& map, const StainBasis& basis,
                               StainChannel channel) {
  OdImage od;
  kernels::omp::reconstruct(map, basis, single_stain(channel), od);
  return od;
}

RgbImage render_single_stain(const ConcentrationMap& map, const StainBasis& basis,
                             StainChannel channel) {
  return to_rgb(render_single_stain_od(map, basis, channel));
}

RgbImage transform_stains(const RgbImage& image, const Separator& separator,
                          const StainTransform& transform) {
  RgbImage out;
  kernels::omp::transform_stains(image, separator, transform, out);
  return out;
}

}  // namespace stainaug

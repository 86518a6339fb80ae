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
#include <cstdint>
#include <span>
#include <vector>

#include "stainaug/od_color.hpp"

namespace stainaug {

/// Hematoxylin, eosin and residual directions in OD space. Columns of
/// `matrix()` are (v_h, v_e, v_res).
struct StainBasis {
  Vec3 v_h = Vec3::Zero();
  Vec3 v_e = Vec3::Zero();
  Vec3 v_res = Vec3::Zero();

  /// Normalizes both stain vectors and completes the basis with their
  /// normalized cross product. Validates the result.
  static StainBasis from_stains(const Vec3& h, const Vec3& e);

  Mat3 matrix() const;
  double condition_number() const;

  /// Throws InvalidBasis (norm, sign, orthogonality) or IllConditioned.
  void validate() const;

  friend bool operator==(const StainBasis&, const StainBasis&) = default;
};

inline constexpr double kBasisTolerance = 1e-9;
inline constexpr double kMaxConditionNumber = 1e6;
inline constexpr double kDegeneratePlaneRatio = 1e-12;

struct BasisConfig {
  double tissue_od_threshold = 0.15;
  double angle_percentile = 1.0;
  std::size_t min_tissue_pixels = 1000;

  void validate() const;
};

inline bool is_tissue(const OdPixel& p, double threshold) noexcept { return p.mean() > threshold; }

std::vector<OdPixel> filter_tissue(std::span<const OdPixel> pixels, const BasisConfig& cfg);

/// Running first and second moments of an OD cloud. Blocks merge with Chan's
/// pairwise update, so a fixed block layout yields bit-identical results
/// whatever the number of threads.
struct PixelMoments {
  std::uint64_t count = 0;
  Vec3 mean = Vec3::Zero();
  Mat3 comoment = Mat3::Zero();  // sum of (x - mean)(x - mean)^T

  void add(const OdPixel& p) noexcept;
  void merge(const PixelMoments& other) noexcept;
  Mat3 covariance() const;  // population form, comoment / count
};

struct PrincipalPlane {
  Vec3 axis1 = Vec3::Zero();  // largest-variance direction, oriented toward the cloud mean
  Vec3 axis2 = Vec3::Zero();
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Top-2 eigenvectors of the 3x3 covariance. Throws DegeneratePlane when
/// lambda2 < 1e-12 * lambda1.
PrincipalPlane principal_plane(const PixelMoments& moments);

/// Full estimator: tissue filter, then the extreme-angle procedure below.
StainBasis estimate_stain_basis(std::span<const OdPixel> pixels, const BasisConfig& cfg);

/// Same, on pixels already known to be tissue.
///   1. covariance of the cloud -> principal plane
///   2. angle of each pixel's projection onto the plane
///   3. directions at the p-th and (100-p)-th percentile angles
///   4. flip to nonnegative, normalize, order H/E by red (then green) OD
///   5. v_res = normalized cross product
StainBasis estimate_stain_basis_from_tissue(std::span<const OdPixel> tissue, const BasisConfig& cfg);

/// Angle between two directions, sign-insensitive, in degrees [0, 90].
double angular_error_deg(const Vec3& u, const Vec3& v);

/// Linear-interpolated percentile by exact selection. Reorders `values`.
double select_percentile(std::span<double> values, double percent);

}  // namespace stainaug

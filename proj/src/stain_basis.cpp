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

#include "stainaug/stain_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "stainaug/error.hpp"
#include "stainaug/kernels.hpp"

namespace stainaug {

StainBasis StainBasis::from_stains(const Vec3& h, const Vec3& e) {
  if (h.norm() == 0.0 || e.norm() == 0.0) {
    throw Error(Errc::ZeroVector, "stain vector has zero length");
  }
  StainBasis basis;
  basis.v_h = h.normalized();
  basis.v_e = e.normalized();
  const Vec3 cross = basis.v_h.cross(basis.v_e);
  if (cross.norm() < 1e-12) {
    throw Error(Errc::IllConditioned, "stain vectors are parallel");
  }
  basis.v_res = cross.normalized();
  basis.validate();
  return basis;
}

Mat3 StainBasis::matrix() const {
  Mat3 m;
  m.col(0) = v_h;
  m.col(1) = v_e;
  m.col(2) = v_res;
  return m;
}

double StainBasis::condition_number() const {
  const Eigen::JacobiSVD<Mat3> svd(matrix());
  const Vec3 sv = svd.singularValues();
  if (sv(2) == 0.0) return INFINITY;
  return sv(0) / sv(2);
}

void StainBasis::validate() const {
  for (const Vec3* v : {&v_h, &v_e, &v_res}) {
    if (!v->allFinite() || std::abs(v->norm() - 1.0) > kBasisTolerance) {
      throw Error(Errc::InvalidBasis, "basis vector is not unit length");
    }
  }
  if ((v_h.array() < 0.0).any() || (v_e.array() < 0.0).any()) {
    throw Error(Errc::InvalidBasis, "stain vector has a negative component");
  }
  if (std::abs(v_res.dot(v_h)) > kBasisTolerance || std::abs(v_res.dot(v_e)) > kBasisTolerance) {
    throw Error(Errc::InvalidBasis, "residual vector is not orthogonal to the stains");
  }
  if (!(condition_number() < kMaxConditionNumber)) {
    throw Error(Errc::IllConditioned, "basis condition number >= 1e6");
  }
}

void BasisConfig::validate() const {
  if (!(tissue_od_threshold > 0.0)) {
    throw Error(Errc::InvalidArgument, "tissue_od_threshold must be > 0");
  }
  if (!(angle_percentile > 0.0 && angle_percentile < 50.0)) {
    throw Error(Errc::InvalidArgument, "angle_percentile must lie in (0, 50)");
  }
}

std::vector<OdPixel> filter_tissue(std::span<const OdPixel> pixels, const BasisConfig& cfg) {
  std::vector<OdPixel> tissue;
  for (const OdPixel& p : pixels) {
    if (is_tissue(p, cfg.tissue_od_threshold)) tissue.push_back(p);
  }
  return tissue;
}

void PixelMoments::add(const OdPixel& p) noexcept {
  const Vec3 x = p.vec();
  ++count;
  const Vec3 delta = x - mean;
  mean += delta / static_cast<double>(count);
  comoment += delta * (x - mean).transpose();
}

void PixelMoments::merge(const PixelMoments& other) noexcept {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double n = na + nb;
  const Vec3 delta = other.mean - mean;
  mean += delta * (nb / n);
  comoment += other.comoment + delta * delta.transpose() * (na * nb / n);
  count += other.count;
}

Mat3 PixelMoments::covariance() const {
  if (count == 0) return Mat3::Zero();
  return comoment / static_cast<double>(count);
}

PrincipalPlane principal_plane(const PixelMoments& moments) {
  const Eigen::SelfAdjointEigenSolver<Mat3> solver(moments.covariance());
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::DegeneratePlane, "covariance eigen-decomposition failed");
  }
  // Eigenvalues ascend.
  PrincipalPlane plane;
  plane.lambda1 = solver.eigenvalues()(2);
  plane.lambda2 = solver.eigenvalues()(1);
  plane.axis1 = solver.eigenvectors().col(2);
  plane.axis2 = solver.eigenvectors().col(1);
  if (!(plane.lambda1 > 0.0) || plane.lambda2 < kDegeneratePlaneRatio * plane.lambda1) {
    throw Error(Errc::DegeneratePlane, "OD cloud does not span a plane (single stain?)");
  }
  if (plane.axis1.dot(moments.mean) < 0.0) plane.axis1 = -plane.axis1;
  return plane;
}

double select_percentile(std::span<double> values, double percent) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "percentile of empty set");
  const double rank = percent / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lo);
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double v_lo = values[lo];
  if (frac == 0.0 || lo + 1 >= values.size()) return v_lo;
  const double v_hi = *std::min_element(values.begin() + lo + 1, values.end());
  return v_lo + frac * (v_hi - v_lo);
}

namespace {

Vec3 nonnegative_direction(Vec3 v) {
  if (v.sum() < 0.0) v = -v;
  v = v.cwiseMax(0.0);
  if (v.norm() < 1e-12) {
    throw Error(Errc::DegeneratePlane, "extreme stain direction has no positive component");
  }
  return v.normalized();
}

bool is_hematoxylin_first(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() > b.x();
  return a.y() > b.y();
}

}  // namespace

StainBasis estimate_stain_basis_from_tissue(std::span<const OdPixel> tissue, const BasisConfig& cfg) {
  cfg.validate();
  if (tissue.size() < cfg.min_tissue_pixels || tissue.empty()) {
    throw Error(Errc::NoTissue, std::to_string(tissue.size()) + " tissue pixels, need " +
                                    std::to_string(cfg.min_tissue_pixels));
  }
  const PrincipalPlane plane = principal_plane(kernels::omp::moments(tissue));

  std::vector<double> angles(tissue.size());
  const auto count = static_cast<std::ptrdiff_t>(tissue.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const Vec3 x = tissue[i].vec();
    angles[i] = std::atan2(x.dot(plane.axis2), x.dot(plane.axis1));
  }
  const double phi_lo = select_percentile(angles, cfg.angle_percentile);
  const double phi_hi = select_percentile(angles, 100.0 - cfg.angle_percentile);

  const Vec3 a = nonnegative_direction(plane.axis1 * std::cos(phi_lo) + plane.axis2 * std::sin(phi_lo));
  const Vec3 b = nonnegative_direction(plane.axis1 * std::cos(phi_hi) + plane.axis2 * std::sin(phi_hi));
  return is_hematoxylin_first(a, b) ? StainBasis::from_stains(a, b) : StainBasis::from_stains(b, a);
}

StainBasis estimate_stain_basis(std::span<const OdPixel> pixels, const BasisConfig& cfg) {
  cfg.validate();
  const std::vector<OdPixel> tissue = filter_tissue(pixels, cfg);
  return estimate_stain_basis_from_tissue(tissue, cfg);
}

double angular_error_deg(const Vec3& u, const Vec3& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw Error(Errc::ZeroVector, "angular error of a zero vector");
  const double c = std::min(std::abs(u.dot(v)) / (nu * nv), 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace stainaug

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
#include <span>
#include <vector>

namespace stainaug {

/// n x d feature matrix, row-major.
class FeatureBatch {
 public:
  FeatureBatch() = default;
  FeatureBatch(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  FeatureBatch(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  double& at(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const FeatureBatch& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const FeatureBatch&, const FeatureBatch&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline constexpr double kDefaultTemperature = 0.2;

/// Throws ZeroRow.
FeatureBatch l2_normalize(const FeatureBatch& batch);

/// Mean over queries of -log softmax(q_i . k_j / tau)[j = i]: the positive
/// key is on the diagonal, every other key in the batch is a negative.
/// Throws ShapeMismatch (shapes differ or n < 2) and BadTemperature.
double info_nce(const FeatureBatch& q, const FeatureBatch& k, double tau);

struct InfoNceGradient {
  FeatureBatch dq;
  FeatureBatch dk;
};

/// Analytic d(info_nce)/dq and d(info_nce)/dk with q, k taken as given.
///   dq = (P - I) K / (n tau),  dk = (P - I)^T Q / (n tau),  P = row softmax.
InfoNceGradient grad_info_nce(const FeatureBatch& q, const FeatureBatch& k, double tau);

struct LossReport {
  double cl1 = 0.0;
  double cl2 = 0.0;
  double cl3 = 0.0;
  double cl4 = 0.0;
  double cl_ori = 0.0;
  double cl_aug = 0.0;
  double total = 0.0;
};

/// Cross-encoder terms
///   cl1 = info_nce(f_b2, f_m1),  cl2 = info_nce(f_b1, f_m2)
/// and same-encoder cross-augmentation terms
///   cl3 = info_nce(f_b1, f_b2),  cl4 = info_nce(f_m1, f_m2),
/// the latter zeroed when include_aug is false.
LossReport loss_report(const FeatureBatch& f_m1, const FeatureBatch& f_m2,
                       const FeatureBatch& f_b1, const FeatureBatch& f_b2, double tau,
                       bool include_aug);

}  // namespace stainaug

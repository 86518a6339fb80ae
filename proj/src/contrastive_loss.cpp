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

#include "stainaug/contrastive_loss.hpp"

#include <cmath>
#include <string>

#include "stainaug/error.hpp"
#include "stainaug/kernels.hpp"

namespace stainaug {

FeatureBatch::FeatureBatch(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(Errc::ShapeMismatch, "feature buffer length does not match rows*cols");
  }
}

FeatureBatch l2_normalize(const FeatureBatch& batch) {
  FeatureBatch out = batch;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm == 0.0) throw Error(Errc::ZeroRow, "row " + std::to_string(i) + " has zero norm");
    for (double& v : row) v /= norm;
  }
  return out;
}

namespace {

void check_pair(const FeatureBatch& q, const FeatureBatch& k, double tau) {
  if (!q.same_shape(k)) throw Error(Errc::ShapeMismatch, "query and key batches differ in shape");
  if (q.rows() < 2) throw Error(Errc::ShapeMismatch, "need at least two rows for negatives");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(Errc::BadTemperature, "tau must be > 0");
}

}  // namespace

double info_nce(const FeatureBatch& q, const FeatureBatch& k, double tau) {
  check_pair(q, k, tau);
  return kernels::omp::info_nce(q, k, tau);
}

InfoNceGradient grad_info_nce(const FeatureBatch& q, const FeatureBatch& k, double tau) {
  check_pair(q, k, tau);
  InfoNceGradient g;
  kernels::omp::info_nce_grad(q, k, tau, g.dq, g.dk);
  return g;
}

LossReport loss_report(const FeatureBatch& f_m1, const FeatureBatch& f_m2,
                       const FeatureBatch& f_b1, const FeatureBatch& f_b2, double tau,
                       bool include_aug) {
  if (!f_m1.same_shape(f_m2) || !f_m1.same_shape(f_b1) || !f_m1.same_shape(f_b2)) {
    throw Error(Errc::ShapeMismatch, "all four feature batches must share one shape");
  }
  LossReport r;
  r.cl1 = info_nce(f_b2, f_m1, tau);
  r.cl2 = info_nce(f_b1, f_m2, tau);
  if (include_aug) {
    r.cl3 = info_nce(f_b1, f_b2, tau);
    r.cl4 = info_nce(f_m1, f_m2, tau);
  }
  r.cl_ori = r.cl1 + r.cl2;
  r.cl_aug = r.cl3 + r.cl4;
  r.total = r.cl_ori + r.cl_aug;
  return r;
}

}  // namespace stainaug

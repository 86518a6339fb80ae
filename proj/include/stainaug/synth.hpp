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
#include <vector>

#include "stainaug/separation.hpp"

namespace stainaug {

/// Fixture basis near the conventional H&E absorption directions (the widely
/// used Macenko reference matrix, renormalized). A repository constant, not
/// a measured value.
StainBasis reference_basis();

/// Uniform on [lo, hi]; lo == hi is a constant.
struct ConcentrationDist {
  double lo = 0.0;
  double hi = 0.0;

  static ConcentrationDist uniform(double lo, double hi) { return {lo, hi}; }
  static ConcentrationDist constant(double v) { return {v, v}; }
  double sample(double u) const noexcept { return lo + (hi - lo) * u; }
};

/// One population of tissue pixels. Several classes model, e.g., H-rich
/// nuclei next to E-rich stroma.
struct TissueClass {
  double weight = 1.0;
  ConcentrationDist alpha;
  ConcentrationDist beta;
};

struct SynthSpec {
  StainBasis basis = reference_basis();
  int width = 400;
  int height = 400;
  std::vector<TissueClass> tissue{{1.0, ConcentrationDist::uniform(0.05, 1.0),
                                   ConcentrationDist::uniform(0.05, 1.0)}};
  double white_fraction = 0.0;
  double residual_amplitude = 0.0;
  std::uint64_t seed = 0;

  static SynthSpec single(ConcentrationDist alpha, ConcentrationDist beta, std::uint64_t seed = 0);

  /// Throws InvalidArgument, or SaturationRisk when some class could exceed
  /// kOdMax on a channel.
  void validate() const;
};

struct SynthPatch {
  RgbImage image;
  ConcentrationMap truth;  // exact, pre-quantization
};

/// Per pixel: white with probability white_fraction, otherwise a class by
/// weight, (alpha, beta) from its distributions and
/// gamma = residual_amplitude * U(-1, 1). Pixel i draws from its own
/// counter stream, so output is independent of traversal order.
SynthPatch generate_patch(const SynthSpec& spec);

/// Unquantized OD pixels for the same draws (raster order), with truth.
std::vector<OdPixel> generate_od_pixels(const SynthSpec& spec,
                                        std::vector<Concentration>* truth = nullptr);

}  // namespace stainaug

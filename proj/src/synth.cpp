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

#include "stainaug/synth.hpp"

#include <cmath>

#include "stainaug/error.hpp"
#include "stainaug/random.hpp"

namespace stainaug {

StainBasis reference_basis() {
  static const StainBasis basis =
      StainBasis::from_stains(Vec3(0.5626, 0.7201, 0.4062), Vec3(0.2159, 0.8012, 0.5581));
  return basis;
}

SynthSpec SynthSpec::single(ConcentrationDist alpha, ConcentrationDist beta, std::uint64_t seed) {
  SynthSpec spec;
  spec.tissue = {{1.0, alpha, beta}};
  spec.seed = seed;
  return spec;
}

void SynthSpec::validate() const {
  basis.validate();
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidArgument, "synthetic patch must be non-empty");
  if (!(white_fraction >= 0.0 && white_fraction <= 1.0)) {
    throw Error(Errc::InvalidArgument, "white_fraction must lie in [0, 1]");
  }
  if (!(residual_amplitude >= 0.0)) throw Error(Errc::InvalidArgument, "residual_amplitude < 0");
  if (tissue.empty() && white_fraction < 1.0) {
    throw Error(Errc::InvalidArgument, "no tissue classes");
  }
  for (const TissueClass& c : tissue) {
    if (!(c.weight > 0.0)) throw Error(Errc::InvalidArgument, "class weight must be > 0");
    if (!(c.alpha.lo >= 0.0 && c.alpha.lo <= c.alpha.hi && c.beta.lo >= 0.0 &&
          c.beta.lo <= c.beta.hi)) {
      throw Error(Errc::InvalidArgument, "concentration ranges must satisfy 0 <= lo <= hi");
    }
    for (int ch = 0; ch < 3; ++ch) {
      const double peak = c.alpha.hi * basis.v_h[ch] + c.beta.hi * basis.v_e[ch] +
                          residual_amplitude * std::abs(basis.v_res[ch]);
      if (peak > kOdMax) {
        throw Error(Errc::SaturationRisk, "class could reach OD " + std::to_string(peak) +
                                              " > " + std::to_string(kOdMax));
      }
    }
  }
}

namespace {

constexpr std::uint32_t kSynthStream = 0x5359'4e00u;

struct PixelDraw {
  Concentration c;
  OdPixel od;
};

PixelDraw draw_pixel(const SynthSpec& spec, double total_weight, std::uint64_t index) {
  CounterStream rng(spec.seed, static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), kSynthStream);
  const double u_white = rng.next_uniform();
  const double u_class = rng.next_uniform() * total_weight;
  const double u_alpha = rng.next_uniform();
  const double u_beta = rng.next_uniform();
  const double u_gamma = rng.next_uniform();

  PixelDraw d;
  if (u_white < spec.white_fraction) return d;
  std::size_t k = 0;
  double acc = spec.tissue[0].weight;
  while (k + 1 < spec.tissue.size() && u_class >= acc) acc += spec.tissue[++k].weight;
  const TissueClass& cls = spec.tissue[k];
  d.c.alpha = cls.alpha.sample(u_alpha);
  d.c.beta = cls.beta.sample(u_beta);
  d.c.gamma = spec.residual_amplitude * (2.0 * u_gamma - 1.0);
  const Vec3 od =
      d.c.alpha * spec.basis.v_h + d.c.beta * spec.basis.v_e + d.c.gamma * spec.basis.v_res;
  d.od = OdPixel::from(od);
  return d;
}

double total_weight(const SynthSpec& spec) {
  double w = 0.0;
  for (const TissueClass& c : spec.tissue) w += c.weight;
  return w;
}

}  // namespace

SynthPatch generate_patch(const SynthSpec& spec) {
  spec.validate();
  const double weight = total_weight(spec);
  SynthPatch out{RgbImage(spec.width, spec.height), ConcentrationMap(spec.width, spec.height)};
  const OdTables& tables = OdTables::instance();
  const auto count = static_cast<std::ptrdiff_t>(out.image.pixel_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const PixelDraw d = draw_pixel(spec, weight, static_cast<std::uint64_t>(i));
    std::uint8_t* px = out.image.pixel(static_cast<std::size_t>(i));
    px[0] = tables.quantize(d.od.r);
    px[1] = tables.quantize(d.od.g);
    px[2] = tables.quantize(d.od.b);
    float* t = out.truth.pixel(static_cast<std::size_t>(i));
    t[0] = static_cast<float>(d.c.alpha);
    t[1] = static_cast<float>(d.c.beta);
    t[2] = static_cast<float>(d.c.gamma);
  }
  return out;
}

std::vector<OdPixel> generate_od_pixels(const SynthSpec& spec, std::vector<Concentration>* truth) {
  spec.validate();
  const double weight = total_weight(spec);
  const std::size_t n = static_cast<std::size_t>(spec.width) * spec.height;
  std::vector<OdPixel> pixels(n);
  if (truth != nullptr) truth->assign(n, Concentration{});
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const PixelDraw d = draw_pixel(spec, weight, static_cast<std::uint64_t>(i));
    pixels[i] = d.od;
    if (truth != nullptr) (*truth)[i] = d.c;
  }
  return pixels;
}

}  // namespace stainaug

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

#include <cmath>

#include <Eigen/LU>

#include "doctest.h"
#include "stainaug/error.hpp"
#include "stainaug/synth.hpp"

using namespace stainaug;

TEST_CASE("reference basis") {
  const StainBasis a = reference_basis();
  CHECK(std::abs(a.v_h.norm() - 1.0) < 1e-12);
  CHECK(std::abs(a.v_e.norm() - 1.0) < 1e-12);
  CHECK(std::abs(a.v_res.norm() - 1.0) < 1e-12);
  CHECK(std::abs(a.v_res.dot(a.v_h)) < 1e-12);
  CHECK(std::abs(a.v_res.dot(a.v_e)) < 1e-12);
  CHECK(reference_basis() == a);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("all-white spec") {
  SynthSpec spec;
  spec.width = spec.height = 32;
  spec.white_fraction = 1.0;
  const SynthPatch p = generate_patch(spec);
  for (std::uint8_t v : p.image.samples()) CHECK(v == 255);
  for (float v : p.truth.samples()) CHECK(v == 0.0f);
}

TEST_CASE("single stain at unit strength is a flat image") {
  SynthSpec spec = SynthSpec::single(ConcentrationDist::constant(1.0), ConcentrationDist::constant(0.0));
  spec.width = spec.height = 16;
  const SynthPatch p = generate_patch(spec);
  const RgbPixel expected = od_to_rgb(OdPixel::from(reference_basis().v_h));
  for (std::size_t i = 0; i < p.image.pixel_count(); ++i) {
    CHECK(p.image.pixel(i)[0] == expected.r);
    CHECK(p.image.pixel(i)[1] == expected.g);
    CHECK(p.image.pixel(i)[2] == expected.b);
  }
}

TEST_CASE("8-bit patch separates back to its ground truth") {
  SynthSpec spec;
  spec.seed = 1234;
  const SynthPatch p = generate_patch(spec);
  const ConcentrationMap m = separate_image(to_od(p.image), spec.basis);
  const Mat3 inv = spec.basis.matrix().inverse();
  double worst = 0.0;
  std::size_t over_bound = 0;
  for (std::size_t i = 0; i < m.pixel_count(); ++i) {
    // Half a level of rounding at intensity v moves OD by at most
    // log10(v / (v - 0.5)); push that through the inverse.
    Vec3 od_err;
    for (int c = 0; c < 3; ++c) {
      const double v = p.image.pixel(i)[c];
      od_err[c] = std::log10(v / (v - 0.5));
    }
    const Vec3 bound = inv.cwiseAbs() * od_err;
    for (int c = 0; c < 2; ++c) {
      const double err = std::abs(double(m.pixel(i)[c]) - double(p.truth.pixel(i)[c]));
      worst = std::max(worst, err);
      if (err > bound[c] + 1e-6) ++over_bound;
    }
  }
  MESSAGE("max |alpha, beta error| after 8-bit quantization: " << worst);
  CHECK(over_bound == 0);
  // Darkest pixels (alpha = beta = 1, intensities near 10) dominate.
  CHECK(worst <= 0.05);
}

TEST_CASE("exact optical densities agree with the quantized patch") {
  SynthSpec spec;
  spec.width = spec.height = 64;
  spec.residual_amplitude = 0.01;
  std::vector<Concentration> truth;
  const std::vector<OdPixel> px = generate_od_pixels(spec, &truth);
  const SynthPatch p = generate_patch(spec);
  for (std::size_t i = 0; i < px.size(); ++i) {
    const RgbPixel q = od_to_rgb(px[i]);
    REQUIRE(p.image.pixel(i)[0] == q.r);
    REQUIRE(p.image.pixel(i)[1] == q.g);
    REQUIRE(p.image.pixel(i)[2] == q.b);
    REQUIRE(p.truth.pixel(i)[0] == static_cast<float>(truth[i].alpha));
  }
}

TEST_CASE("pixels draw independently of image size") {
  SynthSpec small;
  small.width = 10;
  small.height = 10;
  small.seed = 3;
  SynthSpec wide = small;
  wide.width = 10;
  wide.height = 20;
  const SynthPatch a = generate_patch(small);
  const SynthPatch b = generate_patch(wide);
  for (std::size_t i = 0; i < a.image.samples().size(); ++i) {
    CHECK(a.image.samples()[i] == b.image.samples()[i]);
  }
  wide.seed = 4;
  CHECK_FALSE(generate_patch(wide).image == b.image);
}

TEST_CASE("class mixture weights") {
  SynthSpec spec;
  spec.width = spec.height = 200;
  spec.tissue = {{0.25, ConcentrationDist::constant(1.0), ConcentrationDist::constant(0.0)},
                 {0.75, ConcentrationDist::constant(0.0), ConcentrationDist::constant(1.0)}};
  std::vector<Concentration> truth;
  generate_od_pixels(spec, &truth);
  std::size_t h = 0;
  for (const Concentration& c : truth) h += c.alpha == 1.0;
  const double frac = static_cast<double>(h) / truth.size();
  CHECK(std::abs(frac - 0.25) < 5 * std::sqrt(0.25 * 0.75 / truth.size()));
}

TEST_CASE("spec validation") {
  SynthSpec spec;
  spec.white_fraction = 1.5;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = SynthSpec{};
  spec.tissue = {{1.0, ConcentrationDist::uniform(0.0, 4.0), ConcentrationDist::constant(0.0)}};
  try {
    spec.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SaturationRisk);
  }
  spec = SynthSpec{};
  spec.tissue.clear();
  CHECK_THROWS_AS(spec.validate(), Error);
}

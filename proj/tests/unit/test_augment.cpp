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

#include "doctest.h"
#include "stainaug/augment.hpp"
#include "stainaug/error.hpp"
#include "stainaug/synth.hpp"

using namespace stainaug;

namespace {

int max_level_diff(const RgbImage& a, const RgbImage& b) {
  int worst = 0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    worst = std::max(worst, std::abs(int(a.samples()[i]) - int(b.samples()[i])));
  }
  return worst;
}

struct Fixture {
  RgbImage image;
  SlideStainStats stats;
  std::vector<std::uint8_t> mask;
};

// Two-class patch whose statistics are measured with the true basis.
Fixture make_fixture(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.width = spec.height = 200;
  spec.white_fraction = 0.2;
  spec.tissue = {{0.5, ConcentrationDist::uniform(0.3, 1.0), ConcentrationDist::uniform(0.0, 0.1)},
                 {0.5, ConcentrationDist::uniform(0.0, 0.1), ConcentrationDist::uniform(0.3, 1.0)}};
  Fixture f;
  f.image = generate_patch(spec).image;
  f.mask = tissue_mask(f.image, BasisConfig{});
  const StainStrength s = measure_stain_strength(f.image, reference_basis(), f.mask);
  f.stats = {"slide", reference_basis(), s.h, s.e, 0};
  return f;
}

}  // namespace

TEST_CASE("configurations") {
  const SraConfig n = SraConfig::narrow();
  CHECK(n.h_range.lo == 0.5);
  CHECK(n.h_range.hi == 2.0);
  CHECK(n.e_range.lo == 0.2);
  CHECK(n.e_range.hi == 2.0);
  CHECK(n.p_drop == 0.0);
  const SraConfig w = SraConfig::wide();
  CHECK(w.h_range.lo == 0.1);
  CHECK(w.h_range.hi == 2.5);
  CHECK(w.e_range.lo == 0.1);
  CHECK(w.e_range.hi == 2.5);
  CHECK(w.p_drop == 0.1);
  const TsaConfig t;
  CHECK(t.scale_halfwidth == 0.05);
  CHECK(t.bias_halfwidth == 0.05);
  CHECK_FALSE(n.include_residual);
}

TEST_CASE("config validation") {
  SraConfig c;
  c.h_range = {0.0, 1.0};
  CHECK_THROWS_AS(c.validate(), Error);
  c = SraConfig{};
  c.e_range = {2.0, 1.0};
  CHECK_THROWS_AS(c.validate(), Error);
  c = SraConfig{};
  c.p_drop = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  TsaConfig t;
  t.scale_halfwidth = 0.6;
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("coefficients without drop stay inside their ranges") {
  const SraConfig cfg = SraConfig::narrow();
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const SraCoefficients c = sample_coefficients(cfg, {3, i, static_cast<std::uint32_t>(i % 2)});
    CHECK(c.dropped == DroppedChannel::None);
    CHECK(c.coef_h > 0.5);
    CHECK(c.coef_h < 2.0);
    CHECK(c.coef_e > 0.2);
    CHECK(c.coef_e < 2.0);
  }
}

TEST_CASE("forced drop zeroes exactly one coefficient") {
  SraConfig cfg = SraConfig::wide();
  cfg.p_drop = 1.0;
  for (std::uint64_t i = 0; i < 5000; ++i) {
    const SraCoefficients c = sample_coefficients(cfg, {9, i, 0});
    CHECK(((c.coef_h == 0.0) != (c.coef_e == 0.0)));
    CHECK((c.dropped == DroppedChannel::Hematoxylin) == (c.coef_h == 0.0));
  }
}

TEST_CASE("drop frequency and split") {
  const SraConfig cfg = SraConfig::wide();
  const int n = 100000;
  int dropped = 0;
  int dropped_h = 0;
  for (int i = 0; i < n; ++i) {
    const SraCoefficients c = sample_coefficients(cfg, {2024, static_cast<std::uint64_t>(i), 0});
    if (c.dropped != DroppedChannel::None) ++dropped;
    if (c.dropped == DroppedChannel::Hematoxylin) ++dropped_h;
  }
  CHECK(std::abs(dropped / double(n) - 0.1) <= 0.006);
  CHECK(std::abs(dropped_h / double(dropped) - 0.5) <= 0.01);
}

TEST_CASE("draws depend on the whole seed triple") {
  const SraConfig cfg = SraConfig::narrow();
  const SraCoefficients a = sample_coefficients(cfg, {1, 2, 0});
  CHECK(sample_coefficients(cfg, {1, 2, 0}).coef_h == a.coef_h);
  CHECK(sample_coefficients(cfg, {1, 2, 1}).coef_h != a.coef_h);
  CHECK(sample_coefficients(cfg, {1, 3, 0}).coef_h != a.coef_h);
  CHECK(sample_coefficients(cfg, {2, 2, 0}).coef_h != a.coef_h);
  SraConfig shared = cfg;
  shared.share_across_views = true;
  CHECK(sample_coefficients(shared, {1, 2, 0}).coef_h == sample_coefficients(shared, {1, 2, 1}).coef_h);
}

TEST_CASE("SRA at the slide's own strength is the identity") {
  const Fixture f = make_fixture(1);
  SraConfig cfg;
  cfg.h_range = {f.stats.h_max, f.stats.h_max};
  cfg.e_range = {f.stats.e_max, f.stats.e_max};
  cfg.include_residual = true;
  const RgbImage out = sra_augment(f.image, "slide", f.stats, cfg, {0, 0, 0});
  CHECK(max_level_diff(out, f.image) <= 1);
}

TEST_CASE("dropping eosin") {
  const Fixture f = make_fixture(2);
  const RgbImage out = sra_apply(f.image, f.stats, {1.0, 0.0, DroppedChannel::Eosin}, false);
  const StainStrength s = measure_stain_strength(out, f.stats.basis, f.mask);
  MESSAGE("99th percentile beta after dropping E: " << s.e);
  CHECK(s.e <= 0.02);
}

TEST_CASE("SRA sets the hematoxylin strength") {
  const Fixture f = make_fixture(3);
  for (double c : {0.1, 0.5, 1.3, 2.5}) {
    const RgbImage out = sra_apply(f.image, f.stats, {c, 1.0, DroppedChannel::None}, false);
    const StainStrength s = measure_stain_strength(out, f.stats.basis, f.mask);
    CHECK(std::abs(s.h - c) <= 0.03);
    CHECK(std::abs(s.e - 1.0) <= 0.03);
  }
}

TEST_CASE("TSA with zero widths is the identity") {
  const Fixture f = make_fixture(4);
  TsaConfig cfg{0.0, 0.0, true};
  const RgbImage out = tsa_augment(f.image, "slide", f.stats, cfg, {5, 6, 7});
  CHECK(max_level_diff(out, f.image) <= 1);
}

TEST_CASE("TSA output strength follows the source") {
  const Fixture f = make_fixture(5);
  const TsaConfig cfg;
  for (std::uint32_t v = 0; v < 20; ++v) {
    TsaDraw d;
    const RgbImage out = tsa_augment(f.image, "slide", f.stats, cfg, {11, 0, v}, &d);
    CHECK(d.scale_h >= 0.95);
    CHECK(d.scale_h <= 1.05);
    CHECK(std::abs(d.bias_h) <= 0.05);
    const StainStrength s = measure_stain_strength(out, f.stats.basis, f.mask);
    CHECK(s.h >= 0.95 * f.stats.h_max - 0.05 - 0.03);
    CHECK(s.h <= 1.05 * f.stats.h_max + 0.05 + 0.03);
  }
}

TEST_CASE("slide mismatch") {
  const Fixture f = make_fixture(6);
  try {
    sra_augment(f.image, "other", f.stats, SraConfig{}, {0, 0, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SlideMismatch);
  }
  CHECK_THROWS_AS(tsa_augment(f.image, "other", f.stats, TsaConfig{}, {0, 0, 0}), Error);
}

TEST_CASE("augmentation is deterministic") {
  const Fixture f = make_fixture(7);
  const SraConfig cfg = SraConfig::wide();
  CHECK(sra_augment(f.image, "slide", f.stats, cfg, {1, 2, 3}) ==
        sra_augment(f.image, "slide", f.stats, cfg, {1, 2, 3}));
  CHECK(tsa_augment(f.image, "slide", f.stats, TsaConfig{}, {1, 2, 3}) ==
        tsa_augment(f.image, "slide", f.stats, TsaConfig{}, {1, 2, 3}));
}

TEST_CASE("dropped channel names") {
  CHECK(to_string(DroppedChannel::None) == "none");
  CHECK(to_string(DroppedChannel::Hematoxylin) == "H");
  CHECK(to_string(DroppedChannel::Eosin) == "E");
}

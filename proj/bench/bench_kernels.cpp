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

// Serial reference vs OpenMP kernels on a 400x400 patch (and batch sizes
// typical of a contrastive step for the loss).

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "stainaug/kernels.hpp"
#include "stainaug/synth.hpp"

namespace {

using namespace stainaug;

const RgbImage& patch() {
  static const RgbImage image = [] {
    SynthSpec spec;
    spec.white_fraction = 0.3;
    spec.seed = 1;
    return generate_patch(spec).image;
  }();
  return image;
}

const OdImage& od_patch() {
  static const OdImage od = [] {
    OdImage out(patch().width(), patch().height());
    kernels::serial::rgb_to_od(patch(), out);
    return out;
  }();
  return od;
}

const ConcentrationMap& conc_patch() {
  static const ConcentrationMap map = [] {
    ConcentrationMap out(patch().width(), patch().height());
    kernels::serial::separate(od_patch(), Separator(reference_basis()).inverse(), out);
    return out;
  }();
  return map;
}

const std::vector<OdPixel>& od_pixels() {
  static const std::vector<OdPixel> pixels = [] {
    std::vector<OdPixel> out(od_patch().pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const float* p = od_patch().pixel(i);
      out[i] = {p[0], p[1], p[2]};
    }
    return out;
  }();
  return pixels;
}

FeatureBatch random_batch(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FeatureBatch b(n, d);
  for (double& v : b.values()) v = normal(rng);
  return l2_normalize(b);
}

void set_pixels(benchmark::State& state) {
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(patch().pixel_count()));
}

template <void (*Kernel)(const RgbImage&, OdImage&)>
void BM_RgbToOd(benchmark::State& state) {
  OdImage out(patch().width(), patch().height());
  for (auto _ : state) {
    Kernel(patch(), out);
    benchmark::DoNotOptimize(out.samples().data());
  }
  set_pixels(state);
}

template <void (*Kernel)(const OdImage&, RgbImage&)>
void BM_OdToRgb(benchmark::State& state) {
  RgbImage out(patch().width(), patch().height());
  for (auto _ : state) {
    Kernel(od_patch(), out);
    benchmark::DoNotOptimize(out.samples().data());
  }
  set_pixels(state);
}

template <void (*Kernel)(const OdImage&, const Mat3&, ConcentrationMap&)>
void BM_Separate(benchmark::State& state) {
  const Separator sep(reference_basis());
  ConcentrationMap out(patch().width(), patch().height());
  for (auto _ : state) {
    Kernel(od_patch(), sep.inverse(), out);
    benchmark::DoNotOptimize(out.samples().data());
  }
  set_pixels(state);
}

template <void (*Kernel)(const ConcentrationMap&, const StainBasis&, const StainTransform&, OdImage&)>
void BM_Reconstruct(benchmark::State& state) {
  const StainTransform t{1.3, 0.0, 0.7, 0.0, false};
  OdImage out(patch().width(), patch().height());
  for (auto _ : state) {
    Kernel(conc_patch(), reference_basis(), t, out);
    benchmark::DoNotOptimize(out.samples().data());
  }
  set_pixels(state);
}

template <void (*Kernel)(const RgbImage&, const Separator&, const StainTransform&, RgbImage&)>
void BM_TransformStains(benchmark::State& state) {
  const Separator sep(reference_basis());
  const StainTransform t{1.3, 0.0, 0.7, 0.0, false};
  RgbImage out(patch().width(), patch().height());
  for (auto _ : state) {
    Kernel(patch(), sep, t, out);
    benchmark::DoNotOptimize(out.samples().data());
  }
  set_pixels(state);
}

template <PixelMoments (*Kernel)(std::span<const OdPixel>)>
void BM_Moments(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(od_pixels()));
  set_pixels(state);
}

template <void (*Kernel)(const ConcentrationMap&, int, std::span<const std::uint8_t>, StainHistogram&)>
void BM_Histogram(benchmark::State& state) {
  for (auto _ : state) {
    StainHistogram hist;
    Kernel(conc_patch(), 0, {}, hist);
    benchmark::DoNotOptimize(hist.total());
  }
  set_pixels(state);
}

template <double (*Kernel)(const FeatureBatch&, const FeatureBatch&, double)>
void BM_InfoNce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FeatureBatch q = random_batch(n, 128, 1);
  const FeatureBatch k = random_batch(n, 128, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(q, k, kDefaultTemperature));
}

template <void (*Kernel)(const FeatureBatch&, const FeatureBatch&, double, FeatureBatch&, FeatureBatch&)>
void BM_InfoNceGrad(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FeatureBatch q = random_batch(n, 128, 1);
  const FeatureBatch k = random_batch(n, 128, 2);
  FeatureBatch dq(n, 128);
  FeatureBatch dk(n, 128);
  for (auto _ : state) {
    Kernel(q, k, kDefaultTemperature, dq, dk);
    benchmark::DoNotOptimize(dq.values().data());
  }
}

namespace ks = kernels::serial;
namespace ko = kernels::omp;

BENCHMARK(BM_RgbToOd<ks::rgb_to_od>)->Name("rgb_to_od/serial");
BENCHMARK(BM_RgbToOd<ko::rgb_to_od>)->Name("rgb_to_od/omp");
BENCHMARK(BM_OdToRgb<ks::od_to_rgb>)->Name("od_to_rgb/serial");
BENCHMARK(BM_OdToRgb<ko::od_to_rgb>)->Name("od_to_rgb/omp");
BENCHMARK(BM_Separate<ks::separate>)->Name("separate/serial");
BENCHMARK(BM_Separate<ko::separate>)->Name("separate/omp");
BENCHMARK(BM_Reconstruct<ks::reconstruct>)->Name("reconstruct/serial");
BENCHMARK(BM_Reconstruct<ko::reconstruct>)->Name("reconstruct/omp");
BENCHMARK(BM_TransformStains<ks::transform_stains>)->Name("transform_stains/serial");
BENCHMARK(BM_TransformStains<ko::transform_stains>)->Name("transform_stains/omp");
BENCHMARK(BM_Moments<ks::moments>)->Name("moments/serial");
BENCHMARK(BM_Moments<ko::moments>)->Name("moments/omp");
BENCHMARK(BM_Histogram<ks::histogram>)->Name("histogram/serial");
BENCHMARK(BM_Histogram<ko::histogram>)->Name("histogram/omp");
BENCHMARK(BM_InfoNce<ks::info_nce>)->Name("info_nce/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_InfoNce<ko::info_nce>)->Name("info_nce/omp")->Arg(64)->Arg(256);
BENCHMARK(BM_InfoNceGrad<ks::info_nce_grad>)->Name("info_nce_grad/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_InfoNceGrad<ko::info_nce_grad>)->Name("info_nce_grad/omp")->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();

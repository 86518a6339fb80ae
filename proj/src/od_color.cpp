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

#include "stainaug/od_color.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stainaug/error.hpp"

namespace stainaug {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidBasis: return "InvalidBasis";
    case Errc::NoTissue: return "NoTissue";
    case Errc::DegeneratePlane: return "DegeneratePlane";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::ZeroRow: return "ZeroRow";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::BadTemperature: return "BadTemperature";
    case Errc::EmptyHistogram: return "EmptyHistogram";
    case Errc::SlideMismatch: return "SlideMismatch";
    case Errc::SaturationRisk: return "SaturationRisk";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicatePath: return "DuplicatePath";
    case Errc::IoError: return "IoError";
    case Errc::BadMagic: return "BadMagic";
    case Errc::MissingSlideStats: return "MissingSlideStats";
    case Errc::AllSlidesFailed: return "AllSlidesFailed";
  }
  return "Unknown";
}

double intensity_to_od(int intensity) noexcept {
  const int clamped = std::clamp(intensity, 1, 255);
  return -std::log10(static_cast<double>(clamped) / kIncidentIntensity);
}

std::uint8_t od_to_intensity(double od) noexcept {
  if (std::isnan(od)) return 255;
  const double i = std::floor(kIncidentIntensity * std::pow(10.0, -od) + 0.5);
  return static_cast<std::uint8_t>(std::clamp(i, 0.0, 255.0));
}

OdPixel rgb_to_od(RgbPixel p) noexcept {
  return {intensity_to_od(p.r), intensity_to_od(p.g), intensity_to_od(p.b)};
}

RgbPixel od_to_rgb(const OdPixel& p) noexcept {
  return {od_to_intensity(p.r), od_to_intensity(p.g), od_to_intensity(p.b)};
}

const OdTables& OdTables::instance() {
  static const OdTables tables;
  return tables;
}

OdTables::OdTables() {
  for (int i = 0; i < 256; ++i) od_[i] = intensity_to_od(i);
  threshold_[0] = std::numeric_limits<double>::infinity();
  // Largest od that still rounds to >= k. Start from the closed form and
  // step by ulps so the table reproduces od_to_intensity exactly.
  for (int k = 1; k < 256; ++k) {
    double t = -std::log10((k - 0.5) / kIncidentIntensity);
    while (od_to_intensity(t) < k) t = std::nextafter(t, -1.0);
    while (od_to_intensity(std::nextafter(t, 10.0)) >= k) t = std::nextafter(t, 10.0);
    threshold_[k] = t;
  }
  // guess_[g] = intensity for the lower edge of grid cell g.
  for (std::size_t g = 0; g < kGridSize; ++g) {
    const double od = static_cast<double>(g) / kGridScale;
    int k = 0;
    while (k < 255 && od <= threshold_[k + 1]) ++k;
    guess_[g] = static_cast<std::uint8_t>(k);
  }
}

}  // namespace stainaug

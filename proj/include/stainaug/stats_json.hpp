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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stainaug/slide_stats.hpp"

namespace stainaug {

/// Slide statistics handed between pipeline stages. Serialized as a JSON
/// object keyed by slide id:
///   { "<slide>": { "v_h": [..], "v_e": [..], "v_res": [..],
///                  "h_max": x, "e_max": y, "n_tissue_pixels": n }, ... }
/// with reals at 17 significant digits. Per-slide failures go under the
/// reserved key "__errors__" (slide id -> message), present only if any.
struct StatsDocument {
  std::vector<SlideStainStats> slides;
  std::vector<std::pair<std::string, std::string>> errors;

  const SlideStainStats* find(const std::string& slide_id) const;
};

inline constexpr const char* kStatsErrorsKey = "__errors__";

std::string format_stats_json(const StatsDocument& doc);
/// Throws ParseError on malformed documents; bases are re-validated.
StatsDocument parse_stats_json(const std::string& text);

void write_stats_json(const std::filesystem::path& path, const StatsDocument& doc);
StatsDocument read_stats_json(const std::filesystem::path& path);

/// printf("%.17g").
std::string format_real(double v);

}  // namespace stainaug

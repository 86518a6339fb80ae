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

#include "stainaug/image.hpp"

namespace stainaug {

/// Any PNG libpng can decode, converted to 8-bit RGB. Throws IoError.
RgbImage read_png(const std::filesystem::path& path);

/// 8-bit RGB, fixed encoder settings so identical pixels give identical bytes.
void write_png(const std::filesystem::path& path, const RgbImage& image);

}  // namespace stainaug

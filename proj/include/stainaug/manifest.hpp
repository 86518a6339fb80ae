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
#include <istream>
#include <string>
#include <vector>

namespace stainaug {

struct ManifestEntry {
  std::string patch_path;
  std::string slide_id;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Patch list with header `patch_path,slide_id`. Relative patch paths are
/// resolved against `base_dir` (the manifest's directory when loaded from disk).
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  /// Distinct slide ids in order of first appearance.
  std::vector<std::string> slide_ids() const;
  std::filesystem::path resolve(const ManifestEntry& entry) const;
};

/// Throws ParseError (with line number) or DuplicatePath.
Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace stainaug

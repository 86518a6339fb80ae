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

#include "stainaug/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include "stainaug/error.hpp"

namespace stainaug {
namespace {

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

/// Splits one CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(Errc::ParseError, where(line_no) + "unterminated quote");
  return fields;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::vector<std::string> Manifest::slide_ids() const {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const ManifestEntry& e : entries) {
    if (seen.insert(e.slide_id).second) ids.push_back(e.slide_id);
  }
  return ids;
}

std::filesystem::path Manifest::resolve(const ManifestEntry& entry) const {
  const std::filesystem::path p(entry.patch_path);
  return p.is_absolute() ? p : base_dir / p;
}

Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  Manifest manifest;
  manifest.base_dir = base_dir;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::unordered_set<std::string> paths;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != "patch_path,slide_id") {
        throw Error(Errc::ParseError, where(line_no) + "expected header 'patch_path,slide_id'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_record(line, line_no);
    if (fields.size() != 2) {
      throw Error(Errc::ParseError, where(line_no) + "expected 2 fields, found " +
                                        std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw Error(Errc::ParseError, where(line_no) + "empty field");
    }
    if (!paths.insert(fields[0]).second) {
      throw Error(Errc::DuplicatePath, where(line_no) + "duplicate patch path '" + fields[0] + "'");
    }
    manifest.entries.push_back({fields[0], fields[1]});
  }
  if (!header_seen) throw Error(Errc::ParseError, where(1) + "missing header");
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path());
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot create " + path.string());
  out << "patch_path,slide_id\n";
  for (const ManifestEntry& e : manifest.entries) {
    out << quote_if_needed(e.patch_path) << ',' << quote_if_needed(e.slide_id) << '\n';
  }
}

}  // namespace stainaug

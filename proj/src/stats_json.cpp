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

#include "stainaug/stats_json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stainaug/error.hpp"

namespace stainaug {

const SlideStainStats* StatsDocument::find(const std::string& slide_id) const {
  for (const SlideStainStats& s : slides) {
    if (s.slide_id == slide_id) return &s;
  }
  return nullptr;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

std::string vec_json(const Vec3& v) {
  return "[" + format_real(v.x()) + ", " + format_real(v.y()) + ", " + format_real(v.z()) + "]";
}

Vec3 read_vec(const nlohmann::json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    throw Error(Errc::ParseError, std::string(key) + " must be an array of 3 reals");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace

std::string format_stats_json(const StatsDocument& doc) {
  std::string out = "{";
  bool first = true;
  for (const SlideStainStats& s : doc.slides) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "  " + quoted(s.slide_id) + ": {\n";
    out += "    \"v_h\": " + vec_json(s.basis.v_h) + ",\n";
    out += "    \"v_e\": " + vec_json(s.basis.v_e) + ",\n";
    out += "    \"v_res\": " + vec_json(s.basis.v_res) + ",\n";
    out += "    \"h_max\": " + format_real(s.h_max) + ",\n";
    out += "    \"e_max\": " + format_real(s.e_max) + ",\n";
    out += "    \"n_tissue_pixels\": " + std::to_string(s.n_tissue_pixels) + "\n";
    out += "  }";
  }
  if (!doc.errors.empty()) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "  " + quoted(kStatsErrorsKey) + ": {";
    for (std::size_t i = 0; i < doc.errors.size(); ++i) {
      out += i == 0 ? "\n" : ",\n";
      out += "    " + quoted(doc.errors[i].first) + ": " + quoted(doc.errors[i].second);
    }
    out += "\n  }";
  }
  out += first ? "}\n" : "\n}\n";
  return out;
}

StatsDocument parse_stats_json(const std::string& text) {
  nlohmann::ordered_json root;
  try {
    root = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, std::string("stats JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(Errc::ParseError, "stats JSON must be an object");
  StatsDocument doc;
  for (const auto& [key, value] : root.items()) {
    if (key == kStatsErrorsKey) {
      for (const auto& [slide, message] : value.items()) {
        doc.errors.emplace_back(slide, message.get<std::string>());
      }
      continue;
    }
    try {
      SlideStainStats s;
      s.slide_id = key;
      s.basis.v_h = read_vec(value, "v_h");
      s.basis.v_e = read_vec(value, "v_e");
      s.basis.v_res = read_vec(value, "v_res");
      s.h_max = value.at("h_max").get<double>();
      s.e_max = value.at("e_max").get<double>();
      s.n_tissue_pixels = value.at("n_tissue_pixels").get<std::uint64_t>();
      s.basis.validate();
      if (!(s.h_max > 0.0 && s.e_max > 0.0)) {
        throw Error(Errc::ParseError, "h_max and e_max must be positive");
      }
      doc.slides.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, "slide '" + key + "': " + e.what());
    }
  }
  return doc;
}

void write_stats_json(const std::filesystem::path& path, const StatsDocument& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot create " + path.string());
  out << format_stats_json(doc);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

StatsDocument read_stats_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_stats_json(buf.str());
}

}  // namespace stainaug

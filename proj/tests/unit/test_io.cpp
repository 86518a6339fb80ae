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

#include <cstring>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "stainaug/binary_io.hpp"
#include "stainaug/error.hpp"
#include "stainaug/manifest.hpp"
#include "stainaug/png_io.hpp"
#include "stainaug/stats_json.hpp"
#include "stainaug/synth.hpp"

using namespace stainaug;

#ifndef STAINAUG_FIXTURES
#error "STAINAUG_FIXTURES must point at tests/fixtures"
#endif

namespace {

const std::filesystem::path kFixtures = STAINAUG_FIXTURES;

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("png round trip") {
  const auto dir = oracle::scratch_dir("png");
  SynthSpec spec;
  spec.width = 37;
  spec.height = 23;
  const RgbImage img = generate_patch(spec).image;
  write_png(dir / "a.png", img);
  CHECK(read_png(dir / "a.png") == img);
  write_png(dir / "b.png", img);
  CHECK(oracle::read_text(dir / "a.png") == oracle::read_text(dir / "b.png"));
  CHECK(code_of([&] { read_png(dir / "missing.png"); }) == Errc::IoError);
  std::ofstream(dir / "junk.png") << "not a png";
  CHECK(code_of([&] { read_png(dir / "junk.png"); }) == Errc::IoError);
}

TEST_CASE("matrix planes round trip") {
  ConcentrationMap m(5, 3);
  for (std::size_t i = 0; i < m.samples().size(); ++i) m.samples()[i] = 0.25f * i - 1.0f;
  const MatrixPlanes planes = to_planes(m);
  CHECK(planes.planes == 3);
  CHECK(planes.rows == 3);
  CHECK(planes.cols == 5);
  CHECK(planes.plane(1)[0] == m.pixel(0)[1]);
  const std::vector<std::byte> bytes = encode_matrix_planes(planes);
  CHECK(bytes.size() == 16 + 4 * 45);
  CHECK(std::memcmp(bytes.data(), "SRAM", 4) == 0);
  CHECK(from_planes(decode_matrix_planes(bytes)) == m);
}

TEST_CASE("feature file layout is little-endian") {
  const FeatureBatch b(1, 2, {1.0, -2.0});
  const std::vector<std::byte> bytes = encode_features(b);
  const unsigned char expected[] = {'S', 'R', 'A', 'F', 1, 0, 0, 0, 2, 0, 0, 0,
                                    0, 0, 0x80, 0x3f, 0, 0, 0, 0xc0};
  REQUIRE(bytes.size() == sizeof(expected));
  CHECK(std::memcmp(bytes.data(), expected, sizeof(expected)) == 0);
  CHECK(decode_features(bytes) == b);
}

TEST_CASE("fixture feature file") {
  const FeatureBatch b = read_features(kFixtures / "orthonormal_n2.sraf");
  CHECK(b == FeatureBatch(2, 2, {1.0, 0.0, 0.0, 1.0}));
}

TEST_CASE("malformed binaries") {
  const std::vector<std::byte> good = encode_features(FeatureBatch(2, 3, 0.5));
  SUBCASE("wrong magic") {
    std::vector<std::byte> bad = good;
    bad[0] = std::byte{'X'};
    CHECK(code_of([&] { decode_features(bad); }) == Errc::BadMagic);
    CHECK(code_of([&] { decode_matrix_planes(good); }) == Errc::BadMagic);
  }
  SUBCASE("shorter than the magic") {
    CHECK(code_of([&] { decode_features(std::span(good).first(2)); }) == Errc::BadMagic);
  }
  SUBCASE("truncated header") {
    const auto f = [&] { decode_features(std::span(good).first(6)); };
    CHECK(code_of(f) == Errc::ParseError);
    CHECK(message_of(f).find("byte offset 4") != std::string::npos);
  }
  SUBCASE("truncated payload") {
    const auto f = [&] { decode_features(std::span(good).first(good.size() - 1)); };
    CHECK(code_of(f) == Errc::ParseError);
    CHECK(message_of(f).find("byte offset 35") != std::string::npos);
  }
  SUBCASE("trailing bytes") {
    std::vector<std::byte> longer = good;
    longer.push_back(std::byte{0});
    CHECK(code_of([&] { decode_features(longer); }) == Errc::ParseError);
  }
  SUBCASE("absurd dimensions") {
    std::vector<std::byte> huge = encode_matrix_planes(MatrixPlanes{1, 1, 1, {0.0f}});
    for (int i = 4; i < 16; ++i) huge[i] = std::byte{0xff};
    CHECK(code_of([&] { decode_matrix_planes(huge); }) == Errc::ParseError);
  }
}

TEST_CASE("manifest parsing") {
  SUBCASE("fixture file, file order") {
    const Manifest m = load_manifest(kFixtures / "manifest3.csv");
    REQUIRE(m.entries.size() == 3);
    CHECK(m.entries[0] == ManifestEntry{"patches/a_0001.png", "TCGA-A1"});
    CHECK(m.entries[1] == ManifestEntry{"patches/a_0002.png", "TCGA-A1"});
    CHECK(m.entries[2] == ManifestEntry{"patches/b,0001.png", "TCGA-B7"});
    CHECK(m.slide_ids() == std::vector<std::string>{"TCGA-A1", "TCGA-B7"});
    CHECK(m.resolve(m.entries[0]) == kFixtures / "patches/a_0001.png");
  }
  SUBCASE("header only") {
    std::istringstream in("patch_path,slide_id\n");
    CHECK(parse_manifest(in, ".").entries.empty());
  }
  SUBCASE("CRLF and blank lines") {
    std::istringstream in("patch_path,slide_id\r\na.png,s\r\n\r\nb.png,s\r\n");
    CHECK(parse_manifest(in, ".").entries.size() == 2);
  }
  SUBCASE("duplicate path") {
    std::istringstream in("patch_path,slide_id\na.png,s1\na.png,s2\n");
    CHECK(code_of([&] { parse_manifest(in, "."); }) == Errc::DuplicatePath);
  }
  SUBCASE("empty field reports its line") {
    const auto f = [] {
      std::istringstream in("patch_path,slide_id\na.png,s1\n,s2\n");
      parse_manifest(in, ".");
    };
    CHECK(code_of(f) == Errc::ParseError);
    CHECK(message_of(f).find("line 3") != std::string::npos);
  }
  SUBCASE("bad header") {
    std::istringstream in("path,slide\na.png,s\n");
    CHECK(code_of([&] { parse_manifest(in, "."); }) == Errc::ParseError);
  }
  SUBCASE("write and reload") {
    const auto dir = oracle::scratch_dir("manifest");
    Manifest m;
    m.entries = {{"x.png", "s,1"}, {"y \"q\".png", "s2"}};
    write_manifest(dir / "m.csv", m);
    CHECK(load_manifest(dir / "m.csv").entries == m.entries);
  }
}

TEST_CASE("stats json round trip") {
  StatsDocument doc;
  const StainBasis b = reference_basis();
  doc.slides.push_back({"slide \"A\"", b, 0.1 + 0.2, 1.0 / 3.0, 123456789});
  doc.slides.push_back({"B", StainBasis::from_stains({0.65, 0.70, 0.29}, {0.07, 0.99, 0.11}), 1.5,
                        2.25, 7});
  doc.errors.emplace_back("C", "NoTissue: nothing");
  const std::string text = format_stats_json(doc);
  const StatsDocument back = parse_stats_json(text);
  CHECK(back.slides == doc.slides);
  CHECK(back.errors == doc.errors);
  CHECK(format_stats_json(back) == text);
  CHECK(back.find("B") != nullptr);
  CHECK(back.find("C") == nullptr);
}

TEST_CASE("stats json rejects bad documents") {
  CHECK(code_of([] { parse_stats_json("[1, 2]"); }) == Errc::ParseError);
  CHECK(code_of([] { parse_stats_json("{\"a\": {\"v_h\": [1, 0]}}"); }) == Errc::ParseError);
  CHECK(code_of([] { parse_stats_json("{not json"); }) == Errc::ParseError);
  StatsDocument doc;
  doc.slides.push_back({"s", reference_basis(), 1.0, 1.0, 10});
  std::string text = format_stats_json(doc);
  const std::string neg = text.substr(0, text.find("\"h_max\"")) + "\"h_max\": -1.0," +
                          text.substr(text.find(',', text.find("\"h_max\"")) + 1);
  CHECK_THROWS_AS(parse_stats_json(neg), Error);
}

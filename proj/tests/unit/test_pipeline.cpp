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
#include <fstream>
#include <sstream>

#include <Eigen/LU>

#include "doctest.h"
#include "oracles.hpp"
#include "stainaug/binary_io.hpp"
#include "stainaug/error.hpp"
#include "stainaug/pipeline.hpp"
#include "stainaug/png_io.hpp"

using namespace stainaug;

namespace {

const std::filesystem::path kFixtures = STAINAUG_FIXTURES;

SynthCorpusConfig small_corpus(int slides, int patches) {
  SynthCorpusConfig c;
  c.slides = slides;
  c.patches_per_slide = patches;
  c.width = c.height = 160;
  c.seed = 77;
  return c;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

StatsDocument reference_stats(const std::string& slide) {
  StatsDocument doc;
  doc.slides.push_back({slide, reference_basis(), 1.0, 1.0, 1});
  return doc;
}

double percentile99(const ConcentrationMap& m, int channel) {
  std::vector<double> v;
  for (std::size_t i = 0; i < m.pixel_count(); ++i) v.push_back(std::abs(m.pixel(i)[channel]));
  return oracle::nearest_rank_percentile(v, 99.0);
}

}  // namespace

TEST_CASE("run config validation") {
  RunConfig r;
  r.workers = 0;
  CHECK_THROWS_AS(r.validate(), Error);
  r = RunConfig{};
  r.views_per_patch = 0;
  CHECK_THROWS_AS(r.validate(), Error);
}

TEST_CASE("event log writes one JSON object per line") {
  std::ostringstream out;
  EventLog log(out);
  log.warning("patch_skipped", {{"path", "a\"b.png"}});
  log.emit("info", "done");
  CHECK(log.warnings() == 1);
  CHECK(out.str() ==
        "{\"level\":\"warning\",\"event\":\"patch_skipped\",\"path\":\"a\\\"b.png\"}\n"
        "{\"level\":\"info\",\"event\":\"done\"}\n");
}

TEST_CASE("synthetic corpus statistics match the ground truth") {
  const auto dir = oracle::scratch_dir("pipeline_stats");
  const SynthCorpusConfig cfg = small_corpus(2, 4);
  const Manifest manifest = run_synth(cfg, dir / "corpus");
  CHECK(manifest.entries.size() == 8);
  CHECK(load_manifest(dir / "corpus" / "manifest.csv").entries == manifest.entries);

  RunConfig run;
  run.workers = 2;
  EventLog log;
  const StatsRunResult r = run_stats(manifest, BasisConfig{}, run, dir / "stats.json", log, dir / "hist");
  REQUIRE(r.document.slides.size() == 2);
  CHECK(r.summary.failed_patches == 0);
  CHECK(lines_of(dir / "hist" / "slide0.csv").size() == 8193);

  for (const SlideStainStats& s : r.document.slides) {
    std::vector<double> alpha, beta;
    for (const ManifestEntry& e : manifest.entries) {
      if (e.slide_id != s.slide_id) continue;
      const RgbImage img = read_png(manifest.resolve(e));
      const std::vector<std::uint8_t> mask = tissue_mask(img, BasisConfig{});
      const std::string stem = std::filesystem::path(e.patch_path).stem().string();
      const ConcentrationMap truth = from_planes(read_matrix_planes(dir / "corpus" / (stem + "_truth.bin")));
      for (std::size_t i = 0; i < truth.pixel_count(); ++i) {
        if (!mask[i]) continue;
        alpha.push_back(truth.pixel(i)[0]);
        beta.push_back(truth.pixel(i)[1]);
      }
    }
    const double h = oracle::nearest_rank_percentile(alpha, 99.0);
    const double e = oracle::nearest_rank_percentile(beta, 99.0);
    MESSAGE(s.slide_id << ": h_max " << s.h_max << " truth " << h << ", e_max " << s.e_max << " truth " << e);
    CHECK(s.n_tissue_pixels == alpha.size());
    CHECK(std::abs(s.h_max - h) <= 5.0 / 8192 + 0.005);
    CHECK(std::abs(s.e_max - e) <= 5.0 / 8192 + 0.005);
    CHECK(angular_error_deg(s.basis.v_h, reference_basis().v_h) < 2.0);
    CHECK(angular_error_deg(s.basis.v_e, reference_basis().v_e) < 2.0);
  }
}

TEST_CASE("statistics are independent of the worker count") {
  const auto dir = oracle::scratch_dir("pipeline_stats_det");
  const Manifest manifest = run_synth(small_corpus(2, 3), dir / "corpus");
  EventLog log;
  RunConfig run;
  for (int w : {1, 3}) {
    run.workers = w;
    run_stats(manifest, BasisConfig{}, run, dir / ("stats" + std::to_string(w) + ".json"), log);
  }
  CHECK(oracle::read_text(dir / "stats1.json") == oracle::read_text(dir / "stats3.json"));
}

TEST_CASE("an unreadable patch is skipped with a warning") {
  const auto dir = oracle::scratch_dir("pipeline_fault");
  Manifest manifest = run_synth(small_corpus(1, 3), dir / "corpus");
  std::ofstream(dir / "corpus" / "broken.png") << "garbage";
  manifest.entries.insert(manifest.entries.begin() + 1, {"broken.png", "slide0"});
  manifest.entries.push_back({"missing.png", "slide0"});
  std::ostringstream out;
  EventLog log(out);
  const StatsRunResult r = run_stats(manifest, BasisConfig{}, RunConfig{}, dir / "stats.json", log);
  CHECK(r.document.slides.size() == 1);
  CHECK(r.summary.failed_patches == 2);
  CHECK(log.warnings() == 2);
  CHECK(out.str().find("broken.png") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "stats.json"));
}

TEST_CASE("slide failures are recorded without aborting other slides") {
  const auto dir = oracle::scratch_dir("pipeline_slide_fail");
  Manifest manifest = run_synth(small_corpus(1, 2), dir / "corpus");
  write_png(dir / "corpus" / "blank.png", RgbImage(50, 50, 255));
  manifest.entries.push_back({"blank.png", "blank_slide"});
  EventLog log;
  const StatsRunResult r = run_stats(manifest, BasisConfig{}, RunConfig{}, dir / "stats.json", log);
  CHECK(r.document.slides.size() == 1);
  REQUIRE(r.document.errors.size() == 1);
  CHECK(r.document.errors[0].first == "blank_slide");
  const StatsDocument back = read_stats_json(dir / "stats.json");
  CHECK(back.errors.size() == 1);

  Manifest only_blank;
  only_blank.base_dir = manifest.base_dir;
  only_blank.entries = {{"blank.png", "blank_slide"}};
  try {
    run_stats(only_blank, BasisConfig{}, RunConfig{}, dir / "none.json", log);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AllSlidesFailed);
  }
}

TEST_CASE("augmentation batch") {
  const auto dir = oracle::scratch_dir("pipeline_augment");
  const Manifest manifest = run_synth(small_corpus(2, 3), dir / "corpus");
  EventLog log;
  const StatsDocument stats =
      run_stats(manifest, BasisConfig{}, RunConfig{}, dir / "stats.json", log).document;

  RunConfig run;
  run.master_seed = 99;
  run.output_dir = dir / "a";
  const BatchSummary s = run_augment(manifest, stats, SraConfig::wide(), run, log);
  CHECK(s.patches == 6);
  CHECK(s.files_written == 12);
  CHECK(s.failed_patches == 0);
  std::size_t pngs = 0;
  for (const auto& f : std::filesystem::directory_iterator(run.output_dir)) {
    pngs += f.path().extension() == ".png";
  }
  CHECK(pngs == 12);
  CHECK(std::filesystem::exists(run.output_dir / "slide1_patch2__v1.png"));
  const std::vector<std::string> rows = lines_of(run.output_dir / "augment_log.csv");
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "patch_path,view_index,coef_h,coef_e,dropped_channel");
  CHECK(rows[1].rfind("slide0_patch0.png,0,", 0) == 0);

  SUBCASE("same seed, different worker counts, identical bytes") {
    RunConfig again = run;
    again.workers = 3;
    again.output_dir = dir / "b";
    run_augment(manifest, stats, SraConfig::wide(), again, log);
    for (const auto& f : std::filesystem::directory_iterator(run.output_dir)) {
      CHECK(oracle::read_text(f.path()) == oracle::read_text(again.output_dir / f.path().filename()));
    }
  }
  SUBCASE("other seed, other outputs") {
    RunConfig other = run;
    other.master_seed = 100;
    other.output_dir = dir / "c";
    run_augment(manifest, stats, SraConfig::wide(), other, log);
    CHECK(oracle::read_text(run.output_dir / "augment_log.csv") !=
          oracle::read_text(other.output_dir / "augment_log.csv"));
  }
  SUBCASE("missing statistics fail before any work") {
    StatsDocument partial = stats;
    partial.slides.pop_back();
    RunConfig r2 = run;
    r2.output_dir = dir / "d";
    try {
      run_augment(manifest, partial, SraConfig::wide(), r2, log);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MissingSlideStats);
    }
    CHECK_FALSE(std::filesystem::exists(r2.output_dir));
  }
  SUBCASE("TSA batch") {
    RunConfig r3 = run;
    r3.output_dir = dir / "t";
    const BatchSummary t = run_tsa(manifest, stats, TsaConfig{}, r3, log);
    CHECK(t.files_written == 12);
    CHECK(lines_of(r3.output_dir / "tsa_log.csv")[0] ==
          "patch_path,view_index,scale_h,bias_h,scale_e,bias_e");
  }
}

TEST_CASE("drop audit over a corpus log") {
  const auto dir = oracle::scratch_dir("pipeline_drop");
  SynthCorpusConfig cfg = small_corpus(2, 150);
  cfg.width = cfg.height = 48;
  const Manifest manifest = run_synth(cfg, dir / "corpus");
  EventLog log;
  const StatsDocument stats =
      run_stats(manifest, BasisConfig{}, RunConfig{}, dir / "stats.json", log).document;
  RunConfig run;
  run.output_dir = dir / "aug";
  run.master_seed = 5;
  run_augment(manifest, stats, SraConfig::wide(), run, log);
  const std::vector<std::string> rows = lines_of(run.output_dir / "augment_log.csv");
  const double n = static_cast<double>(rows.size() - 1);
  double dropped = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::string tail = rows[i].substr(rows[i].rfind(',') + 1);
    dropped += tail != "none";
  }
  CHECK(std::abs(dropped / n - 0.1) <= 3.0 * std::sqrt(0.1 * 0.9 / n));
}

TEST_CASE("separation outputs") {
  const auto dir = oracle::scratch_dir("pipeline_separate");
  SUBCASE("hematoxylin-only input") {
    SynthSpec spec =
        SynthSpec::single(ConcentrationDist::uniform(0.05, 1.0), ConcentrationDist::constant(0.0));
    spec.width = spec.height = 100;
    const RgbImage input = generate_patch(spec).image;
    write_png(dir / "h.png", input);
    const SeparateOutputs out = run_separate(dir / "h.png", reference_stats("s"), "s", dir / "out");
    const RgbImage e_render = read_png(out.e_render);

    // Input rounding of half a level moves OD by log10(v / (v - 0.5)) per
    // channel; through the inverse that bounds the leaked beta, and the
    // E render can darken by at most 255 (1 - 10^(-beta v_e)) plus rounding.
    const StainBasis b = reference_basis();
    const Mat3 inv = b.matrix().inverse();
    int worst = 0;
    std::size_t over_bound = 0;
    for (std::size_t i = 0; i < input.pixel_count(); ++i) {
      Vec3 od_err;
      for (int c = 0; c < 3; ++c) {
        const double v = input.pixel(i)[c];
        od_err[c] = std::log10(v / (v - 0.5));
      }
      const double beta_bound = (inv.row(1).cwiseAbs() * od_err).value();
      for (int c = 0; c < 3; ++c) {
        const int deficit = 255 - int(e_render.pixel(i)[c]);
        worst = std::max(worst, deficit);
        const double allowed = 255.0 * (1.0 - std::pow(10.0, -beta_bound * b.v_e[c])) + 0.5;
        if (deficit > allowed) ++over_bound;
      }
    }
    MESSAGE("E render at most " << worst << " levels from white");
    CHECK(over_bound == 0);
    CHECK(worst <= 4);  // measured 4 on this patch

    const ConcentrationMap planes = from_planes(read_matrix_planes(out.planes));
    CHECK(planes.width() == 100);
    // Re-separating each render leaves little of the suppressed stain.
    const ConcentrationMap from_h = separate_image(to_od(read_png(out.h_render)), b);
    const ConcentrationMap from_e = separate_image(to_od(e_render), b);
    CHECK(percentile99(from_h, 1) <= 0.02);
    CHECK(percentile99(from_e, 0) <= 0.02);
  }
  SUBCASE("mixed input renders re-separate cleanly") {
    SynthSpec spec;
    spec.width = spec.height = 120;
    write_png(dir / "m.png", generate_patch(spec).image);
    const SeparateOutputs out = run_separate(dir / "m.png", reference_stats("s"), "s", dir / "out");
    const ConcentrationMap from_h = separate_image(to_od(read_png(out.h_render)), reference_basis());
    const ConcentrationMap from_e = separate_image(to_od(read_png(out.e_render)), reference_basis());
    MESSAGE("suppressed channel p99: H render beta " << percentile99(from_h, 1) << ", E render alpha "
                                                     << percentile99(from_e, 0));
    CHECK(percentile99(from_h, 1) <= 0.02);
    CHECK(percentile99(from_e, 0) <= 0.02);
  }
  SUBCASE("blank input") {
    write_png(dir / "w.png", RgbImage(30, 30, 255));
    const SeparateOutputs out = run_separate(dir / "w.png", reference_stats("s"), "s", dir / "out");
    for (const auto& p : {out.h_render, out.e_render}) {
      const RgbImage render = read_png(p);
      for (std::uint8_t v : render.samples()) CHECK(v == 255);
    }
  }
  SUBCASE("unknown slide") {
    write_png(dir / "w.png", RgbImage(4, 4, 255));
    CHECK_THROWS_AS(run_separate(dir / "w.png", reference_stats("s"), "t", dir / "out"), Error);
  }
}

TEST_CASE("loss from feature files") {
  const auto f = kFixtures / "orthonormal_n2.sraf";
  const LossReport r = run_loss({f, f, f, f}, 1.0, true, false);
  CHECK(std::abs(r.total - 4 * 0.313261687518222834) < 1e-12);
  const LossReport off = run_loss({f, f, f, f}, 1.0, false, false);
  CHECK(r.total - off.total == r.cl3 + r.cl4);
  const std::string json = loss_report_json(r);
  CHECK(json.find("\"total\": 1.25304675007289") != std::string::npos);

  const auto dir = oracle::scratch_dir("pipeline_loss");
  const std::string bytes = oracle::read_text(f);
  std::ofstream(dir / "short.sraf", std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  try {
    run_loss({f, f, f, dir / "short.sraf"}, 1.0, true, false);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
  }
}

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

// stainaug command line: slide statistics, SRA / TSA augmentation, stain
// separation, contrastive-loss reports and synthetic corpora.
//
// Exit status: 0 success, 1 some patches or slides failed, 2 fatal.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "stainaug/error.hpp"
#include "stainaug/pipeline.hpp"

namespace {

using namespace stainaug;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

int fatal(const std::string& event, const std::string& message) {
  nlohmann::ordered_json j;
  j["level"] = "error";
  j["event"] = event;
  j["error"] = message;
  std::cerr << j.dump() << '\n';
  return kExitFatal;
}

int batch_status(const BatchSummary& s, const EventLog& log) {
  return (s.failed_patches > 0 || log.warnings() > 0) ? kExitPartial : kExitOk;
}

// Range flags override whichever preset was chosen.
void apply_range(TargetRange& range, const CLI::Option* lo_opt, double lo, const CLI::Option* hi_opt,
                 double hi) {
  if (lo_opt->count() > 0) range.lo = lo;
  if (hi_opt->count() > 0) range.hi = hi;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stain separation, stain-strength statistics and stain reconstruction augmentation"};
  app.set_config("--config", "", "TOML/INI file mirroring the flags; flags win on conflict");
  app.require_subcommand(1);

  RunConfig run;
  std::string out_dir = ".";
  app.add_option("--workers", run.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", run.master_seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory");

  // estimate
  auto* est = app.add_subcommand("estimate", "Per-slide stain basis and stain strength");
  est->fallthrough();
  std::string est_manifest;
  std::string est_stats;
  std::string est_hist;
  BasisConfig basis_cfg;
  est->add_option("--manifest", est_manifest, "Patch manifest CSV")->required();
  est->add_option("--stats", est_stats, "Stats JSON to write (default <out>/stats.json)");
  est->add_option("--histograms", est_hist, "Directory for per-slide alpha/beta histogram CSVs");
  est->add_option("--od-threshold", basis_cfg.tissue_od_threshold, "Tissue if mean OD exceeds this")
      ->capture_default_str();
  est->add_option("--angle-percentile", basis_cfg.angle_percentile, "Extreme-angle percentile")
      ->capture_default_str();
  est->add_option("--min-tissue-pixels", basis_cfg.min_tissue_pixels)->capture_default_str();

  // augment
  auto* aug = app.add_subcommand("augment", "Stain reconstruction augmentation");
  aug->fallthrough();
  std::string aug_manifest;
  std::string aug_stats;
  std::string preset = "narrow";
  SraConfig sra = SraConfig::narrow();
  double h_lo = sra.h_range.lo, h_hi = sra.h_range.hi, e_lo = sra.e_range.lo, e_hi = sra.e_range.hi;
  std::optional<double> p_drop;
  aug->add_option("--manifest", aug_manifest)->required();
  aug->add_option("--stats", aug_stats)->required();
  aug->add_option("--preset", preset, "Target ranges: narrow or wide")
      ->check(CLI::IsMember({"narrow", "wide"}))
      ->capture_default_str();
  auto* h_lo_opt = aug->add_option("--h-lo", h_lo, "Lower bound of the H target strength");
  auto* h_hi_opt = aug->add_option("--h-hi", h_hi, "Upper bound of the H target strength");
  auto* e_lo_opt = aug->add_option("--e-lo", e_lo, "Lower bound of the E target strength");
  auto* e_hi_opt = aug->add_option("--e-hi", e_hi, "Upper bound of the E target strength");
  aug->add_option("--p-drop", p_drop, "Channel-drop probability (preset default)");
  aug->add_option("--drop-h-share", sra.drop_h_share, "P(H dropped | drop)")->capture_default_str();
  aug->add_flag("--include-residual", sra.include_residual, "Keep the residual channel");
  aug->add_flag("--share-across-views", sra.share_across_views, "One draw per patch");
  aug->add_option("--views", run.views_per_patch, "Views per patch")->capture_default_str();

  // tsa
  auto* tsa = app.add_subcommand("tsa", "Scale/bias stain augmentation baseline");
  tsa->fallthrough();
  std::string tsa_manifest;
  std::string tsa_stats;
  TsaConfig tsa_cfg;
  tsa->add_option("--manifest", tsa_manifest)->required();
  tsa->add_option("--stats", tsa_stats)->required();
  tsa->add_option("--scale-halfwidth", tsa_cfg.scale_halfwidth)->capture_default_str();
  tsa->add_option("--bias-halfwidth", tsa_cfg.bias_halfwidth)->capture_default_str();
  tsa->add_flag("--include-residual", tsa_cfg.include_residual);
  tsa->add_option("--views", run.views_per_patch)->capture_default_str();

  // separate
  auto* sep = app.add_subcommand("separate", "Single-stain renders and concentration planes");
  sep->fallthrough();
  std::string sep_image;
  std::string sep_stats;
  std::string sep_slide;
  sep->add_option("--image", sep_image)->required();
  sep->add_option("--stats", sep_stats)->required();
  sep->add_option("--slide", sep_slide, "Slide id whose basis to use")->required();

  // loss
  auto* loss = app.add_subcommand("loss", "Contrastive loss report for four feature batches");
  loss->fallthrough();
  LossInputs inputs;
  double tau = kDefaultTemperature;
  bool no_aug = false;
  bool normalize = false;
  loss->add_option("--q1", inputs.q1, "Query encoder, view 1")->required();
  loss->add_option("--q2", inputs.q2, "Query encoder, view 2")->required();
  loss->add_option("--k1", inputs.k1, "Momentum encoder, view 1")->required();
  loss->add_option("--k2", inputs.k2, "Momentum encoder, view 2")->required();
  loss->add_option("--tau", tau, "Temperature")->capture_default_str();
  loss->add_flag("--no-aug", no_aug, "Drop the same-encoder terms");
  loss->add_flag("--normalize", normalize, "L2-normalize rows before the loss");

  // synth
  auto* syn = app.add_subcommand("synth", "Synthetic H&E corpus with ground truth");
  syn->fallthrough();
  SynthCorpusConfig corpus;
  syn->add_option("--slides", corpus.slides)->capture_default_str();
  syn->add_option("--patches-per-slide", corpus.patches_per_slide)->capture_default_str();
  syn->add_option("--width", corpus.width)->capture_default_str();
  syn->add_option("--height", corpus.height)->capture_default_str();
  syn->add_option("--white-fraction", corpus.white_fraction)->capture_default_str();
  syn->add_option("--h-scale-lo", corpus.h_scale.lo)->capture_default_str();
  syn->add_option("--h-scale-hi", corpus.h_scale.hi)->capture_default_str();
  syn->add_option("--e-scale-lo", corpus.e_scale.lo)->capture_default_str();
  syn->add_option("--e-scale-hi", corpus.e_scale.hi)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFatal;
  }

  run.output_dir = out_dir;
  EventLog log(std::cerr);
  try {
    if (*est) {
      const Manifest manifest = load_manifest(est_manifest);
      const std::filesystem::path stats_path =
          est_stats.empty() ? run.output_dir / "stats.json" : std::filesystem::path(est_stats);
      std::optional<std::filesystem::path> hist;
      if (!est_hist.empty()) hist = est_hist;
      const StatsRunResult r = run_stats(manifest, basis_cfg, run, stats_path, log, hist);
      return batch_status(r.summary, log);
    }
    if (*aug) {
      if (preset == "wide") {
        const SraConfig wide = SraConfig::wide();
        sra.h_range = wide.h_range;
        sra.e_range = wide.e_range;
        sra.p_drop = wide.p_drop;
      }
      apply_range(sra.h_range, h_lo_opt, h_lo, h_hi_opt, h_hi);
      apply_range(sra.e_range, e_lo_opt, e_lo, e_hi_opt, e_hi);
      if (p_drop) sra.p_drop = *p_drop;
      const Manifest manifest = load_manifest(aug_manifest);
      const StatsDocument stats = read_stats_json(aug_stats);
      return batch_status(run_augment(manifest, stats, sra, run, log), log);
    }
    if (*tsa) {
      const Manifest manifest = load_manifest(tsa_manifest);
      const StatsDocument stats = read_stats_json(tsa_stats);
      return batch_status(run_tsa(manifest, stats, tsa_cfg, run, log), log);
    }
    if (*sep) {
      run_separate(sep_image, read_stats_json(sep_stats), sep_slide, run.output_dir);
      return kExitOk;
    }
    if (*loss) {
      std::cout << loss_report_json(run_loss(inputs, tau, !no_aug, normalize)) << '\n';
      return kExitOk;
    }
    if (*syn) {
      corpus.seed = run.master_seed;
      run_synth(corpus, run.output_dir);
      return kExitOk;
    }
  } catch (const Error& e) {
    return fatal(std::string(to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return fatal("unexpected", e.what());
  }
  return kExitFatal;
}

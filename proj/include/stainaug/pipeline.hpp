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

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stainaug/augment.hpp"
#include "stainaug/contrastive_loss.hpp"
#include "stainaug/manifest.hpp"
#include "stainaug/stats_json.hpp"
#include "stainaug/synth.hpp"

namespace stainaug {

struct RunConfig {
  int workers = 1;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = ".";
  int views_per_patch = 2;

  void validate() const;
};

/// One JSON object per line, e.g.
///   {"level":"warning","event":"patch_skipped","path":"a.png","error":"..."}
/// Safe to call from worker threads.
class EventLog {
 public:
  explicit EventLog(std::ostream& out) : out_(&out) {}
  EventLog() = default;  // discards events

  void emit(std::string_view level, std::string_view event,
            const std::vector<std::pair<std::string, std::string>>& fields = {});
  void warning(std::string_view event, const std::vector<std::pair<std::string, std::string>>& fields) {
    emit("warning", event, fields);
  }
  std::size_t warnings() const noexcept { return warnings_; }

 private:
  std::ostream* out_ = nullptr;
  std::mutex mutex_;
  std::size_t warnings_ = 0;
};

struct BatchSummary {
  std::size_t patches = 0;
  std::size_t failed_patches = 0;
  std::size_t files_written = 0;
  double seconds = 0.0;
  double patches_per_second = 0.0;
};

struct StatsRunResult {
  StatsDocument document;
  BatchSummary summary;
};

/// Groups patches by slide, computes slide statistics and writes the stats
/// JSON to `stats_path`. Unreadable patches and failing slides are logged and
/// skipped; throws AllSlidesFailed when no slide produced statistics.
/// When `histogram_dir` is set, writes `<slide>.csv` alpha/beta histograms there.
StatsRunResult run_stats(const Manifest& manifest, const BasisConfig& cfg, const RunConfig& run,
                         const std::filesystem::path& stats_path, EventLog& log,
                         const std::optional<std::filesystem::path>& histogram_dir = std::nullopt);

/// Output file for view k of a patch: `<output_dir>/<stem>__v<k>.png`.
std::filesystem::path view_path(const RunConfig& run, const ManifestEntry& entry, int view);

/// Writes views_per_patch SRA views per patch plus `augment_log.csv`
/// (patch_path,view_index,coef_h,coef_e,dropped_channel). Throws
/// MissingSlideStats before doing any work if a slide lacks statistics.
BatchSummary run_augment(const Manifest& manifest, const StatsDocument& stats, const SraConfig& cfg,
                         const RunConfig& run, EventLog& log);

/// TSA baseline; log is `tsa_log.csv` (patch_path,view_index,scale_h,bias_h,scale_e,bias_e).
BatchSummary run_tsa(const Manifest& manifest, const StatsDocument& stats, const TsaConfig& cfg,
                     const RunConfig& run, EventLog& log);

struct SeparateOutputs {
  std::filesystem::path h_render;
  std::filesystem::path e_render;
  std::filesystem::path planes;
};

/// Writes `<stem>_H.png`, `<stem>_E.png` and `<stem>_conc.bin` (alpha, beta,
/// gamma planes) into out_dir.
SeparateOutputs run_separate(const std::filesystem::path& image, const StatsDocument& stats,
                             const std::string& slide_id, const std::filesystem::path& out_dir);

struct LossInputs {
  std::filesystem::path q1;  // query encoder, first augmentation
  std::filesystem::path q2;  // query encoder, second augmentation
  std::filesystem::path k1;  // momentum encoder, first augmentation
  std::filesystem::path k2;  // momentum encoder, second augmentation
};

LossReport run_loss(const LossInputs& inputs, double tau, bool include_aug, bool normalize);
std::string loss_report_json(const LossReport& report);

struct SynthCorpusConfig {
  int slides = 2;
  int patches_per_slide = 4;
  int width = 400;
  int height = 400;
  double white_fraction = 0.3;
  /// Per-slide H and E strength multipliers are drawn from these ranges.
  TargetRange h_scale{0.6, 1.4};
  TargetRange e_scale{0.6, 1.4};
  std::uint64_t seed = 0;
};

/// Synthetic slides around the reference basis: H-rich, E-rich and mixed
/// tissue classes with per-slide stain strength.
SynthSpec corpus_patch_spec(const SynthCorpusConfig& cfg, int slide, int patch);

/// Writes PNG patches, `<patch>_truth.bin` ground-truth planes and
/// `manifest.csv` into out_dir. Returns the manifest.
Manifest run_synth(const SynthCorpusConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace stainaug

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

#include "stainaug/pipeline.hpp"

#include <omp.h>

#include <chrono>
#include <fstream>
#include <set>

#include "json.hpp"
#include "stainaug/binary_io.hpp"
#include "stainaug/error.hpp"
#include "stainaug/png_io.hpp"
#include "stainaug/random.hpp"

namespace stainaug {

void RunConfig::validate() const {
  if (workers < 1) throw Error(Errc::InvalidArgument, "workers must be >= 1");
  if (views_per_patch < 1) throw Error(Errc::InvalidArgument, "views_per_patch must be >= 1");
}

void EventLog::emit(std::string_view level, std::string_view event,
                    const std::vector<std::pair<std::string, std::string>>& fields) {
  nlohmann::ordered_json j;
  j["level"] = level;
  j["event"] = event;
  for (const auto& [k, v] : fields) j[k] = v;
  const std::lock_guard lock(mutex_);
  if (level == "warning") ++warnings_;
  if (out_ != nullptr) *out_ << j.dump() << '\n';
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void finish_summary(BatchSummary& s, Clock::time_point start, std::string_view what, EventLog& log) {
  s.seconds = seconds_since(start);
  const std::size_t done = s.patches - s.failed_patches;
  s.patches_per_second = s.seconds > 0.0 ? static_cast<double>(done) / s.seconds : 0.0;
  log.emit("info", "throughput",
           {{"stage", std::string(what)},
            {"patches", std::to_string(done)},
            {"failed", std::to_string(s.failed_patches)},
            {"seconds", format_real(s.seconds)},
            {"patches_per_second", format_real(s.patches_per_second)}});
}

std::string file_safe(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

void write_histogram_csv(const std::filesystem::path& path, const SlideStatsDetail& d) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot create " + path.string());
  out << "bin_lower,bin_upper,alpha_count,beta_count\n";
  const double w = d.alpha.bin_width();
  for (std::size_t b = 0; b < d.alpha.bin_count(); ++b) {
    out << format_real(d.alpha.lower() + static_cast<double>(b) * w) << ','
        << format_real(d.alpha.lower() + static_cast<double>(b + 1) * w) << ','
        << d.alpha.counts()[b] << ',' << d.beta.counts()[b] << '\n';
  }
}

void ensure_dir(const std::filesystem::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<const SlideStainStats*> lookup_stats(const Manifest& manifest, const StatsDocument& stats) {
  std::vector<const SlideStainStats*> per_entry;
  per_entry.reserve(manifest.entries.size());
  for (const ManifestEntry& e : manifest.entries) {
    const SlideStainStats* s = stats.find(e.slide_id);
    if (s == nullptr) {
      throw Error(Errc::MissingSlideStats, "no statistics for slide '" + e.slide_id + "'");
    }
    per_entry.push_back(s);
  }
  return per_entry;
}

void check_unique_outputs(const Manifest& manifest, const RunConfig& run) {
  std::set<std::filesystem::path> seen;
  for (const ManifestEntry& e : manifest.entries) {
    if (!seen.insert(view_path(run, e, 0)).second) {
      throw Error(Errc::InvalidArgument,
                  "two patches map to the same output name: " + view_path(run, e, 0).string());
    }
  }
}

/// Runs `augment_view(image, entry_index, view, row)` for every patch and view
/// on `run.workers` threads, collecting one log row per view in manifest order.
template <typename AugmentView>
BatchSummary run_views(const Manifest& manifest, const RunConfig& run, EventLog& log,
                       const std::string& log_name, const std::string& log_header,
                       std::string_view stage, AugmentView augment_view) {
  const auto start = Clock::now();
  ensure_dir(run.output_dir);
  const std::size_t n = manifest.entries.size();
  std::vector<std::vector<std::string>> rows(n);
  std::vector<std::string> errors(n);
  std::vector<std::size_t> written(n, 0);

  omp_set_num_threads(run.workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(run.workers)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const ManifestEntry& entry = manifest.entries[i];
    try {
      const RgbImage image = read_png(manifest.resolve(entry));
      for (int k = 0; k < run.views_per_patch; ++k) {
        std::string row;
        const RgbImage out = augment_view(image, static_cast<std::size_t>(i), k, row);
        write_png(view_path(run, entry, k), out);
        ++written[i];
        rows[i].push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  BatchSummary summary;
  summary.patches = n;
  std::ofstream csv(run.output_dir / log_name, std::ios::trunc);
  if (!csv) throw Error(Errc::IoError, "cannot create " + (run.output_dir / log_name).string());
  csv << log_header << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    summary.files_written += written[i];
    if (!errors[i].empty()) {
      ++summary.failed_patches;
      log.warning("patch_skipped", {{"path", manifest.entries[i].patch_path}, {"error", errors[i]}});
    }
    for (const std::string& row : rows[i]) csv << row << '\n';
  }
  finish_summary(summary, start, stage, log);
  return summary;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

StatsRunResult run_stats(const Manifest& manifest, const BasisConfig& cfg, const RunConfig& run,
                         const std::filesystem::path& stats_path, EventLog& log,
                         const std::optional<std::filesystem::path>& histogram_dir) {
  run.validate();
  cfg.validate();
  const auto start = Clock::now();
  omp_set_num_threads(run.workers);
  if (histogram_dir) ensure_dir(*histogram_dir);
  ensure_dir(stats_path.parent_path());

  StatsRunResult result;
  result.summary.patches = manifest.entries.size();
  for (const std::string& slide : manifest.slide_ids()) {
    std::vector<const ManifestEntry*> entries;
    for (const ManifestEntry& e : manifest.entries) {
      if (e.slide_id == slide) entries.push_back(&e);
    }
    std::vector<std::vector<OdPixel>> parts(entries.size());
    std::vector<std::string> errors(entries.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(run.workers)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(entries.size()); ++j) {
      try {
        parts[j] = tissue_pixels(read_png(manifest.resolve(*entries[j])), cfg);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
    std::vector<OdPixel> tissue;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (!errors[j].empty()) {
        ++result.summary.failed_patches;
        log.warning("patch_skipped", {{"path", entries[j]->patch_path}, {"error", errors[j]}});
        continue;
      }
      tissue.insert(tissue.end(), parts[j].begin(), parts[j].end());
      std::vector<OdPixel>().swap(parts[j]);
    }
    try {
      const SlideStatsDetail detail = compute_slide_stats_detail(slide, tissue, cfg);
      result.document.slides.push_back(detail.stats);
      if (histogram_dir) {
        write_histogram_csv(*histogram_dir / (file_safe(slide) + ".csv"), detail);
        ++result.summary.files_written;
      }
    } catch (const Error& e) {
      result.document.errors.emplace_back(slide, e.what());
      log.warning("slide_failed", {{"slide_id", slide}, {"error", e.what()}});
    }
  }
  if (result.document.slides.empty()) {
    throw Error(Errc::AllSlidesFailed, "no slide produced statistics");
  }
  write_stats_json(stats_path, result.document);
  ++result.summary.files_written;
  finish_summary(result.summary, start, "estimate", log);
  return result;
}

std::filesystem::path view_path(const RunConfig& run, const ManifestEntry& entry, int view) {
  const std::string stem = std::filesystem::path(entry.patch_path).stem().string();
  return run.output_dir / (stem + "__v" + std::to_string(view) + ".png");
}

BatchSummary run_augment(const Manifest& manifest, const StatsDocument& stats, const SraConfig& cfg,
                         const RunConfig& run, EventLog& log) {
  run.validate();
  cfg.validate();
  const std::vector<const SlideStainStats*> per_entry = lookup_stats(manifest, stats);
  check_unique_outputs(manifest, run);
  return run_views(
      manifest, run, log, "augment_log.csv", "patch_path,view_index,coef_h,coef_e,dropped_channel",
      "augment",
      [&](const RgbImage& image, std::size_t i, int k, std::string& row) {
        const ManifestEntry& entry = manifest.entries[i];
        SraCoefficients coef;
        RgbImage out = sra_augment(image, entry.slide_id, *per_entry[i], cfg,
                                   {run.master_seed, i, static_cast<std::uint32_t>(k)}, &coef);
        row = csv_field(entry.patch_path) + ',' + std::to_string(k) + ',' + format_real(coef.coef_h) +
              ',' + format_real(coef.coef_e) + ',' + std::string(to_string(coef.dropped));
        return out;
      });
}

BatchSummary run_tsa(const Manifest& manifest, const StatsDocument& stats, const TsaConfig& cfg,
                     const RunConfig& run, EventLog& log) {
  run.validate();
  cfg.validate();
  const std::vector<const SlideStainStats*> per_entry = lookup_stats(manifest, stats);
  check_unique_outputs(manifest, run);
  return run_views(
      manifest, run, log, "tsa_log.csv", "patch_path,view_index,scale_h,bias_h,scale_e,bias_e", "tsa",
      [&](const RgbImage& image, std::size_t i, int k, std::string& row) {
        const ManifestEntry& entry = manifest.entries[i];
        TsaDraw draw;
        RgbImage out = tsa_augment(image, entry.slide_id, *per_entry[i], cfg,
                                   {run.master_seed, i, static_cast<std::uint32_t>(k)}, &draw);
        row = csv_field(entry.patch_path) + ',' + std::to_string(k) + ',' + format_real(draw.scale_h) +
              ',' + format_real(draw.bias_h) + ',' + format_real(draw.scale_e) + ',' +
              format_real(draw.bias_e);
        return out;
      });
}

SeparateOutputs run_separate(const std::filesystem::path& image, const StatsDocument& stats,
                             const std::string& slide_id, const std::filesystem::path& out_dir) {
  const SlideStainStats* s = stats.find(slide_id);
  if (s == nullptr) throw Error(Errc::MissingSlideStats, "no statistics for slide '" + slide_id + "'");
  const RgbImage rgb = read_png(image);
  ensure_dir(out_dir);
  const ConcentrationMap map = separate_image(to_od(rgb), s->basis);
  const std::string stem = image.stem().string();
  SeparateOutputs out{out_dir / (stem + "_H.png"), out_dir / (stem + "_E.png"),
                      out_dir / (stem + "_conc.bin")};
  write_png(out.h_render, render_single_stain(map, s->basis, StainChannel::Hematoxylin));
  write_png(out.e_render, render_single_stain(map, s->basis, StainChannel::Eosin));
  write_matrix_planes(out.planes, to_planes(map));
  return out;
}

LossReport run_loss(const LossInputs& inputs, double tau, bool include_aug, bool normalize) {
  auto load = [&](const std::filesystem::path& p) {
    FeatureBatch b = read_features(p);
    return normalize ? l2_normalize(b) : b;
  };
  const FeatureBatch f_b1 = load(inputs.q1);
  const FeatureBatch f_b2 = load(inputs.q2);
  const FeatureBatch f_m1 = load(inputs.k1);
  const FeatureBatch f_m2 = load(inputs.k2);
  return loss_report(f_m1, f_m2, f_b1, f_b2, tau, include_aug);
}

std::string loss_report_json(const LossReport& r) {
  return "{\"cl1\": " + format_real(r.cl1) + ", \"cl2\": " + format_real(r.cl2) +
         ", \"cl3\": " + format_real(r.cl3) + ", \"cl4\": " + format_real(r.cl4) +
         ", \"cl_ori\": " + format_real(r.cl_ori) + ", \"cl_aug\": " + format_real(r.cl_aug) +
         ", \"total\": " + format_real(r.total) + "}";
}

SynthSpec corpus_patch_spec(const SynthCorpusConfig& cfg, int slide, int patch) {
  CounterStream slide_rng(cfg.seed, static_cast<std::uint32_t>(slide), 0, 0x534c4944u);
  const double hs = slide_rng.next_uniform(cfg.h_scale.lo, cfg.h_scale.hi);
  const double es = slide_rng.next_uniform(cfg.e_scale.lo, cfg.e_scale.hi);
  CounterStream patch_rng(cfg.seed, static_cast<std::uint32_t>(slide),
                          static_cast<std::uint32_t>(patch), 0x50415443u);
  SynthSpec spec;
  spec.width = cfg.width;
  spec.height = cfg.height;
  spec.white_fraction = cfg.white_fraction;
  spec.seed = static_cast<std::uint64_t>(patch_rng.next_u32()) << 32 | patch_rng.next_u32();
  using D = ConcentrationDist;
  spec.tissue = {
      {0.40, D::uniform(0.3 * hs, 1.0 * hs), D::uniform(0.0, 0.1 * es)},        // nuclei
      {0.45, D::uniform(0.0, 0.1 * hs), D::uniform(0.3 * es, 1.0 * es)},        // stroma
      {0.15, D::uniform(0.1 * hs, 0.6 * hs), D::uniform(0.1 * es, 0.6 * es)},  // mixed
  };
  return spec;
}

Manifest run_synth(const SynthCorpusConfig& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  Manifest manifest;
  manifest.base_dir = out_dir;
  for (int s = 0; s < cfg.slides; ++s) {
    const std::string slide_id = "slide" + std::to_string(s);
    for (int p = 0; p < cfg.patches_per_slide; ++p) {
      const std::string stem = slide_id + "_patch" + std::to_string(p);
      const SynthPatch patch = generate_patch(corpus_patch_spec(cfg, s, p));
      write_png(out_dir / (stem + ".png"), patch.image);
      write_matrix_planes(out_dir / (stem + "_truth.bin"), to_planes(patch.truth));
      manifest.entries.push_back({stem + ".png", slide_id});
    }
  }
  write_manifest(out_dir / "manifest.csv", manifest);
  return manifest;
}

}  // namespace stainaug

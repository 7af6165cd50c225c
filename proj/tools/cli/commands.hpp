// Copyright 2026 The Pipscreen Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PIPSCREEN_TOOLS_COMMANDS_HPP_
#define PIPSCREEN_TOOLS_COMMANDS_HPP_

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cli/parallel.hpp"
#include "cli/run_log.hpp"
#include "pipscreen/csv.hpp"
#include "pipscreen/dsp/wav.hpp"
#include "pipscreen/enhance/enhance.hpp"
#include "pipscreen/experiment/export.hpp"
#include "pipscreen/experiment/simulate.hpp"
#include "pipscreen/psych/analysis.hpp"
#include "pipscreen/scene/files.hpp"
#include "pipscreen/tonepip/screening.hpp"
#include "pipscreen/tonepip/sequence.hpp"
#include "pipscreen/experiment/server.hpp"

namespace pipscreen::cli {

namespace fs = std::filesystem;

// State shared by every subcommand.
struct Context {
  RunLog log;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;

  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }

  // Writes an output and reads it back; a mismatch is a failed write.
  void write_bytes(const fs::path& path, const std::string& bytes) {
    write_text_file(path, bytes);
    require(read_text_file(path) == bytes, ErrorCode::kIoError,
            "verification of " + path.string() + " failed");
    log.write("output", {{"path", path.string()}, {"bytes", bytes.size()}});
  }

  void write_json(const fs::path& path, const Json& value) {
    write_bytes(path, value.dump(2) + "\n");
  }

  void write_wav(const fs::path& path, const dsp::AudioBuffer& audio, dsp::WavFormat format) {
    const auto bytes = dsp::encode_wav(audio, format);
    write_bytes(path, std::string(bytes.begin(), bytes.end()));
  }
};

// ---------------------------------------------------------------- corpus

struct CorpusOptions {
  fs::path out = "corpus.json";
  int words_per_rank = 400;
  int ranks = 4;
};

inline void run_corpus(const CorpusOptions& o, Context& ctx) {
  const auto corpus = experiment::synthetic_corpus(o.words_per_rank, o.ranks, ctx.seed_or(1));
  ctx.write_json(o.out, experiment::to_json(corpus));
}

inline experiment::Corpus corpus_or_synthetic(const std::optional<fs::path>& path) {
  return path ? experiment::load_corpus(*path) : experiment::synthetic_corpus();
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  fs::path manifest;
  int grid_words = 0;  // > 0 writes a fresh grid manifest first
  std::vector<double> grid_snrs = {scene::kSnrGrid.begin(), scene::kSnrGrid.end()};
  int grid_position = scene::kDefaultPositionId;
  std::optional<fs::path> corpus;
};

inline void write_grid_manifest(const SynthOptions& o, Context& ctx) {
  const auto corpus = corpus_or_synthetic(o.corpus);
  const auto pool = corpus.pool();
  require(static_cast<std::size_t>(o.grid_words) <= pool.size(),
          ErrorCode::kInsufficientCorpus,
          "corpus holds " + std::to_string(pool.size()) + " words, grid needs " +
              std::to_string(o.grid_words));
  std::vector<std::string> words;
  for (int i = 0; i < o.grid_words; ++i) words.push_back(pool[static_cast<std::size_t>(i)]->word_id);
  const auto m = scene::grid_manifest(words, o.grid_snrs, o.grid_position, ctx.seed_or(1));
  ctx.write_json(o.manifest, scene::to_json(m));
}

inline void run_synth(const SynthOptions& o, Context& ctx) {
  if (o.grid_words > 0) write_grid_manifest(o, ctx);
  const auto m = scene::load_manifest(o.manifest);
  const auto babble = scene::manifest_babble(m);
  parallel_for(m.scenes.size(), ctx.jobs, [&](std::size_t i) {
    const auto& e = m.scenes[i];
    const auto obs = scene::synthesize_entry(m, e, babble);
    ctx.write_wav(m.resolve(e.mixture), obs.mixture, dsp::WavFormat::kFloat32);
    ctx.write_wav(m.resolve(e.speech), obs.speech_image, dsp::WavFormat::kFloat32);
    ctx.write_wav(m.resolve(e.noise), obs.noise_image, dsp::WavFormat::kFloat32);
    ctx.write_json(scene::scene_sidecar_path(m, e),
                   {{"word_id", e.word_id},
                    {"snr_db", e.snr_db},
                    {"measured_snr_db", scene::measured_snr_db(obs)},
                    {"seed", e.seed},
                    {"span_begin", obs.span.begin},
                    {"span_end", obs.span.end}});
  });
  ctx.log.write("synth", {{"scenes", m.scenes.size()}});
}

// ---------------------------------------------------------------- enhance

struct EnhanceCmdOptions {
  fs::path manifest;
  fs::path out_dir = "enhanced";
  std::string method = "all";
};

inline std::vector<enhance::EnhancementMethod> selected_methods(const std::string& name) {
  if (name == "all") return {enhance::kAllMethods.begin(), enhance::kAllMethods.end()};
  return {enhance::parse_method(name)};
}

inline void run_enhance(const EnhanceCmdOptions& o, Context& ctx) {
  const auto m = scene::load_manifest(o.manifest);
  const auto methods = selected_methods(o.method);
  const std::size_t n = m.scenes.size() * methods.size();
  std::vector<std::vector<std::string>> rows(n);
  parallel_for(m.scenes.size(), ctx.jobs, [&](std::size_t i) {
    const auto& e = m.scenes[i];
    const auto obs = scene::load_scene(m, e);
    const std::string stem = fs::path(e.mixture).stem().string();
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const auto result = enhance::enhance_components(obs, methods[k]);
      const fs::path dir = o.out_dir / std::string(enhance::to_string(methods[k]));
      ctx.write_wav(dir / (stem + ".wav"), result.output, dsp::WavFormat::kFloat32);
      ctx.write_json(dir / (stem + ".json"), enhance::sidecar_json(result, e.word_id));
      rows[i * methods.size() + k] = {e.word_id, csv::format_double(e.snr_db),
                                      std::string(enhance::to_string(methods[k])),
                                      csv::format_double(result.input_snr_db),
                                      csv::format_double(result.output_snr_db)};
    }
  });
  csv::Writer table({"word_id", "snr_db", "method", "input_snr_db", "oracle_output_snr_db"});
  for (const auto& r : rows) table.row(r);
  ctx.write_bytes(o.out_dir / "oracle_snr.csv", table.str());
}

// ---------------------------------------------------------------- tonepip

struct TonePipCmdOptions {
  fs::path out_dir = "tonepip";
  std::vector<int> frequencies = {tonepip::kPresetFrequencies.begin(),
                                  tonepip::kPresetFrequencies.end()};
  double ref_dbfs = -20.0;
  int n_pips = tonepip::kDefaultPipCount;
  double step_db = tonepip::kDefaultStepDb;
  double sample_rate = 48000.0;
};

inline void run_tonepip(const TonePipCmdOptions& o, Context& ctx) {
  for (int f : o.frequencies) {
    tonepip::TonePipSequenceSpec spec;
    spec.frequency_hz = f;
    spec.ref_level_dbfs = o.ref_dbfs;
    spec.n_pips = o.n_pips;
    spec.step_db = o.step_db;
    const auto seq = tonepip::gen_tonepip_sequence(spec, o.sample_rate);
    const std::string stem = "tonepip_" + std::to_string(f);
    ctx.write_wav(o.out_dir / (stem + ".wav"), seq.audio, dsp::WavFormat::kFloat32);
    Json pips = Json::array();
    for (const auto& p : seq.pips) {
      pips.push_back({{"start", p.start}, {"length", p.length}, {"level_dbfs", p.level_dbfs}});
    }
    ctx.write_json(o.out_dir / (stem + ".json"),
                   {{"frequency_hz", f},
                    {"sample_rate", o.sample_rate},
                    {"step_db", o.step_db},
                    {"ansi_reference_threshold_db", tonepip::ansi_reference_threshold(f)},
                    {"reference",
                     {{"start", seq.reference.start},
                      {"length", seq.reference.length},
                      {"level_dbfs", seq.reference.level_dbfs}}},
                    {"pips", pips}});
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::optional<fs::path> cohort;
  fs::path out_dir = "bundle";
  std::optional<fs::path> data_dir;
  std::optional<fs::path> corpus;
  std::optional<int> listeners;
  std::optional<int> in_range;
};

inline experiment::CohortSpec load_cohort_spec(const SimulateOptions& o, const Context& ctx) {
  experiment::CohortSpec spec;
  if (o.cohort) spec = experiment::cohort_spec_from_json(read_json_file(*o.cohort));
  if (o.listeners) spec.n_listeners = *o.listeners;
  if (o.in_range) spec.n_in_range = *o.in_range;
  if (ctx.seed) spec.seed = *ctx.seed;
  spec.validate();
  return spec;
}

inline void run_simulate(const SimulateOptions& o, Context& ctx) {
  const auto spec = load_cohort_spec(o, ctx);
  const auto cohort = experiment::make_cohort(spec);
  experiment::SessionStore store(corpus_or_synthetic(o.corpus), o.data_dir);
  experiment::simulate_cohort(store, spec, cohort);
  const auto bundle = experiment::export_sessions(store.snapshot(), false);
  for (const auto& [name, text] : bundle) ctx.write_bytes(o.out_dir / name, text);

  Json listeners = Json::array();
  for (const auto& l : cohort) {
    listeners.push_back({{"participant_id", l.participant_id},
                         {"designed_pips", l.designed_pips},
                         {"designed_in_range", l.designed_in_range}});
  }
  ctx.write_json(o.out_dir / "cohort.json",
                 {{"spec", experiment::to_json(spec)}, {"listeners", listeners}});
  ctx.log.write("simulate", {{"listeners", cohort.size()}, {"designed_in_range", spec.n_in_range}});
}

// ---------------------------------------------------------------- screen

// Bundle errors name a file inside the bundle; prefix the bundle directory
// so the location is complete.
inline std::vector<ParticipantRecord> load_bundle_records(const fs::path& dir) {
  const auto bundle = experiment::read_bundle(dir);
  try {
    return experiment::load_records(bundle);
  } catch (const Error& e) {
    fail(e.code(), (dir / e.what()).string());
  }
}

struct ScreeningCmdOptions {
  double min_pips = 9.0;
  double max_pips = 13.0;
  std::vector<std::string> exclude;
  bool mad = false;
  double mad_k = 3.0;

  tonepip::ScreeningRule rule() const {
    tonepip::ScreeningRule r;
    r.min_mean_pips = min_pips;
    r.max_mean_pips = max_pips;
    r.outlier.manual_exclusions.insert(exclude.begin(), exclude.end());
    r.outlier.mad_rule = mad;
    r.outlier.mad_k = mad_k;
    return r;
  }
};

struct ScreenOptions {
  fs::path bundle;
  fs::path out_dir = "screening";
  ScreeningCmdOptions screening;
};

inline void write_screening(const tonepip::ScreeningOutcome& outcome, const fs::path& dir,
                            Context& ctx) {
  ctx.write_json(dir / "screening.json", tonepip::screening_report_json(outcome));
  ctx.write_bytes(dir / "screening.csv", tonepip::screening_report_csv(outcome));
  ctx.log.write("screen", {{"kept", outcome.kept.size()}, {"rejected", outcome.rejected.size()}});
}

inline void run_screen(const ScreenOptions& o, Context& ctx) {
  const auto records = load_bundle_records(o.bundle);
  psych::AnalysisOptions opts;
  opts.screening = o.screening.rule();
  tonepip::ScreeningOutcome outcome;
  if (o.screening.mad) {
    // The outlier rule needs each participant's SRT, so fit first.
    outcome = *psych::analyze(records, opts).screening;
  } else {
    outcome = tonepip::screen_participants(records, opts.screening);
  }
  write_screening(outcome, o.out_dir, ctx);
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  fs::path bundle;
  fs::path out_dir = "analysis";
  bool no_screen = false;
  ScreeningCmdOptions screening;
  int bootstrap = 0;
  double ci_level = 0.95;
  bool include_practice = false;
};

inline void run_analyze(const AnalyzeOptions& o, Context& ctx) {
  const auto records = load_bundle_records(o.bundle);
  psych::AnalysisOptions opts;
  opts.screen = !o.no_screen;
  opts.screening = o.screening.rule();
  opts.fit.bootstrap_resamples = o.bootstrap;
  opts.fit.ci_level = o.ci_level;
  opts.fit.bootstrap_seed = ctx.seed_or(1);
  opts.tally.include_practice = o.include_practice;
  const auto result = psych::analyze(records, opts);
  ctx.write_bytes(o.out_dir / "results.csv", psych::results_csv(result.participants));
  ctx.write_bytes(o.out_dir / "fits.csv", psych::fits_csv(result.participants));
  ctx.write_bytes(o.out_dir / "summary.csv", psych::summary_csv(result.summary));
  ctx.write_json(o.out_dir / "plot_data.json", psych::plot_data_json(result));
  if (result.screening) write_screening(*result.screening, o.out_dir, ctx);
  ctx.log.write("analyze", {{"participants", result.participants.size()},
                            {"analyzed", result.analyzed.size()},
                            {"conditions", result.summary.size()}});
}

// ---------------------------------------------------------------- serve

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  fs::path data_dir = "data";
  std::optional<fs::path> corpus;
  double babble_seconds = 30.0;
  int words_per_cell = 20;
  int practice_words = 10;
};

inline std::atomic<bool>& stop_requested() {
  static std::atomic<bool> flag{false};
  return flag;
}

inline void run_serve(const ServeOptions& o, Context& ctx) {
  auto corpus = corpus_or_synthetic(o.corpus);
  experiment::StoreOptions store_opts;
  store_opts.plan.words_per_cell = o.words_per_cell;
  store_opts.plan.practice_size = o.practice_words;
  experiment::SessionStore store(corpus, o.data_dir, store_opts);
  experiment::RendererOptions render_opts;
  render_opts.babble_duration = o.babble_seconds;
  render_opts.babble_seed = ctx.seed_or(render_opts.babble_seed);
  auto renderer = std::make_shared<const experiment::StimulusRenderer>(store.corpus(), render_opts);
  experiment::ExperimentServer server(store, renderer, {o.host, o.port, -20.0});
  const int port = server.start();
  ctx.log.write("serve", {{"host", o.host},
                          {"port", port},
                          {"data_dir", o.data_dir.string()},
                          {"sessions", store.ids().size()}});
  std::signal(SIGINT, [](int) { stop_requested().store(true); });
  std::signal(SIGTERM, [](int) { stop_requested().store(true); });
  while (!stop_requested().load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  ctx.log.write("stopped");
}

}  // namespace pipscreen::cli

#endif  // PIPSCREEN_TOOLS_COMMANDS_HPP_

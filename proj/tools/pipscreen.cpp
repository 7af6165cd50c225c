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

// Command-line front end of the pipscreen library. Each subcommand wraps one
// library stage and writes its outputs as plain files.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/json_config.hpp"

namespace {

using namespace pipscreen::cli;

void add_screening_flags(CLI::App* cmd, ScreeningCmdOptions& s) {
  cmd->add_option("--min-pips", s.min_pips, "Lowest kept mean pip count")->capture_default_str();
  cmd->add_option("--max-pips", s.max_pips, "Highest kept mean pip count")->capture_default_str();
  cmd->add_option("--exclude", s.exclude, "Participant ids excluded as SRT outliers");
  cmd->add_flag("--mad", s.mad, "Reject SRTs farther than mad-k MADs from the median");
  cmd->add_option("--mad-k", s.mad_k, "MAD multiplier")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech-in-noise listening test toolkit", "pipscreen"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Context ctx;
  std::uint64_t seed = 0;
  std::string log_path;
  unsigned jobs = 1;
  auto* seed_opt = app.add_option("--seed", seed, "Global seed");
  app.add_option("--log", log_path, "NDJSON run log file (stderr when absent)");
  app.add_option("--jobs", jobs, "Worker threads for per-utterance work")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  CorpusOptions corpus_o;
  auto* corpus = app.add_subcommand("corpus", "Write a synthetic word corpus");
  corpus->add_option("--out", corpus_o.out, "Output JSON")->capture_default_str();
  corpus->add_option("--words-per-rank", corpus_o.words_per_rank)->capture_default_str();
  corpus->add_option("--ranks", corpus_o.ranks, "Familiarity ranks")->capture_default_str();

  SynthOptions synth_o;
  auto* synth = app.add_subcommand("synth", "Render the scenes of a manifest");
  synth->add_option("--manifest", synth_o.manifest, "Scene manifest JSON")->required();
  synth->add_option("--grid-words", synth_o.grid_words,
                    "Write a grid manifest over this many corpus words first");
  synth->add_option("--grid-snrs", synth_o.grid_snrs, "Grid SNRs in dB")->delimiter(',');
  synth->add_option("--grid-position", synth_o.grid_position, "Preset source position")
      ->capture_default_str();
  synth->add_option("--corpus", synth_o.corpus, "Corpus JSON for grid words");

  EnhanceCmdOptions enhance_o;
  auto* enh = app.add_subcommand("enhance", "Enhance the scenes of a manifest");
  enh->add_option("--manifest", enhance_o.manifest, "Scene manifest JSON")->required();
  enh->add_option("--out-dir", enhance_o.out_dir)->capture_default_str();
  enh->add_option("--method", enhance_o.method,
                  "unprocessed, mask1ch_irm, mvdr2ch_irm, mvdr2ch_est or all")
      ->capture_default_str();

  TonePipCmdOptions tone_o;
  auto* tone = app.add_subcommand("tonepip", "Write tone-pip stimulus sequences");
  tone->add_option("--out-dir", tone_o.out_dir)->capture_default_str();
  tone->add_option("--frequencies", tone_o.frequencies)->delimiter(',');
  tone->add_option("--ref-dbfs", tone_o.ref_dbfs, "Reference tone level")->capture_default_str();
  tone->add_option("--pips", tone_o.n_pips)->capture_default_str();
  tone->add_option("--step-db", tone_o.step_db)->capture_default_str();
  tone->add_option("--sample-rate", tone_o.sample_rate)->capture_default_str();

  SimulateOptions sim_o;
  auto* sim = app.add_subcommand("simulate", "Run a simulated cohort and export its results");
  sim->add_option("--cohort", sim_o.cohort, "Cohort spec JSON");
  sim->add_option("--out-dir", sim_o.out_dir, "Export bundle directory")->capture_default_str();
  sim->add_option("--data-dir", sim_o.data_dir, "Persist session logs here");
  sim->add_option("--corpus", sim_o.corpus, "Corpus JSON");
  sim->add_option("--listeners", sim_o.listeners, "Override the cohort size");
  sim->add_option("--in-range", sim_o.in_range, "Override the designed in-range count");

  ScreenOptions screen_o;
  auto* screen = app.add_subcommand("screen", "Screen participants of an export bundle");
  screen->add_option("--bundle", screen_o.bundle, "Export bundle directory")->required();
  screen->add_option("--out-dir", screen_o.out_dir)->capture_default_str();
  add_screening_flags(screen, screen_o.screening);

  AnalyzeOptions analyze_o;
  auto* analyze = app.add_subcommand("analyze", "Fit, screen and summarize an export bundle");
  analyze->add_option("--bundle", analyze_o.bundle, "Export bundle directory")->required();
  analyze->add_option("--out-dir", analyze_o.out_dir)->capture_default_str();
  analyze->add_flag("--no-screen", analyze_o.no_screen, "Summarize every participant");
  analyze->add_option("--bootstrap", analyze_o.bootstrap, "Bootstrap resamples for the SRT CI");
  analyze->add_option("--ci-level", analyze_o.ci_level)->capture_default_str();
  analyze->add_flag("--include-practice", analyze_o.include_practice);
  add_screening_flags(analyze, analyze_o.screening);

  ServeOptions serve_o;
  auto* serve = app.add_subcommand("serve", "Run the experiment HTTP service");
  serve->add_option("--host", serve_o.host)->capture_default_str();
  serve->add_option("--port", serve_o.port, "0 picks a free port")->capture_default_str();
  serve->add_option("--data-dir", serve_o.data_dir, "Session storage")
      ->envname("PIPSCREEN_DATA_DIR")
      ->capture_default_str();
  serve->add_option("--corpus", serve_o.corpus, "Corpus JSON");
  serve->add_option("--babble-seconds", serve_o.babble_seconds)->capture_default_str();
  serve->add_option("--words-per-cell", serve_o.words_per_cell)->capture_default_str();
  serve->add_option("--practice-words", serve_o.practice_words)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (!log_path.empty()) ctx.log.open(log_path);
    if (seed_opt->count() > 0) ctx.seed = seed;
    ctx.jobs = jobs;
    ctx.log.write("start", {{"command", command}, {"jobs", jobs}});
    if (command == "corpus") run_corpus(corpus_o, ctx);
    else if (command == "synth") run_synth(synth_o, ctx);
    else if (command == "enhance") run_enhance(enhance_o, ctx);
    else if (command == "tonepip") run_tonepip(tone_o, ctx);
    else if (command == "simulate") run_simulate(sim_o, ctx);
    else if (command == "screen") run_screen(screen_o, ctx);
    else if (command == "analyze") run_analyze(analyze_o, ctx);
    else if (command == "serve") run_serve(serve_o, ctx);
    ctx.log.write("done", {{"command", command}, {"status", 0}});
    return EXIT_SUCCESS;
  } catch (const pipscreen::Error& e) {
    const std::string name(pipscreen::error_name(e.code()));
    ctx.log.write("error", {{"command", command},
                            {"code", static_cast<int>(e.code())},
                            {"name", name},
                            {"message", e.what()}});
    std::cerr << "pipscreen " << command << ": " << name << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    ctx.log.write("error", {{"command", command}, {"message", e.what()}});
    std::cerr << "pipscreen " << command << ": " << e.what() << "\n";
  }
  return EXIT_FAILURE;
}

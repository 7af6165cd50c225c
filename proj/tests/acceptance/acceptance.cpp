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

// Acceptance suite: one PASS/FAIL line per criterion, with every tolerance
// and time budget pinned below. Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "pipscreen/dsp/stft.hpp"
#include "pipscreen/enhance/beamformer.hpp"
#include "pipscreen/enhance/enhance.hpp"
#include "pipscreen/experiment/export.hpp"
#include "pipscreen/experiment/plan.hpp"
#include "pipscreen/experiment/simulate.hpp"
#include "pipscreen/psych/analysis.hpp"
#include "pipscreen/psych/fit.hpp"
#include "pipscreen/scene/files.hpp"
#include "pipscreen/tonepip/levels.hpp"
#include "pipscreen/tonepip/screening.hpp"

namespace {

using namespace pipscreen;
using enhance::EnhancementMethod;

// ---- pinned tolerances and budgets
constexpr double kStftRelTol = 1e-6;
constexpr double kDistortionlessRelTol = 1e-10;
constexpr double kScaleInvarianceRelTol = 1e-12;
constexpr double kRecoveryMedianTolDb = 0.8;
constexpr int kOrderingMinRuns = 95;
// Mean component-wise SNR gain of mask1ch_irm at -9 dB over the 50 scenes
// below, computed once from this implementation and frozen.
constexpr double kPinnedIrmGainAtMinus9Db = 13.633606854;
constexpr double kPinnedIrmGainTolDb = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, double budget_s, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = elapsed < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %s: %s; %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", name.c_str(),
              o.detail.c_str(), elapsed, budget_s, in_time ? "" : " over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- tone-pip level and threshold arithmetic
Outcome tonepip_levels() {
  bool ok = true;
  const auto l_lis = tonepip::listening_level(13);
  ok = ok && l_lis && *l_lis == 60.0;
  ok = ok && l_lis && tonepip::threshold_spl(64.0, *l_lis) == 4.0;
  const std::map<int, double> quoted = {{500, 13.5}, {1000, 7.5}, {2000, 9.0}, {4000, 12.0}};
  int matched = 0;
  for (const auto& [f, v] : quoted) matched += tonepip::ansi_reference_threshold(f) == v;
  ok = ok && matched == static_cast<int>(quoted.size());
  for (int n = 1; n <= 15; ++n) ok = ok && *tonepip::listening_level(n) == 5.0 * (n - 1);
  ok = ok && !tonepip::listening_level(0).has_value();
  return {ok, "N=13, L_ref=64 gives L_lis=" + fmt("%g", l_lis.value_or(NAN)) + " and threshold " +
                  fmt("%g", l_lis ? tonepip::threshold_spl(64.0, *l_lis) : NAN) +
                  " dB SPL; ANSI values matched " + std::to_string(matched) + "/" +
                  std::to_string(quoted.size()) + " quoted entries"};
}

// ---- screening of a 39-record cohort
Outcome screening() {
  const auto records = testing::screening_cohort(2026);
  const auto outcome = tonepip::screen_participants(records, {});
  int wrong_reasons = 0;
  for (const auto& r : records) {
    int sum = 0;
    for (const auto& t : r.tonepip) sum += t.n_pip;
    std::optional<tonepip::RejectReason> expected;
    if (sum < 36) expected = tonepip::RejectReason::kTooFewPips;
    if (sum > 52) expected = tonepip::RejectReason::kTooManyPips;
    const auto it = std::find_if(outcome.decisions.begin(), outcome.decisions.end(),
                                 [&](const auto& d) { return d.participant_id == r.participant_id; });
    if (it == outcome.decisions.end() || it->reason != expected) ++wrong_reasons;
  }
  const bool ok = records.size() == 39 && outcome.kept.size() == 25 &&
                  outcome.rejected.size() == 14 && wrong_reasons == 0;
  return {ok, "kept " + std::to_string(outcome.kept.size()) + ", rejected " +
                  std::to_string(outcome.rejected.size()) + ", wrong reasons " +
                  std::to_string(wrong_reasons)};
}

// ---- STFT analysis/synthesis round trip
Outcome stft_round_trip() {
  const double rate = 16000.0;
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    std::mt19937_64 rng(1000 + s);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(rate));
    for (double& v : x) v = g(rng);
    const auto y = dsp::istft(dsp::stft(x, rate, {}));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = y.channel(0)[i] - x[i];
      num += d * d;
      den += x[i] * x[i];
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {worst < kStftRelTol, "worst relative RMS error " + fmt("%.3g", worst) + " over 100 signals"};
}

// ---- MVDR distortionless response and steering-scale invariance
Outcome mvdr() {
  using enhance::Matrix2c;
  using enhance::Vector2c;
  using C = std::complex<double>;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto cg = [&] { return C(g(rng), g(rng)); };
  double worst_dist = 0.0, worst_scale = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Matrix2c b;
    b << cg(), cg(), cg(), cg();
    const Matrix2c r_v = b * b.adjoint() + 1e-3 * Matrix2c::Identity();
    const Vector2c a(cg(), cg());
    enhance::ScmBank bank;
    bank.speech = {Matrix2c::Zero()};
    bank.noise = {r_v};
    const auto bf = enhance::mvdr_weights({a}, bank, 0);
    const C response = bf.weights[0].dot(a);
    worst_dist = std::max(worst_dist, std::abs(response - a(0)) / std::abs(a(0)));
    const C alpha = cg();
    const auto scaled = enhance::mvdr_weights({alpha * a}, bank, 0);
    worst_scale = std::max(worst_scale,
                           (scaled.weights[0] - bf.weights[0]).norm() / bf.weights[0].norm());
  }
  return {worst_dist < kDistortionlessRelTol && worst_scale < kScaleInvarianceRelTol,
          "worst |w^H a - a_r|/|a_r| " + fmt("%.3g", worst_dist) + ", worst scaling change " +
              fmt("%.3g", worst_scale) + " over 1000 cases"};
}

// ---- oracle SNR gain of the single-channel IRM
Outcome irm_gain() {
  const auto corpus = experiment::synthetic_corpus();
  const auto pool = corpus.pool();
  std::vector<std::string> words;
  for (std::size_t i = 0; i < 50; ++i) words.push_back(pool[i]->word_id);
  const std::vector<double> snrs(scene::kSnrGrid.begin(), scene::kSnrGrid.end());
  const auto m = scene::grid_manifest(words, snrs, scene::kDefaultPositionId, 1);
  const auto babble = scene::manifest_babble(m);
  int non_positive = 0;
  std::map<double, double> gain_sum;
  std::map<double, int> count;
  for (const auto& e : m.scenes) {
    const auto obs = scene::synthesize_entry(m, e, babble);
    const auto r = enhance::enhance_components(obs, EnhancementMethod::kMask1chIrm);
    const double gain = r.output_snr_db - r.input_snr_db;
    if (!(gain > 0.0)) ++non_positive;
    gain_sum[e.snr_db] += gain;
    ++count[e.snr_db];
  }
  std::string detail = "scenes " + std::to_string(m.scenes.size()) + ", non-positive gains " +
                       std::to_string(non_positive) + "; mean gain by SNR:";
  for (const auto& [snr, sum] : gain_sum) {
    detail += " " + fmt("%+g", snr) + "->" + fmt("%.9f", sum / count[snr]);
  }
  const double at_m9 = gain_sum[-9.0] / count[-9.0];
  detail += "; pinned " + fmt("%.9f", kPinnedIrmGainAtMinus9Db);
  const bool ok = non_positive == 0 && m.scenes.size() == 250 &&
                  std::abs(at_m9 - kPinnedIrmGainAtMinus9Db) <= kPinnedIrmGainTolDb;
  return {ok, detail};
}

// ---- psychometric recovery at 20 trials per SNR
Outcome psychometric_recovery() {
  constexpr double kMu = -6.0, kSigma = 2.0;
  std::vector<double> errors;
  int not_converged = 0;
  for (int s = 0; s < 200; ++s) {
    std::mt19937_64 rng(5000 + s);
    std::vector<psych::ConditionCell> cells;
    for (double snr : scene::kSnrGrid) {
      std::binomial_distribution<int> draw(20, psych::normal_cdf((snr - kMu) / kSigma));
      cells.push_back({EnhancementMethod::kUnprocessed, snr, 20, draw(rng)});
    }
    const auto fit = psych::fit_psychometric(cells);
    if (!fit.converged) {
      ++not_converged;
      errors.push_back(INFINITY);
      continue;
    }
    errors.push_back(std::abs(psych::srt(fit) - kMu));
  }
  std::sort(errors.begin(), errors.end());
  const double median = 0.5 * (errors[99] + errors[100]);
  return {median < kRecoveryMedianTolDb,
          "median |mu_hat - mu| " + fmt("%.4f", median) + " dB over 200 seeds (tolerance " +
              fmt("%.1f", kRecoveryMedianTolDb) + "), non-converged " +
              std::to_string(not_converged)};
}

// ---- end-to-end simulated experiment
Outcome end_to_end() {
  const auto corpus = experiment::synthetic_corpus();
  int recovered = 0, kept_25 = 0;
  for (int run = 0; run < 100; ++run) {
    experiment::CohortSpec spec;
    spec.seed = 100 + static_cast<std::uint64_t>(run);
    const auto cohort = experiment::make_cohort(spec);
    experiment::SessionStore store(corpus, std::nullopt);
    experiment::simulate_cohort(store, spec, cohort);
    const auto bundle = experiment::export_sessions(store.snapshot(), false);
    const auto records = experiment::load_records(bundle);
    const auto result = psych::analyze(records);
    if (result.screening && result.screening->kept.size() == 25) ++kept_25;
    if (result.summary.size() == 4 && experiment::ordering_recovered(result.summary)) ++recovered;
  }
  return {recovered >= kOrderingMinRuns,
          "ordering recovered in " + std::to_string(recovered) + "/100 runs (needs " +
              std::to_string(kOrderingMinRuns) + "); screening kept 25 in " +
              std::to_string(kept_25) + "/100"};
}

// ---- session-plan balance
Outcome plan_balance() {
  const auto corpus = experiment::synthetic_corpus();
  int bad = 0;
  for (int s = 0; s < 100; ++s) {
    const auto plan = experiment::create_session(corpus, "P" + std::to_string(s), 900 + s);
    std::map<std::pair<EnhancementMethod, double>, int> cells;
    std::set<std::string> words;
    for (const auto& st : plan.main) {
      ++cells[{st.method, st.snr_db}];
      words.insert(st.word_id);
    }
    for (const auto& st : plan.practice) words.insert(st.word_id);
    bool ok = cells.size() == 20 && plan.main.size() == 400 && plan.block_count(false) == 40 &&
              plan.options.block_size == 10 &&
              words.size() == plan.main.size() + plan.practice.size();
    for (const auto& [cell, n] : cells) ok = ok && n == 20;
    bad += !ok;
  }
  return {bad == 0, std::to_string(100 - bad) + "/100 plans balanced (20 cells x 20 stimuli, "
                                                "40 blocks of 10, no word reuse)"};
}

}  // namespace

int main() {
  report("tone-pip listening level, threshold and ANSI values", 1, tonepip_levels);
  report("screening keeps 25 and rejects 14 of 39 with reasons", 1, screening);
  report("STFT round trip below 1e-6 relative RMS error", 10, stft_round_trip);
  report("MVDR distortionless and invariant to steering scale", 10, mvdr);
  report("IRM oracle SNR gain positive at every scene", 300, irm_gain);
  report("psychometric recovery median below 0.8 dB", 60, psychometric_recovery);
  report("end-to-end ordering recovered in at least 95 of 100 runs", 600, end_to_end);
  report("session plans balanced over 100 seeds", 10, plan_balance);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

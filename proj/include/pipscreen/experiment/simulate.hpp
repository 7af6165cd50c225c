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

#ifndef PIPSCREEN_EXPERIMENT_SIMULATE_HPP_
#define PIPSCREEN_EXPERIMENT_SIMULATE_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pipscreen/enhance/method.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/experiment/session.hpp"
#include "pipscreen/experiment/store.hpp"
#include "pipscreen/psych/normalize.hpp"
#include "pipscreen/psych/simulate.hpp"
#include "pipscreen/psych/summary.hpp"
#include "pipscreen/tonepip/levels.hpp"
#include "pipscreen/tonepip/sequence.hpp"

namespace pipscreen::experiment {

using enhance::EnhancementMethod;

struct CohortSpec {
  int n_listeners = 39;
  int n_in_range = 25;  // designed mean pip count inside [9, 13]
  std::map<EnhancementMethod, double> true_mu = {{EnhancementMethod::kUnprocessed, -2.0},
                                                 {EnhancementMethod::kMask1chIrm, -8.0},
                                                 {EnhancementMethod::kMvdr2chIrm, -5.0},
                                                 {EnhancementMethod::kMvdr2chEst, -5.0}};
  double true_sigma = 2.0;
  double listener_sd = 1.0;         // per-listener shift shared by all conditions
  double low_level_penalty = 4.0;   // extra SRT for listeners below the pip range
  double presentation_level_db = 64.0;
  std::uint64_t seed = 1;

  void validate() const {
    require(n_listeners > 0 && n_in_range >= 0 && n_in_range <= n_listeners,
            ErrorCode::kInvalidArgument, "invalid cohort sizes");
    require(true_sigma > 0.0 && listener_sd >= 0.0, ErrorCode::kInvalidArgument,
            "invalid cohort spreads");
    for (auto m : enhance::kAllMethods) {
      require(true_mu.count(m) == 1, ErrorCode::kInvalidArgument,
              "cohort spec lacks a true mu for " + std::string(enhance::to_string(m)));
    }
  }
};

struct SimulatedListener {
  std::string participant_id;
  psych::ListenerProfile profile;
  std::vector<int> designed_pips;  // per preset frequency
  bool designed_in_range = false;
};

inline Json to_json(const CohortSpec& spec) {
  Json mu = Json::object();
  for (const auto& [m, v] : spec.true_mu) mu[std::string(enhance::to_string(m))] = v;
  return {{"n_listeners", spec.n_listeners},
          {"n_in_range", spec.n_in_range},
          {"true_mu", mu},
          {"true_sigma", spec.true_sigma},
          {"listener_sd", spec.listener_sd},
          {"low_level_penalty", spec.low_level_penalty},
          {"presentation_level_db", spec.presentation_level_db},
          {"seed", spec.seed}};
}

inline CohortSpec cohort_spec_from_json(const Json& j, CohortSpec spec = {}) {
  spec.n_listeners = json_get_or<int>(j, "n_listeners", spec.n_listeners, "cohort");
  spec.n_in_range = json_get_or<int>(j, "n_in_range", spec.n_in_range, "cohort");
  if (j.contains("true_mu")) {
    for (const auto& [k, v] : json_get<Json>(j, "true_mu", "cohort").items()) {
      require(v.is_number(), ErrorCode::kParseError, "cohort.true_mu." + k + " must be a number");
      spec.true_mu[enhance::parse_method(k)] = v.get<double>();
    }
  }
  spec.true_sigma = json_get_or<double>(j, "true_sigma", spec.true_sigma, "cohort");
  spec.listener_sd = json_get_or<double>(j, "listener_sd", spec.listener_sd, "cohort");
  spec.low_level_penalty =
      json_get_or<double>(j, "low_level_penalty", spec.low_level_penalty, "cohort");
  spec.presentation_level_db =
      json_get_or<double>(j, "presentation_level_db", spec.presentation_level_db, "cohort");
  spec.seed = json_get_or<std::uint64_t>(j, "seed", spec.seed, "cohort");
  spec.validate();
  return spec;
}

namespace detail {

// Four pip counts (0..15) whose sum lies in [lo, hi].
inline std::vector<int> pip_counts(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> pick(0, tonepip::kDefaultPipCount);
  for (;;) {
    std::vector<int> c(tonepip::kPresetFrequencies.size());
    int sum = 0;
    for (auto& v : c) sum += (v = pick(rng));
    if (sum >= lo && sum <= hi) return c;
  }
}

}  // namespace detail

// Builds the cohort. In-range listeners get pip sums in [36, 52] (mean 9 to
// 13); the rest are split between too few (sum <= 35) and too many (>= 53).
// Hearing thresholds are placed so that the designed counts are reproduced
// exactly by the tone-pip listener model.
inline std::vector<SimulatedListener> make_cohort(const CohortSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> shift(0.0, spec.listener_sd);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  const int n_out = spec.n_listeners - spec.n_in_range;
  std::vector<SimulatedListener> out;
  for (int i = 0; i < spec.n_listeners; ++i) {
    SimulatedListener l;
    char id[16];
    std::snprintf(id, sizeof(id), "S%03d", i + 1);
    l.participant_id = id;
    bool low = false;
    if (i < spec.n_in_range) {
      l.designed_pips = detail::pip_counts(rng, 36, 52);
      l.designed_in_range = true;
    } else if (i - spec.n_in_range < (n_out + 1) / 2) {
      l.designed_pips = detail::pip_counts(rng, 0, 35);
      low = true;
    } else {
      l.designed_pips = detail::pip_counts(rng, 53, 60);
    }
    for (std::size_t k = 0; k < tonepip::kPresetFrequencies.size(); ++k) {
      const int f = tonepip::kPresetFrequencies[k];
      const double threshold = spec.presentation_level_db -
                               tonepip::kDefaultStepDb * (l.designed_pips[k] - 1) -
                               tonepip::kDefaultStepDb * frac(rng) * 0.999;
      l.profile.threshold_offset_db[f] = threshold - tonepip::ansi_reference_threshold(f);
    }
    const double s = shift(rng);
    for (const auto& [m, mu] : spec.true_mu) {
      l.profile.true_mu[m] = mu + s + (low ? spec.low_level_penalty : 0.0);
    }
    l.profile.true_sigma = spec.true_sigma;
    l.profile.seed = rng();
    out.push_back(std::move(l));
  }
  return out;
}

// A wrong but well-formed answer: the last character is replaced by a
// different one of the same script.
inline std::string wrong_response(const std::string& transcript) {
  auto cps = psych::decode_utf8(psych::normalize_answer(transcript));
  require(!cps.empty(), ErrorCode::kInvalidArgument, "empty transcript");
  char32_t& c = cps.back();
  if (c >= U'a' && c <= U'z') {
    c = c == U'z' ? U'a' : c + 1;
  } else if (psych::is_hiragana(c)) {
    c = c == U'ゖ' ? U'ぁ' : c + 1;
  } else {
    c = U'a';
  }
  return psych::encode_utf8(cps);
}

// Drives one session from creation to completion through the same
// operations the HTTP API uses.
inline void run_simulated_session(SessionStore& store, const SimulatedListener& listener,
                                  std::uint64_t plan_seed, double presentation_level_db) {
  store.create(listener.participant_id, plan_seed);
  std::mt19937_64 rng(listener.profile.seed);
  store.with_session(listener.participant_id, [&](Session& s) {
    s.record_volume("simulated");
    for (int f : tonepip::kPresetFrequencies) {
      tonepip::TonePipSequenceSpec spec;
      spec.frequency_hz = f;
      s.submit_tonepip(f, psych::simulate_tonepip_response(listener.profile, spec,
                                                           presentation_level_db));
    }
    while (s.state().phase != Phase::kDone) {
      std::vector<std::string> answers;
      std::size_t block = 0;
      Phase phase = s.state().phase;
      for (std::size_t k = 0; k < s.state().block_size(); ++k) {
        const auto t = s.next_stimulus();
        block = t.block;
        phase = t.phase;
        const auto& stim = s.served_stimulus(t.phase, t.index);
        const bool correct =
            psych::simulate_word_response(listener.profile, stim.method, stim.snr_db, rng);
        answers.push_back(correct ? stim.transcript : wrong_response(stim.transcript));
      }
      const auto v = s.submit_block_answers(block, answers);
      require(v.accepted, ErrorCode::kAnswersRejected,
              "simulated answers rejected in " + to_string(phase) + " block " +
                  std::to_string(block));
    }
  });
}

inline void simulate_cohort(SessionStore& store, const CohortSpec& spec,
                            const std::vector<SimulatedListener>& cohort) {
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    run_simulated_session(store, cohort[i], spec.seed * 1000003ull + i,
                          spec.presentation_level_db);
  }
}

// The qualitative ordering of mean SRTs: the single-channel IRM mask is best,
// both beamformers come next and the unprocessed condition is worst.
inline bool ordering_recovered(const std::vector<psych::ConditionSummary>& summary) {
  std::map<EnhancementMethod, double> mean;
  for (const auto& s : summary) mean[s.method] = s.mean;
  if (mean.size() != enhance::kAllMethods.size()) return false;
  const double irm = mean[EnhancementMethod::kMvdr2chIrm];
  const double est = mean[EnhancementMethod::kMvdr2chEst];
  return mean[EnhancementMethod::kMask1chIrm] < std::min(irm, est) &&
         std::max(irm, est) < mean[EnhancementMethod::kUnprocessed];
}

}  // namespace pipscreen::experiment

#endif  // PIPSCREEN_EXPERIMENT_SIMULATE_HPP_

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

#ifndef PIPSCREEN_PSYCH_SIMULATE_HPP_
#define PIPSCREEN_PSYCH_SIMULATE_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "pipscreen/enhance/method.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/psych/fit.hpp"
#include "pipscreen/tonepip/levels.hpp"
#include "pipscreen/tonepip/sequence.hpp"

namespace pipscreen::psych {

// A simulated participant. Hearing thresholds are absolute (dB SPL): the
// tabulated normal-hearing reference plus a per-frequency offset.
struct ListenerProfile {
  std::map<int, double> threshold_offset_db;  // frequency -> offset
  std::map<enhance::EnhancementMethod, double> true_mu;
  double true_sigma = 2.0;
  std::uint64_t seed = 0;

  void validate() const {
    require(true_sigma > 0.0, ErrorCode::kInvalidArgument, "true_sigma must be positive");
  }

  double threshold_db(int frequency_hz) const {
    const auto it = threshold_offset_db.find(frequency_hz);
    const double offset = it == threshold_offset_db.end() ? 0.0 : it->second;
    return tonepip::ansi_reference_threshold(frequency_hz) + offset;
  }
};

inline int count_audible_pips(const tonepip::TonePipSequenceSpec& spec,
                              double presentation_level_db, double threshold_db) {
  int audible = 0;
  for (int k = 0; k < spec.n_pips; ++k) {
    if (presentation_level_db - spec.step_db * k >= threshold_db) ++audible;
  }
  return audible;
}

// Counts the pips whose level reaches the listener's threshold when
// the first pip plays at `presentation_level_db`.
inline int simulate_tonepip_response(const ListenerProfile& profile,
                                     const tonepip::TonePipSequenceSpec& spec,
                                     double presentation_level_db) {
  profile.validate();
  return count_audible_pips(spec, presentation_level_db, profile.threshold_db(spec.frequency_hz));
}

inline double response_probability(const ListenerProfile& profile,
                                   enhance::EnhancementMethod method, double snr_db) {
  const auto it = profile.true_mu.find(method);
  require(it != profile.true_mu.end(), ErrorCode::kUnknownCondition,
          "profile has no true mu for " + std::string(enhance::to_string(method)));
  return psychometric(snr_db, it->second, profile.true_sigma);
}

// Seeded Bernoulli draw at Phi((snr - true_mu) / true_sigma).
template <typename Rng>
bool simulate_word_response(const ListenerProfile& profile, enhance::EnhancementMethod method,
                            double snr_db, Rng& rng) {
  profile.validate();
  std::bernoulli_distribution draw(response_probability(profile, method, snr_db));
  return draw(rng);
}

}  // namespace pipscreen::psych

#endif  // PIPSCREEN_PSYCH_SIMULATE_HPP_

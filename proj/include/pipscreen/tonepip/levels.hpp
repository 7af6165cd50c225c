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

#ifndef PIPSCREEN_TONEPIP_LEVELS_HPP_
#define PIPSCREEN_TONEPIP_LEVELS_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>

#include "pipscreen/error.hpp"
#include "pipscreen/records.hpp"

namespace pipscreen::tonepip {

inline constexpr std::array<int, 4> kPresetFrequencies = {500, 1000, 2000, 4000};
inline constexpr int kDefaultPipCount = 15;
inline constexpr double kDefaultStepDb = 5.0;

inline bool is_preset_frequency(int hz) {
  for (int f : kPresetFrequencies) {
    if (f == hz) return true;
  }
  return false;
}

// Estimated level above threshold, step_db * (n_pip - 1). nullopt when no
// pip was audible.
inline std::optional<double> listening_level(int n_pip, double step_db = kDefaultStepDb) {
  require(n_pip >= 0, ErrorCode::kInvalidArgument, "pip count must be non-negative");
  if (n_pip == 0) return std::nullopt;
  return step_db * (n_pip - 1);
}

// Level of the tone pip at threshold.
inline double threshold_spl(double l_ref, double l_lis) { return l_ref - l_lis; }

// Reference equivalent threshold SPLs of normal-hearing listeners used for
// audiometer calibration.
inline double ansi_reference_threshold(int frequency_hz) {
  switch (frequency_hz) {
    case 500: return 13.5;
    case 1000: return 7.5;
    case 2000: return 9.0;
    case 4000: return 12.0;
    default:
      fail(ErrorCode::kUnknownFrequency,
           "no reference threshold tabulated for " + std::to_string(frequency_hz) + " Hz");
  }
}

inline double mean_pips(std::span<const TonePipResult> results) {
  require(!results.empty(), ErrorCode::kInvalidArgument, "no tone-pip results");
  double sum = 0.0;
  for (const auto& r : results) sum += r.n_pip;
  return sum / static_cast<double>(results.size());
}

inline TonePipResult make_result(int frequency_hz, int n_pip, int max_pips = kDefaultPipCount) {
  require(n_pip >= 0 && n_pip <= max_pips, ErrorCode::kTonePipOutOfRange,
          "pip count " + std::to_string(n_pip) + " outside 0.." + std::to_string(max_pips));
  return {frequency_hz, n_pip, listening_level(n_pip)};
}

}  // namespace pipscreen::tonepip

#endif  // PIPSCREEN_TONEPIP_LEVELS_HPP_

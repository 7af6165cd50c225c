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

#ifndef PIPSCREEN_DSP_LEVEL_HPP_
#define PIPSCREEN_DSP_LEVEL_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/error.hpp"

namespace pipscreen::dsp {

inline double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

inline double rms(std::span<const double> x) {
  return x.empty() ? 0.0 : std::sqrt(energy(x) / static_cast<double>(x.size()));
}

inline double db_from_power_ratio(double ratio) { return 10.0 * std::log10(ratio); }
inline double db_from_amplitude(double amplitude) { return 20.0 * std::log10(amplitude); }
inline double amplitude_from_db(double db) { return std::pow(10.0, db / 20.0); }

// RMS level in dBFS (full-scale square wave = 0 dBFS). Returns nullopt for a
// silent segment, which has no finite level.
inline std::optional<double> rms_db(std::span<const double> x) {
  require(!x.empty(), ErrorCode::kInvalidArgument, "rms_db of empty segment");
  const double r = rms(x);
  if (r == 0.0) return std::nullopt;
  return db_from_amplitude(r);
}

inline std::optional<double> rms_db(const AudioBuffer& signal,
                                    std::size_t channel) {
  return rms_db(signal.channel(channel));
}

}  // namespace pipscreen::dsp

#endif  // PIPSCREEN_DSP_LEVEL_HPP_

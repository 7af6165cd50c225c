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

#ifndef PIPSCREEN_TONEPIP_SEQUENCE_HPP_
#define PIPSCREEN_TONEPIP_SEQUENCE_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/level.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/tonepip/levels.hpp"

namespace pipscreen::tonepip {

enum class SequenceOrder { kDescending, kAscending };

inline constexpr double kDigitalFloorDbfs = -120.0;

struct TonePipSequenceSpec {
  int frequency_hz = 1000;
  int n_pips = kDefaultPipCount;
  double step_db = kDefaultStepDb;
  double ref_level_dbfs = -20.0;
  double ref_duration = 1.0;
  double pip_duration = 0.1;
  double gap_duration = 0.2;
  double ramp_duration = 0.01;
  SequenceOrder order = SequenceOrder::kDescending;
  bool allow_any_frequency = false;

  // Level of pip k (0-based) in dBFS.
  double pip_level(int k) const {
    const int rank = order == SequenceOrder::kDescending ? k : n_pips - 1 - k;
    return ref_level_dbfs - step_db * rank;
  }

  void validate() const {
    require(n_pips >= 1, ErrorCode::kInvalidArgument, "need at least one pip");
    require(step_db > 0.0, ErrorCode::kInvalidArgument, "step must be positive");
    require(allow_any_frequency || is_preset_frequency(frequency_hz),
            ErrorCode::kUnknownFrequency, "frequency not in the preset set");
    require(frequency_hz > 0, ErrorCode::kInvalidArgument, "frequency must be positive");
    require(ref_duration > 0.0 && pip_duration > 0.0 && gap_duration >= 0.0 &&
                ramp_duration >= 0.0 && 2.0 * ramp_duration <= pip_duration,
            ErrorCode::kInvalidArgument, "bad tone-pip timing");
    const double lowest = ref_level_dbfs - step_db * (n_pips - 1);
    require(lowest >= kDigitalFloorDbfs, ErrorCode::kInvalidArgument,
            "pip levels fall below the digital floor");
  }
};

struct ToneSegment {
  std::size_t start = 0;
  std::size_t length = 0;
  double level_dbfs = 0.0;
};

struct TonePipSequence {
  dsp::AudioBuffer audio;
  ToneSegment reference;
  std::vector<ToneSegment> pips;
};

namespace detail {

// Sine with raised-cosine onset/offset, scaled so its RMS over the whole
// gated segment equals level_dbfs.
inline std::vector<double> gated_tone(double freq, std::size_t length, std::size_t ramp,
                                      double level_dbfs, double rate) {
  std::vector<double> x(length);
  for (std::size_t i = 0; i < length; ++i) {
    double gain = 1.0;
    const std::size_t from_end = length - 1 - i;
    if (ramp > 0 && (i < ramp || from_end < ramp)) {
      const double pos = static_cast<double>(std::min(i, from_end)) / static_cast<double>(ramp);
      gain = 0.5 - 0.5 * std::cos(std::numbers::pi * pos);
    }
    x[i] = gain * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
  }
  const double scale = dsp::amplitude_from_db(level_dbfs) / dsp::rms(x);
  for (auto& v : x) v *= scale;
  return x;
}

}  // namespace detail

// Reference tone at ref_level_dbfs followed by n_pips gated pips whose RMS
// levels step down (or up, in ascending order) by step_db.
inline TonePipSequence gen_tonepip_sequence(const TonePipSequenceSpec& spec,
                                            double sample_rate = 48000.0) {
  spec.validate();
  const auto samples = [&](double seconds) {
    return static_cast<std::size_t>(std::llround(seconds * sample_rate));
  };
  const std::size_t ref_len = samples(spec.ref_duration);
  const std::size_t pip_len = samples(spec.pip_duration);
  const std::size_t gap_len = samples(spec.gap_duration);
  const std::size_t ramp_len = samples(spec.ramp_duration);
  const std::size_t total = ref_len + static_cast<std::size_t>(spec.n_pips) * (gap_len + pip_len);

  std::vector<double> out(total, 0.0);
  TonePipSequence seq;
  const auto place = [&](std::size_t start, std::size_t length, double level) {
    const auto tone = detail::gated_tone(spec.frequency_hz, length, ramp_len, level, sample_rate);
    std::copy(tone.begin(), tone.end(), out.begin() + static_cast<long>(start));
    return ToneSegment{start, length, level};
  };
  seq.reference = place(0, ref_len, spec.ref_level_dbfs);
  std::size_t cursor = ref_len;
  for (int k = 0; k < spec.n_pips; ++k) {
    cursor += gap_len;
    seq.pips.push_back(place(cursor, pip_len, spec.pip_level(k)));
    cursor += pip_len;
  }
  for (double v : out) {
    require(std::abs(v) <= 1.0, ErrorCode::kInvalidArgument,
            "reference level clips at full scale");
  }
  seq.audio = dsp::AudioBuffer::mono(std::move(out), sample_rate);
  return seq;
}

}  // namespace pipscreen::tonepip

#endif  // PIPSCREEN_TONEPIP_SEQUENCE_HPP_

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

#ifndef PIPSCREEN_SCENE_IMPULSE_RESPONSE_HPP_
#define PIPSCREEN_SCENE_IMPULSE_RESPONSE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/scene/positions.hpp"

namespace pipscreen::scene {

inline constexpr int kFractionalDelayHalfWidth = 32;

// Adds a Blackman-windowed sinc centred at `delay` samples, scaled by gain.
inline void add_fractional_impulse(std::vector<double>& ir, double delay,
                                   double gain) {
  const int h = kFractionalDelayHalfWidth;
  const auto first = static_cast<long>(std::ceil(delay - h));
  const auto last = static_cast<long>(std::floor(delay + h));
  for (long n = std::max(first, 0L); n <= last && n < static_cast<long>(ir.size()); ++n) {
    const double x = static_cast<double>(n) - delay;
    const double sinc =
        std::abs(x) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double u = (x + h) / (2.0 * h);  // 0..1 across the window
    const double window = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * u) +
                          0.08 * std::cos(4.0 * std::numbers::pi * u);
    ir[static_cast<std::size_t>(n)] += gain * sinc * window;
  }
}

struct DirectPath {
  double delay1 = 0.0;  // samples
  double delay2 = 0.0;
  double gain = 1.0;
};

// Far-field geometry: channel 2 lags channel 1 by spacing*sin(azimuth)/c.
inline DirectPath direct_path(const SourcePosition& position, double mic_spacing_cm,
                              double sample_rate) {
  position.validate();
  require(mic_spacing_cm > 0.0, ErrorCode::kInvalidArgument,
          "microphone spacing must be positive");
  const double az = position.azimuth_deg * std::numbers::pi / 180.0;
  const double r = position.distance_cm / 100.0;
  const double half_lag = 0.5 * (mic_spacing_cm / 100.0) * std::sin(az) / kSpeedOfSound;
  const double bulk = r / kSpeedOfSound;
  DirectPath path{(bulk - half_lag) * sample_rate, (bulk + half_lag) * sample_rate, 1.0 / r};
  const double lead = kFractionalDelayHalfWidth - std::min(path.delay1, path.delay2);
  if (lead > 0.0) {
    path.delay1 += lead;
    path.delay2 += lead;
  }
  return path;
}

// Synthetic two-microphone room response: fractional-delay direct paths plus
// an exponentially decaying, partially correlated noise tail that reaches
// -60 dB at reverb_time. Reverberant energy equals the direct energy of a
// source at 1 m.
inline dsp::AudioBuffer synth_ir(const SourcePosition& position, double mic_spacing_cm,
                                 double reverb_time, std::uint64_t seed,
                                 double sample_rate = 16000.0) {
  require(reverb_time >= 0.0, ErrorCode::kInvalidArgument,
          "reverb time must be non-negative");
  const DirectPath path = direct_path(position, mic_spacing_cm, sample_rate);
  const double last_direct = std::max(path.delay1, path.delay2);
  const auto tail_start = static_cast<std::size_t>(std::ceil(last_direct)) + 1;
  const auto tail_length = static_cast<std::size_t>(std::ceil(reverb_time * sample_rate));
  const std::size_t length =
      std::max(tail_start + tail_length,
               static_cast<std::size_t>(std::ceil(last_direct)) + kFractionalDelayHalfWidth + 1);

  std::vector<double> ch1(length, 0.0), ch2(length, 0.0);
  add_fractional_impulse(ch1, path.delay1, path.gain);
  add_fractional_impulse(ch2, path.delay2, path.gain);

  if (tail_length > 0) {
    constexpr double kTailCorrelation = 0.5;
    const double decay = 3.0 * std::numbers::ln10 / (reverb_time * sample_rate);
    const double a0 = std::sqrt(2.0 * decay);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double mix = std::sqrt(1.0 - kTailCorrelation * kTailCorrelation);
    for (std::size_t i = 0; i < tail_length; ++i) {
      const double env = a0 * std::exp(-decay * static_cast<double>(i));
      const double g1 = gauss(rng);
      const double g2 = gauss(rng);
      ch1[tail_start + i] += env * g1;
      ch2[tail_start + i] += env * (kTailCorrelation * g1 + mix * g2);
    }
  }
  return dsp::AudioBuffer({std::move(ch1), std::move(ch2)}, sample_rate);
}

}  // namespace pipscreen::scene

#endif  // PIPSCREEN_SCENE_IMPULSE_RESPONSE_HPP_

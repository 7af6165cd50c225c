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

#ifndef PIPSCREEN_SCENE_BABBLE_HPP_
#define PIPSCREEN_SCENE_BABBLE_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/fft.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/scene/impulse_response.hpp"
#include "pipscreen/scene/speech_like.hpp"

namespace pipscreen::scene {

struct BabbleOptions {
  double reverb_time = 0.36;
  double mic_spacing_cm = 4.0;
  double level_dbfs = -20.0;
  double sample_rate = 16000.0;
};

// Sum of n_talkers independent speech-shaped streams, each placed at a random
// azimuth and 1-3 m distance through synth_ir. Normalised so the RMS over both
// channels is options.level_dbfs.
inline dsp::AudioBuffer synth_babble(double duration, int n_talkers, std::uint64_t seed,
                                     const BabbleOptions& options = {}) {
  require(n_talkers >= 1, ErrorCode::kInvalidArgument, "need at least one talker");
  require(duration > 0.0, ErrorCode::kInvalidArgument, "duration must be positive");
  const double rate = options.sample_rate;
  const auto length = static_cast<std::size_t>(std::llround(duration * rate));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  std::vector<double> ch1(length, 0.0), ch2(length, 0.0);
  for (int k = 0; k < n_talkers; ++k) {
    const SourcePosition position{-180.0 + 360.0 * uni(rng), 100.0 + 200.0 * uni(rng), 0};
    const std::uint64_t talker_seed = rng();
    const std::uint64_t ir_seed = rng();
    const auto ir = synth_ir(position, options.mic_spacing_cm, options.reverb_time,
                             ir_seed, rate);
    // Run-in of one IR length so the output starts in steady state.
    const std::size_t run_in = ir.length();
    const auto stream = talker_stream(length + run_in, talker_seed, rate);
    const auto y1 = dsp::convolve(stream, ir.channel(0));
    const auto y2 = dsp::convolve(stream, ir.channel(1));
    for (std::size_t i = 0; i < length; ++i) {
      ch1[i] += y1[run_in + i];
      ch2[i] += y2[run_in + i];
    }
  }
  const double power = (dsp::energy(ch1) + dsp::energy(ch2)) / (2.0 * length);
  const double gain = dsp::amplitude_from_db(options.level_dbfs) / std::sqrt(power);
  for (auto& v : ch1) v *= gain;
  for (auto& v : ch2) v *= gain;
  return dsp::AudioBuffer({std::move(ch1), std::move(ch2)}, rate);
}

}  // namespace pipscreen::scene

#endif  // PIPSCREEN_SCENE_BABBLE_HPP_

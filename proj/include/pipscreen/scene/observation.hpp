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

#ifndef PIPSCREEN_SCENE_OBSERVATION_HPP_
#define PIPSCREEN_SCENE_OBSERVATION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/fft.hpp"
#include "pipscreen/dsp/level.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/scene/impulse_response.hpp"
#include "pipscreen/scene/positions.hpp"

namespace pipscreen::scene {

inline constexpr std::array<double, 5> kSnrGrid = {-9.0, -6.0, -3.0, 0.0, 3.0};

inline bool on_snr_grid(double snr_db) {
  return std::find(kSnrGrid.begin(), kSnrGrid.end(), snr_db) != kSnrGrid.end();
}

struct SceneConfig {
  double mic_spacing_cm = 4.0;
  double reverb_time = 0.36;
  double snr_db = 0.0;
  SourcePosition position = preset_position(kDefaultPositionId);
  std::uint64_t seed = 0;
  double noise_pad_ms = 288.0;
  bool allow_off_grid = false;

  void validate() const {
    require(mic_spacing_cm > 0.0, ErrorCode::kInvalidArgument,
            "microphone spacing must be positive");
    require(reverb_time >= 0.0 && noise_pad_ms >= 0.0, ErrorCode::kInvalidArgument,
            "reverb time and noise padding must be non-negative");
    require(allow_off_grid || on_snr_grid(snr_db), ErrorCode::kInvalidArgument,
            "SNR is not on the configured grid");
    position.validate();
  }
};

// Sample range [begin, end) over which SNR is defined.
struct SnrSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct NoisyObservation {
  dsp::AudioBuffer mixture;       // x_i = s_i + v_i
  dsp::AudioBuffer speech_image;  // s_i = h_i * c
  dsp::AudioBuffer noise_image;   // v_i
  SceneConfig config;
  SnrSpan span;
};

// First to last non-zero sample.
inline SnrSpan support(std::span<const double> x) {
  const auto nz = [](double v) { return v != 0.0; };
  const auto first = std::find_if(x.begin(), x.end(), nz);
  require(first != x.end(), ErrorCode::kSilentSignal, "signal is silent");
  const auto last = std::find_if(x.rbegin(), x.rend(), nz);
  return {static_cast<std::size_t>(first - x.begin()),
          static_cast<std::size_t>(x.rend() - last)};
}

// Support of clean * ir, computed from the operands so FFT round-off in the
// convolution cannot widen it.
inline SnrSpan convolved_support(std::span<const double> clean, std::span<const double> ir) {
  const SnrSpan a = support(clean);
  const SnrSpan b = support(ir);
  return {a.begin + b.begin, a.end + b.end - 1};
}

inline double span_snr_db(std::span<const double> speech, std::span<const double> noise,
                          SnrSpan span) {
  const double es = dsp::energy(speech.subspan(span.begin, span.end - span.begin));
  const double ev = dsp::energy(noise.subspan(span.begin, span.end - span.begin));
  return dsp::db_from_power_ratio(es / ev);
}

// SNR recomputed from the stored images at channel 1.
inline double measured_snr_db(const NoisyObservation& obs) {
  return span_snr_db(obs.speech_image.channel(0), obs.noise_image.channel(0), obs.span);
}

// Convolves clean speech with the two-channel IR and scales the noise so the
// channel-1 SNR over the convolved-speech support equals snr_db.
inline NoisyObservation make_observation(const dsp::AudioBuffer& clean,
                                         const dsp::AudioBuffer& ir,
                                         const dsp::AudioBuffer& noise, double snr_db) {
  require(clean.channel_count() == 1, ErrorCode::kInvalidArgument,
          "clean speech must be mono");
  require(ir.channel_count() == 2 && noise.channel_count() == 2,
          ErrorCode::kInvalidArgument, "IR and noise must have two channels");
  require(clean.sample_rate() == ir.sample_rate() &&
              clean.sample_rate() == noise.sample_rate(),
          ErrorCode::kInvalidArgument, "sample rates differ");
  require(std::isfinite(snr_db), ErrorCode::kInvalidArgument, "SNR must be finite");
  require(dsp::energy(clean.channel(0)) > 0.0, ErrorCode::kSilentSignal,
          "clean speech is silent");

  std::vector<std::vector<double>> speech;
  for (std::size_t c = 0; c < 2; ++c) {
    speech.push_back(dsp::convolve(clean.channel(0), ir.channel(c)));
  }
  const std::size_t length = speech[0].size();
  require(noise.length() >= length, ErrorCode::kInvalidArgument,
          "noise shorter than the convolved speech");

  const SnrSpan span = convolved_support(clean.channel(0), ir.channel(0));
  const auto noise_ref = noise.channel(0).subspan(span.begin, span.end - span.begin);
  const double es = dsp::energy(std::span<const double>(speech[0]).subspan(
      span.begin, span.end - span.begin));
  const double ev = dsp::energy(noise_ref);
  require(ev > 0.0, ErrorCode::kSilentSignal,
          "noise is silent over the speech span; no finite gain");
  const double gain = std::sqrt(es / (ev * std::pow(10.0, snr_db / 10.0)));

  std::vector<std::vector<double>> scaled(2, std::vector<double>(length));
  std::vector<std::vector<double>> mixed(2, std::vector<double>(length));
  for (std::size_t c = 0; c < 2; ++c) {
    const auto src = noise.channel(c);
    for (std::size_t i = 0; i < length; ++i) {
      scaled[c][i] = gain * src[i];
      mixed[c][i] = speech[c][i] + scaled[c][i];
    }
  }
  const double rate = clean.sample_rate();
  NoisyObservation obs{dsp::AudioBuffer(std::move(mixed), rate),
                       dsp::AudioBuffer(std::move(speech), rate),
                       dsp::AudioBuffer(std::move(scaled), rate), SceneConfig{}, span};
  obs.config.snr_db = snr_db;
  obs.config.allow_off_grid = true;
  return obs;
}

inline dsp::AudioBuffer pad_silence(const dsp::AudioBuffer& clean, double pad_ms) {
  const auto pad = static_cast<std::size_t>(std::llround(pad_ms * clean.sample_rate() / 1000.0));
  std::vector<std::vector<double>> channels;
  for (const auto& ch : clean.channels()) {
    std::vector<double> padded(ch.size() + 2 * pad, 0.0);
    std::copy(ch.begin(), ch.end(), padded.begin() + static_cast<long>(pad));
    channels.push_back(std::move(padded));
  }
  return dsp::AudioBuffer(std::move(channels), clean.sample_rate());
}

// Full scene: pads the word with noise-only periods, synthesises the IR for
// the configured position and draws the noise at a seeded offset into a long
// babble recording.
inline NoisyObservation build_scene(const dsp::AudioBuffer& clean,
                                    const dsp::AudioBuffer& babble,
                                    const SceneConfig& config,
                                    const dsp::AudioBuffer* measured_ir = nullptr) {
  config.validate();
  const auto padded = pad_silence(clean, config.noise_pad_ms);
  const dsp::AudioBuffer ir =
      measured_ir != nullptr
          ? *measured_ir
          : synth_ir(config.position, config.mic_spacing_cm, config.reverb_time,
                     config.seed, clean.sample_rate());
  const std::size_t needed = padded.length() + ir.length() - 1;
  require(babble.length() >= needed, ErrorCode::kInvalidArgument,
          "babble buffer too short for this scene");
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<std::size_t> offset_dist(0, babble.length() - needed);
  const std::size_t offset = offset_dist(rng);
  std::vector<std::vector<double>> segment;
  for (std::size_t c = 0; c < babble.channel_count(); ++c) {
    const auto ch = babble.channel(c);
    segment.emplace_back(ch.begin() + static_cast<long>(offset),
                         ch.begin() + static_cast<long>(offset + needed));
  }
  auto obs = make_observation(padded, ir, dsp::AudioBuffer(std::move(segment), babble.sample_rate()),
                              config.snr_db);
  obs.config = config;
  return obs;
}

}  // namespace pipscreen::scene

#endif  // PIPSCREEN_SCENE_OBSERVATION_HPP_

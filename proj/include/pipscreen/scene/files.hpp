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

#ifndef PIPSCREEN_SCENE_FILES_HPP_
#define PIPSCREEN_SCENE_FILES_HPP_

#include <filesystem>
#include <string>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/resample.hpp"
#include "pipscreen/dsp/wav.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/scene/babble.hpp"
#include "pipscreen/scene/manifest.hpp"
#include "pipscreen/scene/observation.hpp"
#include "pipscreen/scene/speech_like.hpp"

namespace pipscreen::scene {

// Loads a WAV and brings it to the manifest rate.
inline dsp::AudioBuffer read_at_rate(const std::filesystem::path& path, double rate) {
  auto audio = dsp::read_wav(path);
  return audio.sample_rate() == rate ? audio : dsp::resample(audio, rate);
}

inline dsp::AudioBuffer manifest_babble(const SceneManifest& m) {
  if (m.babble.path) return read_at_rate(m.resolve(*m.babble.path), m.sample_rate);
  BabbleOptions opts;
  opts.reverb_time = m.reverb_time;
  opts.mic_spacing_cm = m.mic_spacing_cm;
  opts.sample_rate = m.sample_rate;
  return synth_babble(m.babble.duration, m.babble.n_talkers, m.babble.seed, opts);
}

inline SceneConfig scene_config(const SceneManifest& m, const SceneEntry& e) {
  SceneConfig c;
  c.mic_spacing_cm = m.mic_spacing_cm;
  c.reverb_time = m.reverb_time;
  c.snr_db = e.snr_db;
  c.position = preset_position(e.position_id);
  c.seed = e.seed;
  c.noise_pad_ms = m.noise_pad_ms;
  return c;
}

inline NoisyObservation synthesize_entry(const SceneManifest& m, const SceneEntry& e,
                                         const dsp::AudioBuffer& babble) {
  auto clean = e.clean ? read_at_rate(m.resolve(*e.clean), m.sample_rate)
                       : synth_word(e.word_id, m.sample_rate);
  if (clean.channel_count() > 1) clean = clean.extract_channel(0);
  if (e.ir) {
    const auto ir = read_at_rate(m.resolve(*e.ir), m.sample_rate);
    require(ir.channel_count() == 2, ErrorCode::kDimensionMismatch,
            "impulse response " + *e.ir + " must have two channels");
    return build_scene(clean, babble, scene_config(m, e), &ir);
  }
  return build_scene(clean, babble, scene_config(m, e));
}

// Sidecar stored next to the mixture: the SNR support span and the measured
// input SNR, so enhancement can evaluate over the same samples.
inline std::filesystem::path scene_sidecar_path(const SceneManifest& m, const SceneEntry& e) {
  return std::filesystem::path(m.resolve(e.mixture)).replace_extension(".json");
}

// Rebuilds an observation from the three scene WAVs. Without a sidecar the
// SNR span is the support of the speech image.
inline NoisyObservation load_scene(const SceneManifest& m, const SceneEntry& e) {
  NoisyObservation obs;
  obs.mixture = dsp::read_wav(m.resolve(e.mixture));
  obs.speech_image = dsp::read_wav(m.resolve(e.speech));
  obs.noise_image = dsp::read_wav(m.resolve(e.noise));
  require(obs.mixture.length() == obs.speech_image.length() &&
              obs.mixture.length() == obs.noise_image.length() &&
              obs.mixture.channel_count() == obs.speech_image.channel_count() &&
              obs.mixture.channel_count() == obs.noise_image.channel_count(),
          ErrorCode::kDimensionMismatch, "scene files of " + e.mixture + " disagree in shape");
  obs.config = scene_config(m, e);
  const auto sidecar = scene_sidecar_path(m, e);
  if (std::filesystem::exists(sidecar)) {
    const Json j = read_json_file(sidecar);
    obs.span = {json_get<std::size_t>(j, "span_begin", sidecar.string()),
                json_get<std::size_t>(j, "span_end", sidecar.string())};
  } else {
    obs.span = support(obs.speech_image.channel(0));
  }
  return obs;
}

}  // namespace pipscreen::scene

#endif  // PIPSCREEN_SCENE_FILES_HPP_

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

#ifndef PIPSCREEN_EXPERIMENT_AUDIO_HPP_
#define PIPSCREEN_EXPERIMENT_AUDIO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/resample.hpp"
#include "pipscreen/dsp/wav.hpp"
#include "pipscreen/enhance/enhance.hpp"
#include "pipscreen/experiment/corpus.hpp"
#include "pipscreen/experiment/plan.hpp"
#include "pipscreen/scene/babble.hpp"
#include "pipscreen/scene/observation.hpp"
#include "pipscreen/scene/speech_like.hpp"

namespace pipscreen::experiment {

struct RendererOptions {
  double processing_rate = 16000.0;
  double playback_rate = 48000.0;
  double babble_duration = 30.0;
  int babble_talkers = 16;
  std::uint64_t babble_seed = 1;
  int position_id = scene::kDefaultPositionId;
  double mic_spacing_cm = 4.0;
  double reverb_time = 0.36;
};

// Produces the playback waveform of a stimulus: the word is placed in the
// two-channel babble scene at the stimulus SNR, enhanced with the stimulus
// method and resampled for playback. Output is deterministic per
// (word, method, SNR). Thread-safe.
class StimulusRenderer {
 public:
  StimulusRenderer(const Corpus& corpus, RendererOptions options = {})
      : corpus_(corpus), options_(options) {}

  dsp::AudioBuffer clean_word(const std::string& word_id) const {
    const auto& entry = corpus_.find(word_id);
    if (!entry.audio) return scene::synth_word(word_id, options_.processing_rate);
    auto audio = dsp::read_wav(corpus_.base_dir / *entry.audio);
    if (audio.channel_count() > 1) audio = audio.extract_channel(0);
    if (audio.sample_rate() != options_.processing_rate) {
      audio = dsp::resample(audio, options_.processing_rate);
    }
    return audio;
  }

  dsp::AudioBuffer render(const Stimulus& stimulus) const {
    scene::SceneConfig config;
    config.mic_spacing_cm = options_.mic_spacing_cm;
    config.reverb_time = options_.reverb_time;
    config.snr_db = stimulus.snr_db;
    config.position = scene::preset_position(options_.position_id);
    config.seed = scene::fnv1a(stimulus.word_id);
    const auto obs = scene::build_scene(clean_word(stimulus.word_id), babble(), config);
    auto out = dsp::resample(enhance::enhance(obs, stimulus.method), options_.playback_rate);
    double peak = 0.0;
    for (double v : out.channel(0)) peak = std::max(peak, std::abs(v));
    if (peak > 0.99) {
      std::vector<double> scaled(out.channel(0).begin(), out.channel(0).end());
      for (auto& v : scaled) v *= 0.99 / peak;
      out = dsp::AudioBuffer::mono(std::move(scaled), out.sample_rate());
    }
    return out;
  }

  std::vector<std::uint8_t> render_wav(const Stimulus& stimulus) const {
    return dsp::encode_wav(render(stimulus), dsp::WavFormat::kPcm16);
  }

 private:
  const dsp::AudioBuffer& babble() const {
    std::call_once(babble_once_, [&] {
      scene::BabbleOptions b;
      b.reverb_time = options_.reverb_time;
      b.mic_spacing_cm = options_.mic_spacing_cm;
      b.sample_rate = options_.processing_rate;
      babble_ = scene::synth_babble(options_.babble_duration, options_.babble_talkers,
                                    options_.babble_seed, b);
    });
    return *babble_;
  }

  Corpus corpus_;
  RendererOptions options_;
  mutable std::once_flag babble_once_;
  mutable std::optional<dsp::AudioBuffer> babble_;
};

}  // namespace pipscreen::experiment

#endif  // PIPSCREEN_EXPERIMENT_AUDIO_HPP_

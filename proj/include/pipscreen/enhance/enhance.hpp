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

#ifndef PIPSCREEN_ENHANCE_ENHANCE_HPP_
#define PIPSCREEN_ENHANCE_ENHANCE_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/stft.hpp"
#include "pipscreen/enhance/beamformer.hpp"
#include "pipscreen/enhance/mask.hpp"
#include "pipscreen/enhance/method.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/scene/observation.hpp"

namespace pipscreen::enhance {

struct EnhanceOptions {
  dsp::StftParams stft;
  double noise_period_ms = 288.0;
  std::size_t ref_channel = 0;
};

// Enhanced output plus the same linear operator applied separately to the
// speech and noise images (oracle components).
struct EnhancementResult {
  EnhancementMethod method = EnhancementMethod::kUnprocessed;
  dsp::AudioBuffer output;
  dsp::AudioBuffer speech_component;
  dsp::AudioBuffer noise_component;
  std::vector<std::size_t> flagged_bins;
  double input_snr_db = 0.0;
  double output_snr_db = 0.0;
};

namespace detail {

inline std::vector<dsp::Spectrogram> stft_two(const dsp::AudioBuffer& x,
                                              const dsp::StftParams& params) {
  return dsp::stft_channels(x, params);
}

inline dsp::AudioBuffer mask_and_resynth(const Mask& mask, const dsp::Spectrogram& spec) {
  return dsp::istft(apply_mask(mask, spec));
}

}  // namespace detail

inline EnhancementResult enhance_components(const scene::NoisyObservation& obs,
                                            EnhancementMethod method,
                                            const EnhanceOptions& options = {}) {
  require(obs.mixture.channel_count() == 2, ErrorCode::kInvalidArgument,
          "observation must have two channels");
  const std::size_t ref = options.ref_channel;
  EnhancementResult result;
  result.method = method;
  result.input_snr_db = scene::span_snr_db(obs.speech_image.channel(ref),
                                           obs.noise_image.channel(ref), obs.span);

  switch (method) {
    case EnhancementMethod::kUnprocessed:
      result.output = obs.mixture.extract_channel(ref);
      result.speech_component = obs.speech_image.extract_channel(ref);
      result.noise_component = obs.noise_image.extract_channel(ref);
      break;
    case EnhancementMethod::kMask1chIrm: {
      const auto x = dsp::stft(obs.mixture.channel(ref), obs.mixture.sample_rate(), options.stft);
      const auto s = dsp::stft(obs.speech_image.channel(ref), obs.mixture.sample_rate(), options.stft);
      const auto v = dsp::stft(obs.noise_image.channel(ref), obs.mixture.sample_rate(), options.stft);
      const Mask mask = compute_irm(s, v);
      result.output = detail::mask_and_resynth(mask, x);
      result.speech_component = detail::mask_and_resynth(mask, s);
      result.noise_component = detail::mask_and_resynth(mask, v);
      break;
    }
    case EnhancementMethod::kMvdr2chIrm:
    case EnhancementMethod::kMvdr2chEst: {
      const auto x = detail::stft_two(obs.mixture, options.stft);
      const auto s = detail::stft_two(obs.speech_image, options.stft);
      const auto v = detail::stft_two(obs.noise_image, options.stft);
      const Mask mask = method == EnhancementMethod::kMvdr2chIrm
                            ? compute_irm(s[ref], v[ref])
                            : est_mask(x[0].frames(), options.stft, options.noise_period_ms,
                                       obs.mixture.sample_rate());
      const ScmBank scms = estimate_scms(mask, x);
      const SteeringResult steering = steering_vectors(scms, ref);
      const Beamformer bf = mvdr_weights(steering.vectors, scms, ref);
      result.output = dsp::istft(beamform(bf, x));
      result.speech_component = dsp::istft(beamform(bf, s));
      result.noise_component = dsp::istft(beamform(bf, v));
      result.flagged_bins = steering.flagged;
      for (std::size_t f : bf.flagged) {
        if (std::find(result.flagged_bins.begin(), result.flagged_bins.end(), f) ==
            result.flagged_bins.end()) {
          result.flagged_bins.push_back(f);
        }
      }
      std::sort(result.flagged_bins.begin(), result.flagged_bins.end());
      break;
    }
  }
  result.output_snr_db = scene::span_snr_db(result.speech_component.channel(0),
                                            result.noise_component.channel(0), obs.span);
  return result;
}

inline dsp::AudioBuffer enhance(const scene::NoisyObservation& obs, EnhancementMethod method,
                                const EnhanceOptions& options = {}) {
  return enhance_components(obs, method, options).output;
}

// Per-utterance sidecar contents.
inline Json sidecar_json(const EnhancementResult& result, const std::string& word_id,
                         const EnhanceOptions& options = {}) {
  const double rate = result.output.sample_rate();
  const double fft = static_cast<double>(options.stft.fft_size);
  Json freqs = Json::array();
  for (std::size_t f : result.flagged_bins) freqs.push_back(static_cast<double>(f) * rate / fft);
  return {{"word_id", word_id},
          {"method", std::string(to_string(result.method))},
          {"input_snr_db", result.input_snr_db},
          {"oracle_output_snr_db", result.output_snr_db},
          {"flagged_bins", result.flagged_bins},
          {"flagged_frequencies_hz", freqs}};
}

}  // namespace pipscreen::enhance

#endif  // PIPSCREEN_ENHANCE_ENHANCE_HPP_

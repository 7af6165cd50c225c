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

#ifndef PIPSCREEN_ENHANCE_MASK_HPP_
#define PIPSCREEN_ENHANCE_MASK_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pipscreen/dsp/stft.hpp"
#include "pipscreen/error.hpp"

namespace pipscreen::enhance {

enum class MaskKind { kIrm, kEst, kOnes, kCustom };

// Real T x F gain grid with every value in [0, 1].
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t frames, std::size_t bins, double fill, MaskKind kind)
      : frames_(frames), bins_(bins), values_(frames * bins, fill), kind_(kind) {
    require(fill >= 0.0 && fill <= 1.0, ErrorCode::kInvalidArgument,
            "mask values must lie in [0, 1]");
  }

  static Mask ones(std::size_t frames, std::size_t bins) {
    return Mask(frames, bins, 1.0, MaskKind::kOnes);
  }

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  MaskKind kind() const { return kind_; }

  double at(std::size_t t, std::size_t f) const { return values_[t * bins_ + f]; }
  void set(std::size_t t, std::size_t f, double value) {
    require(value >= 0.0 && value <= 1.0, ErrorCode::kInvalidArgument,
            "mask values must lie in [0, 1]");
    values_[t * bins_ + f] = value;
  }
  const std::vector<double>& values() const { return values_; }

  bool matches(const dsp::Spectrogram& spec) const {
    return frames_ == spec.frames() && bins_ == spec.bins();
  }

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<double> values_;
  MaskKind kind_ = MaskKind::kCustom;
};

// Ideal ratio mask from the reference-channel speech and noise images.
// Bins where both are silent get 0.
inline Mask compute_irm(const dsp::Spectrogram& speech, const dsp::Spectrogram& noise) {
  require(speech.same_shape(noise), ErrorCode::kDimensionMismatch,
          "speech and noise spectrograms differ in shape");
  Mask mask(speech.frames(), speech.bins(), 0.0, MaskKind::kIrm);
  for (std::size_t t = 0; t < speech.frames(); ++t) {
    for (std::size_t f = 0; f < speech.bins(); ++f) {
      const double ps = std::norm(speech.at(t, f));
      const double pv = std::norm(noise.at(t, f));
      const double total = ps + pv;
      if (total > 0.0) mask.set(t, f, std::sqrt(ps / total));
    }
  }
  return mask;
}

inline dsp::Spectrogram apply_mask(const Mask& mask, const dsp::Spectrogram& spec) {
  require(mask.matches(spec), ErrorCode::kDimensionMismatch,
          "mask and spectrogram differ in shape");
  dsp::Spectrogram out = spec;
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    for (std::size_t f = 0; f < spec.bins(); ++f) out.at(t, f) *= mask.at(t, f);
  }
  return out;
}

// Zero for frames whose centre lies within noise_period_ms of either end of
// the frame-centre span [0, (T-1) * hop], one elsewhere.
inline Mask est_mask(std::size_t frames, const dsp::StftParams& params,
                     double noise_period_ms, double sample_rate = 16000.0) {
  params.validate();
  require(frames >= 1 && noise_period_ms >= 0.0, ErrorCode::kInvalidArgument,
          "bad EST mask arguments");
  const double period = noise_period_ms * sample_rate / 1000.0;
  const double span = static_cast<double>((frames - 1) * params.hop);
  require(noise_period_ms == 0.0 || span >= 2.0 * period, ErrorCode::kInvalidArgument,
          "utterance shorter than twice the noise period");
  Mask mask(frames, params.bin_count(), 1.0, MaskKind::kEst);
  for (std::size_t t = 0; t < frames; ++t) {
    const double centre = static_cast<double>(t * params.hop);
    if (centre < period || span - centre < period) {
      for (std::size_t f = 0; f < params.bin_count(); ++f) mask.set(t, f, 0.0);
    }
  }
  return mask;
}

}  // namespace pipscreen::enhance

#endif  // PIPSCREEN_ENHANCE_MASK_HPP_

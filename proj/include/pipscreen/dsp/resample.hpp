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

#ifndef PIPSCREEN_DSP_RESAMPLE_HPP_
#define PIPSCREEN_DSP_RESAMPLE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/error.hpp"

namespace pipscreen::dsp {

// Windowed-sinc polyphase resampler for integer rate ratios L/M.
class Resampler {
 public:
  static constexpr int kZeroCrossings = 32;
  static constexpr double kKaiserBeta = 9.0;
  static constexpr double kRolloff = 0.9;

  Resampler(std::int64_t source_rate, std::int64_t target_rate) {
    require(source_rate > 0 && target_rate > 0, ErrorCode::kInvalidArgument,
            "sample rates must be positive");
    const std::int64_t g = std::gcd(source_rate, target_rate);
    up_ = target_rate / g;
    down_ = source_rate / g;
    const double factor = static_cast<double>(std::max(up_, down_));
    half_length_ = static_cast<std::int64_t>(
        std::ceil(kZeroCrossings * factor / kRolloff));
    // Cutoff in cycles per sample of the upsampled stream.
    const double cutoff = kRolloff * 0.5 / factor;
    const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
    taps_.resize(2 * half_length_ + 1);
    for (std::int64_t k = -half_length_; k <= half_length_; ++k) {
      const double x = static_cast<double>(k);
      const double arg = 2.0 * cutoff * x;
      const double sinc =
          k == 0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      const double r = x / static_cast<double>(half_length_);
      const double kaiser =
          std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) /
          norm;
      taps_[k + half_length_] = 2.0 * cutoff * sinc * kaiser * static_cast<double>(up_);
    }
  }

  std::vector<double> process(std::span<const double> input) const {
    const auto n_in = static_cast<std::int64_t>(input.size());
    const std::int64_t n_out = (n_in * up_ + down_ - 1) / down_;
    std::vector<double> out(static_cast<std::size_t>(n_out), 0.0);
    for (std::int64_t m = 0; m < n_out; ++m) {
      const std::int64_t j = m * down_;  // position in the upsampled stream
      std::int64_t i_lo = (j - half_length_ + up_ - 1);
      i_lo = i_lo >= 0 ? i_lo / up_ : -((-i_lo) / up_);
      i_lo = std::max<std::int64_t>(i_lo, 0);
      const std::int64_t i_hi = std::min<std::int64_t>((j + half_length_) / up_, n_in - 1);
      double acc = 0.0;
      for (std::int64_t i = i_lo; i <= i_hi; ++i) {
        const std::int64_t k = j - i * up_;
        if (k < -half_length_ || k > half_length_) continue;
        acc += taps_[k + half_length_] * input[i];
      }
      out[m] = acc;
    }
    return out;
  }

 private:
  std::int64_t up_ = 1;
  std::int64_t down_ = 1;
  std::int64_t half_length_ = 0;
  std::vector<double> taps_;
};

inline AudioBuffer resample(const AudioBuffer& signal, double target_rate) {
  require(target_rate > 0.0, ErrorCode::kInvalidArgument,
          "target rate must be positive");
  require(std::floor(target_rate) == target_rate &&
              std::floor(signal.sample_rate()) == signal.sample_rate(),
          ErrorCode::kInvalidArgument, "only integer sample rates are supported");
  if (target_rate == signal.sample_rate()) return signal;
  const Resampler resampler(static_cast<std::int64_t>(signal.sample_rate()),
                            static_cast<std::int64_t>(target_rate));
  std::vector<std::vector<double>> channels;
  for (const auto& ch : signal.channels()) channels.push_back(resampler.process(ch));
  return AudioBuffer(std::move(channels), target_rate);
}

}  // namespace pipscreen::dsp

#endif  // PIPSCREEN_DSP_RESAMPLE_HPP_

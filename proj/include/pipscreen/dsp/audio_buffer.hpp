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

#ifndef PIPSCREEN_DSP_AUDIO_BUFFER_HPP_
#define PIPSCREEN_DSP_AUDIO_BUFFER_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pipscreen/error.hpp"

namespace pipscreen::dsp {

// Multi-channel PCM at full scale (+-1.0). All channels have equal length,
// samples are finite and the sample rate is positive.
class AudioBuffer {
 public:
  AudioBuffer() = default;

  AudioBuffer(std::vector<std::vector<double>> channels, double sample_rate)
      : channels_(std::move(channels)), sample_rate_(sample_rate) {
    validate();
  }

  static AudioBuffer mono(std::vector<double> samples, double sample_rate) {
    std::vector<std::vector<double>> channels;
    channels.push_back(std::move(samples));
    return AudioBuffer(std::move(channels), sample_rate);
  }

  static AudioBuffer zeros(std::size_t channel_count, std::size_t length,
                           double sample_rate) {
    return AudioBuffer(std::vector<std::vector<double>>(
                           channel_count, std::vector<double>(length, 0.0)),
                       sample_rate);
  }

  std::size_t channel_count() const { return channels_.size(); }
  std::size_t length() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  double sample_rate() const { return sample_rate_; }
  double duration() const {
    return static_cast<double>(length()) / sample_rate_;
  }
  bool empty() const { return length() == 0; }

  std::span<const double> channel(std::size_t index) const {
    require(index < channels_.size(), ErrorCode::kInvalidArgument,
            "channel index out of range");
    return channels_[index];
  }
  std::span<double> channel(std::size_t index) {
    require(index < channels_.size(), ErrorCode::kInvalidArgument,
            "channel index out of range");
    return channels_[index];
  }

  const std::vector<std::vector<double>>& channels() const { return channels_; }

  AudioBuffer extract_channel(std::size_t index) const {
    auto samples = channel(index);
    return mono(std::vector<double>(samples.begin(), samples.end()),
                sample_rate_);
  }

  bool operator==(const AudioBuffer&) const = default;

 private:
  void validate() const {
    require(sample_rate_ > 0.0 && std::isfinite(sample_rate_),
            ErrorCode::kInvalidArgument, "sample rate must be positive");
    require(!channels_.empty(), ErrorCode::kInvalidArgument,
            "audio buffer needs at least one channel");
    const std::size_t n = channels_.front().size();
    for (const auto& ch : channels_) {
      require(ch.size() == n, ErrorCode::kDimensionMismatch,
              "all channels must have equal length");
      for (double v : ch) {
        require(std::isfinite(v), ErrorCode::kInvalidArgument,
                "audio samples must be finite");
      }
    }
  }

  std::vector<std::vector<double>> channels_;
  double sample_rate_ = 16000.0;
};

}  // namespace pipscreen::dsp

#endif  // PIPSCREEN_DSP_AUDIO_BUFFER_HPP_

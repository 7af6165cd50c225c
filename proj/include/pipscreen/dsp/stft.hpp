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

#ifndef PIPSCREEN_DSP_STFT_HPP_
#define PIPSCREEN_DSP_STFT_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/fft.hpp"
#include "pipscreen/error.hpp"

namespace pipscreen::dsp {

enum class Window { kHann, kHamming, kRectangular };

// Periodic window of the given length.
inline std::vector<double> make_window(Window kind, std::size_t length) {
  std::vector<double> w(length, 1.0);
  const double n = static_cast<double>(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
    switch (kind) {
      case Window::kHann: w[i] = 0.5 - 0.5 * std::cos(phase); break;
      case Window::kHamming: w[i] = 0.54 - 0.46 * std::cos(phase); break;
      case Window::kRectangular: break;
    }
  }
  return w;
}

struct StftParams {
  std::size_t window_length = 512;
  std::size_t hop = 256;
  std::size_t fft_size = 512;
  Window window = Window::kHann;

  std::size_t bin_count() const { return fft_size / 2 + 1; }

  // Throws unless hop <= window_length <= fft_size and the window/hop pair
  // overlap-adds to a constant.
  void validate() const {
    require(hop >= 1 && hop <= window_length && window_length <= fft_size,
            ErrorCode::kInvalidArgument,
            "STFT params need 1 <= hop <= window_length <= fft_size");
    require(fft_size % 2 == 0, ErrorCode::kInvalidArgument,
            "fft_size must be even");
    const auto w = make_window(window, window_length);
    std::vector<double> ola(hop, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) ola[i % hop] += w[i];
    const auto [lo, hi] = std::minmax_element(ola.begin(), ola.end());
    require(*hi > 0.0 && (*hi - *lo) <= 1e-9 * *hi, ErrorCode::kInvalidArgument,
            "window/hop pair violates constant overlap-add");
  }

  bool operator==(const StftParams&) const = default;
};

// T x F grid of complex bins, frame-major. Frame t is centred on input
// sample t * hop.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t frames, StftParams params, double sample_rate,
              std::size_t signal_length)
      : frames_(frames),
        bins_(params.bin_count()),
        data_(frames * params.bin_count()),
        params_(params),
        sample_rate_(sample_rate),
        signal_length_(signal_length) {}

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  const StftParams& params() const { return params_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t signal_length() const { return signal_length_; }

  Complex& at(std::size_t t, std::size_t f) { return data_[t * bins_ + f]; }
  const Complex& at(std::size_t t, std::size_t f) const {
    return data_[t * bins_ + f];
  }
  std::span<Complex> frame(std::size_t t) {
    return std::span<Complex>(data_).subspan(t * bins_, bins_);
  }
  std::span<const Complex> frame(std::size_t t) const {
    return std::span<const Complex>(data_).subspan(t * bins_, bins_);
  }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  bool same_shape(const Spectrogram& other) const {
    return frames_ == other.frames_ && bins_ == other.bins_;
  }

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<Complex> data_;
  StftParams params_;
  double sample_rate_ = 16000.0;
  std::size_t signal_length_ = 0;
};

inline std::size_t frame_count(std::size_t signal_length, std::size_t hop) {
  return signal_length / hop + 1;
}

inline Spectrogram stft(std::span<const double> signal, double sample_rate,
                        const StftParams& params) {
  params.validate();
  require(!signal.empty(), ErrorCode::kInvalidArgument, "empty signal");
  require(signal.size() >= params.window_length, ErrorCode::kInvalidArgument,
          "signal shorter than one window");
  const auto window = make_window(params.window, params.window_length);
  const std::size_t frames = frame_count(signal.size(), params.hop);
  const auto half = static_cast<std::ptrdiff_t>(params.window_length / 2);
  const auto len = static_cast<std::ptrdiff_t>(signal.size());

  Spectrogram spec(frames, params, sample_rate, signal.size());
  std::vector<double> buffer(params.fft_size);
  auto& fft = thread_fft();
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buffer.begin(), buffer.end(), 0.0);
    const auto start = static_cast<std::ptrdiff_t>(t * params.hop) - half;
    for (std::size_t i = 0; i < params.window_length; ++i) {
      const auto n = start + static_cast<std::ptrdiff_t>(i);
      if (n >= 0 && n < len) buffer[i] = signal[n] * window[i];
    }
    const auto bins = fft.forward(buffer);
    std::copy(bins.begin(), bins.end(), spec.frame(t).begin());
  }
  return spec;
}

inline Spectrogram stft(const AudioBuffer& signal, const StftParams& params) {
  require(signal.channel_count() == 1, ErrorCode::kInvalidArgument,
          "stft expects a mono signal");
  return stft(signal.channel(0), signal.sample_rate(), params);
}

// One spectrogram per channel.
inline std::vector<Spectrogram> stft_channels(const AudioBuffer& signal,
                                              const StftParams& params) {
  std::vector<Spectrogram> out;
  out.reserve(signal.channel_count());
  for (std::size_t c = 0; c < signal.channel_count(); ++c) {
    out.push_back(stft(signal.channel(c), signal.sample_rate(), params));
  }
  return out;
}

// Weighted overlap-add with the analysis window, normalised by the summed
// squared-window envelope so istft(stft(x)) == x.
inline AudioBuffer istft(const Spectrogram& spec) {
  const auto& params = spec.params();
  params.validate();
  require(spec.frames() >= 1 && spec.bins() == params.bin_count(),
          ErrorCode::kDimensionMismatch, "inconsistent spectrogram shape");
  require(spec.frames() == frame_count(spec.signal_length(), params.hop),
          ErrorCode::kDimensionMismatch,
          "frame count does not match signal length");
  const auto window = make_window(params.window, params.window_length);
  const auto len = static_cast<std::ptrdiff_t>(spec.signal_length());
  const auto half = static_cast<std::ptrdiff_t>(params.window_length / 2);

  std::vector<double> out(spec.signal_length(), 0.0);
  std::vector<double> envelope(spec.signal_length(), 0.0);
  auto& fft = thread_fft();
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const auto frame = fft.inverse(spec.frame(t), params.fft_size);
    const auto start = static_cast<std::ptrdiff_t>(t * params.hop) - half;
    for (std::size_t i = 0; i < params.window_length; ++i) {
      const auto n = start + static_cast<std::ptrdiff_t>(i);
      if (n < 0 || n >= len) continue;
      out[n] += frame[i] * window[i];
      envelope[n] += window[i] * window[i];
    }
  }
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = envelope[n] > 1e-10 ? out[n] / envelope[n] : 0.0;
  }
  return AudioBuffer::mono(std::move(out), spec.sample_rate());
}

}  // namespace pipscreen::dsp

#endif  // PIPSCREEN_DSP_STFT_HPP_

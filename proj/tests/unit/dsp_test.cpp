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

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/level.hpp"
#include "pipscreen/dsp/resample.hpp"
#include "pipscreen/dsp/stft.hpp"
#include "pipscreen/dsp/wav.hpp"
#include "test_util.hpp"

namespace pipscreen::dsp {
namespace {

using pipscreen::testing::naive_dft;
using pipscreen::testing::random_signal;
using pipscreen::testing::relative_rms_error;
using pipscreen::testing::sine;

constexpr double kRate = 16000.0;

TEST(AudioBuffer, RejectsUnequalChannels) {
  EXPECT_THROW(AudioBuffer({{0.0, 1.0}, {0.0}}, kRate), Error);
}

TEST(AudioBuffer, RejectsNonFinite) {
  EXPECT_THROW(AudioBuffer::mono({0.0, std::nan("")}, kRate), Error);
  EXPECT_THROW(AudioBuffer::mono({0.0}, 0.0), Error);
}

TEST(StftParams, DefaultsAreValid) { EXPECT_NO_THROW(StftParams{}.validate()); }

TEST(StftParams, RejectsBadOrdering) {
  EXPECT_THROW((StftParams{512, 600, 512, Window::kHann}.validate()), Error);
  EXPECT_THROW((StftParams{512, 256, 256, Window::kHann}.validate()), Error);
}

TEST(StftParams, RejectsNonColaPair) {
  EXPECT_THROW((StftParams{512, 300, 512, Window::kHann}.validate()), Error);
  EXPECT_NO_THROW((StftParams{512, 128, 1024, Window::kHann}.validate()));
  EXPECT_NO_THROW((StftParams{400, 200, 512, Window::kHamming}.validate()));
}

TEST(Stft, RejectsShortOrEmptySignal) {
  const std::vector<double> empty;
  EXPECT_THROW(stft(empty, kRate, StftParams{}), Error);
  const std::vector<double> short_signal(100, 0.0);
  EXPECT_THROW(stft(short_signal, kRate, StftParams{}), Error);
}

TEST(Stft, ZeroSignalGivesZeroSpectrogram) {
  const std::vector<double> x(16000, 0.0);
  const auto spec = stft(x, kRate, StftParams{});
  EXPECT_EQ(spec.frames(), 16000u / 256u + 1u);
  EXPECT_EQ(spec.bins(), 257u);
  for (const auto& v : spec.data()) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(Stft, ImpulseAtFrameCentreIsFlat) {
  std::vector<double> x(4096, 0.0);
  x[0] = 1.0;  // frame 0 is centred on sample 0
  const StftParams params;
  const auto spec = stft(x, kRate, params);
  const double centre = make_window(params.window, params.window_length)[256];
  for (std::size_t f = 0; f < spec.bins(); ++f) {
    EXPECT_NEAR(std::abs(spec.at(0, f)), centre, 1e-12);
  }
}

TEST(Stft, MatchesDirectDftAndConcentratesSine) {
  const StftParams params;
  const auto x = sine(16000, 1000.0, kRate);
  const auto spec = stft(x, kRate, params);
  const auto window = make_window(params.window, params.window_length);
  // Interior frames only: edge frames see zero padding.
  for (std::size_t t = 1; t + 1 < spec.frames(); ++t) {
    std::vector<double> frame(params.fft_size, 0.0);
    const long start = static_cast<long>(t * params.hop) - 256;
    for (std::size_t i = 0; i < params.window_length; ++i) {
      const long n = start + static_cast<long>(i);
      if (n >= 0 && n < static_cast<long>(x.size())) frame[i] = x[n] * window[i];
    }
    if (start + 512 > static_cast<long>(x.size())) continue;
    const auto oracle = naive_dft(frame);
    double total = 0.0, near = 0.0;
    for (std::size_t f = 0; f < oracle.size(); ++f) {
      EXPECT_LT(std::abs(oracle[f] - spec.at(t, f)), 1e-9);
      const double e = std::norm(oracle[f]);
      total += e;
      if (f >= 30 && f <= 34) near += e;
    }
    EXPECT_GE(near / total, 0.99) << "frame " << t;
  }
}

TEST(Stft, RoundTripIsExact) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = random_signal(16000 + 37 * seed, seed);
    const auto y = istft(stft(x, kRate, StftParams{}));
    ASSERT_EQ(y.length(), x.size());
    EXPECT_LT(relative_rms_error(y.channel(0), x), 1e-6);
  }
}

TEST(Stft, RoundTripOtherValidParams) {
  const auto x = random_signal(9000, 11);
  for (const StftParams params : {StftParams{512, 128, 1024, Window::kHann},
                                  StftParams{400, 200, 512, Window::kHamming},
                                  StftParams{256, 256, 256, Window::kRectangular}}) {
    const auto y = istft(stft(x, kRate, params));
    EXPECT_LT(relative_rms_error(y.channel(0), x), 1e-6);
  }
}

TEST(Istft, ZeroSpectrogramGivesZeroSignal) {
  const Spectrogram spec(frame_count(8000, 256), StftParams{}, kRate, 8000);
  const auto y = istft(spec);
  ASSERT_EQ(y.length(), 8000u);
  for (double v : y.channel(0)) EXPECT_EQ(v, 0.0);
}

TEST(Istft, RejectsInconsistentShape) {
  const Spectrogram spec(3, StftParams{}, kRate, 8000);
  EXPECT_THROW(istft(spec), Error);
}

TEST(Stft, IsLinear) {
  const auto x = random_signal(8000, 3);
  const auto y = random_signal(8000, 4);
  const double a = 0.7, b = -1.3;
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = a * x[i] + b * y[i];
  const auto sx = stft(x, kRate, StftParams{});
  const auto sy = stft(y, kRate, StftParams{});
  const auto sz = stft(z, kRate, StftParams{});
  for (std::size_t i = 0; i < sz.data().size(); ++i) {
    EXPECT_LT(std::abs(sz.data()[i] - (a * sx.data()[i] + b * sy.data()[i])), 1e-10);
  }
}

TEST(Stft, ParsevalPerFrame) {
  const StftParams params;
  const auto x = random_signal(6000, 9);
  const auto spec = stft(x, kRate, params);
  const auto window = make_window(params.window, params.window_length);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    double time_energy = 0.0;
    const long start = static_cast<long>(t * params.hop) - 256;
    for (std::size_t i = 0; i < params.window_length; ++i) {
      const long n = start + static_cast<long>(i);
      if (n >= 0 && n < static_cast<long>(x.size())) {
        time_energy += std::pow(x[n] * window[i], 2);
      }
    }
    double freq_energy = 0.0;
    for (std::size_t f = 0; f < spec.bins(); ++f) {
      const double weight = (f == 0 || f + 1 == spec.bins()) ? 1.0 : 2.0;
      freq_energy += weight * std::norm(spec.at(t, f));
    }
    freq_energy /= static_cast<double>(params.fft_size);
    EXPECT_NEAR(freq_energy, time_energy, 1e-6 * time_energy);
  }
}

TEST(Resample, LengthScalesWithRate) {
  const auto x = AudioBuffer::mono(random_signal(1601, 2), kRate);
  const auto y = resample(x, 48000.0);
  EXPECT_NEAR(static_cast<double>(y.length()), 3.0 * 1601.0, 1.0);
  EXPECT_EQ(y.sample_rate(), 48000.0);
}

TEST(Resample, RejectsNonPositiveRate) {
  const auto x = AudioBuffer::mono(random_signal(100, 2), kRate);
  EXPECT_THROW(resample(x, 0.0), Error);
  EXPECT_THROW(resample(x, -16000.0), Error);
}

TEST(Resample, KeepsSineFrequency) {
  const auto x = AudioBuffer::mono(sine(16000, 1000.0, kRate, 0.5), kRate);
  const auto y = resample(x, 48000.0);
  // 4800-sample excerpt: 10 Hz bins, 1 kHz at bin 100.
  std::vector<double> excerpt(y.channel(0).begin() + 20000,
                              y.channel(0).begin() + 24800);
  const auto spectrum = naive_dft(excerpt);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    if (std::abs(spectrum[k]) > std::abs(spectrum[peak])) peak = k;
  }
  EXPECT_NEAR(static_cast<double>(peak), 100.0, 1.0);
}

TEST(Resample, BandLimitedRoundTrip) {
  // White noise brick-walled to 5 kHz.
  const std::size_t n = 16384;
  auto noise = random_signal(n, 21);
  auto& fft = thread_fft();
  auto spectrum = fft.forward(noise);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (static_cast<double>(k) * kRate / static_cast<double>(n) > 5000.0) spectrum[k] = 0.0;
  }
  const auto band_limited = fft.inverse(spectrum, n);
  const auto x = AudioBuffer::mono(band_limited, kRate);
  const auto y = resample(resample(x, 48000.0), kRate);
  ASSERT_NEAR(static_cast<double>(y.length()), static_cast<double>(n), 1.0);
  // Skip filter edge transients.
  const std::size_t skip = 200;
  std::span<const double> got(y.channel(0).begin() + skip, n - 2 * skip);
  std::span<const double> want(x.channel(0).begin() + skip, n - 2 * skip);
  EXPECT_LT(relative_rms_error(got, want), 1e-3);
}

TEST(Level, KnownLevels) {
  const auto unit = sine(16000, 1000.0, kRate, 1.0);
  const auto half = sine(16000, 1000.0, kRate, 0.5);
  EXPECT_NEAR(*rms_db(unit), -3.0103, 1e-3);
  EXPECT_NEAR(*rms_db(half), -9.0309, 1e-3);
  const std::vector<double> ones(100, 1.0);
  EXPECT_NEAR(*rms_db(ones), 0.0, 1e-12);
}

TEST(Level, SilentIsDistinguished) {
  const auto silent = AudioBuffer::zeros(1, 100, kRate);
  EXPECT_FALSE(rms_db(silent, 0).has_value());
  const std::vector<double> empty;
  EXPECT_THROW(rms_db(empty), Error);
}

TEST(Level, ScaleCovariance) {
  auto x = random_signal(1000, 5);
  const double base = *rms_db(x);
  for (double alpha : {0.01, 0.5, 3.0}) {
    std::vector<double> scaled(x);
    for (auto& v : scaled) v *= alpha;
    EXPECT_NEAR(*rms_db(scaled), base + 20.0 * std::log10(alpha), 1e-10);
  }
}

TEST(Wav, FloatRoundTripIsExact) {
  std::vector<double> a = random_signal(500, 1), b = random_signal(500, 2);
  for (auto* ch : {&a, &b}) {
    for (auto& v : *ch) v = static_cast<float>(v);
  }
  const AudioBuffer audio({a, b}, 48000.0);
  const auto back = decode_wav(encode_wav(audio, WavFormat::kFloat32));
  EXPECT_EQ(back, audio);
}

TEST(Wav, Pcm16QuantisesWithinOneStep) {
  const auto audio = AudioBuffer::mono(sine(1000, 440.0, kRate, 0.9), kRate);
  const auto path = std::filesystem::temp_directory_path() / "pipscreen_pcm16.wav";
  write_wav(path, audio, WavFormat::kPcm16);
  const auto back = read_wav(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.length(), audio.length());
  EXPECT_EQ(back.sample_rate(), kRate);
  for (std::size_t i = 0; i < audio.length(); ++i) {
    EXPECT_NEAR(back.channel(0)[i], audio.channel(0)[i], 1.0 / 32767.0);
  }
}

TEST(Wav, RejectsGarbage) {
  EXPECT_THROW(decode_wav({'n', 'o', 'p', 'e'}), Error);
}

}  // namespace
}  // namespace pipscreen::dsp

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

#ifndef PIPSCREEN_SCENE_SPEECH_LIKE_HPP_
#define PIPSCREEN_SCENE_SPEECH_LIKE_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "pipscreen/dsp/audio_buffer.hpp"
#include "pipscreen/dsp/level.hpp"

namespace pipscreen::scene {

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline void one_pole_lowpass(std::span<double> x, double cutoff_hz, double rate) {
  const double a = std::exp(-2.0 * std::numbers::pi * cutoff_hz / rate);
  double state = 0.0;
  for (auto& v : x) {
    state = (1.0 - a) * v + a * state;
    v = state;
  }
}

inline void one_pole_highpass(std::span<double> x, double cutoff_hz, double rate) {
  const double a = std::exp(-2.0 * std::numbers::pi * cutoff_hz / rate);
  double prev_in = 0.0, prev_out = 0.0;
  for (auto& v : x) {
    const double out = a * (prev_out + v - prev_in);
    prev_in = v;
    prev_out = out;
    v = out;
  }
}

// Two-pole resonator with unity peak gain at the centre frequency.
inline void resonator(std::span<double> x, double centre_hz, double bandwidth_hz,
                      double rate) {
  const double r = std::exp(-std::numbers::pi * bandwidth_hz / rate);
  const double theta = 2.0 * std::numbers::pi * centre_hz / rate;
  const double a1 = -2.0 * r * std::cos(theta);
  const double a2 = r * r;
  const double gain = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
  double y1 = 0.0, y2 = 0.0;
  for (auto& v : x) {
    const double y = gain * v - a1 * y1 - a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

inline void normalize_rms(std::span<double> x, double target_dbfs) {
  const double r = dsp::rms(x);
  if (r == 0.0) return;
  const double g = dsp::amplitude_from_db(target_dbfs) / r;
  for (auto& v : x) v *= g;
}

// Speech-shaped noise gated by a random syllabic envelope: Hann-shaped
// syllables of 120-280 ms separated by short gaps and occasional pauses.
inline std::vector<double> talker_stream(std::size_t length, std::uint64_t seed,
                                         double rate) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> x(length);
  for (auto& v : x) v = gauss(rng);
  one_pole_highpass(x, 150.0, rate);
  one_pole_lowpass(x, 1000.0, rate);

  std::vector<double> envelope(length, 0.0);
  auto pos = static_cast<std::size_t>(uni(rng) * 0.3 * rate);
  while (pos < length) {
    const auto syllable = static_cast<std::size_t>((0.12 + 0.16 * uni(rng)) * rate);
    const double level = std::pow(10.0, (uni(rng) - 0.5) * 12.0 / 20.0);
    for (std::size_t i = 0; i < syllable && pos + i < length; ++i) {
      const double phase = static_cast<double>(i) / static_cast<double>(syllable);
      envelope[pos + i] = level * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * phase));
    }
    double gap = 0.03 + 0.12 * uni(rng);
    if (uni(rng) < 0.15) gap += 0.2 + 0.4 * uni(rng);
    pos += syllable + static_cast<std::size_t>(gap * rate);
  }
  for (std::size_t i = 0; i < length; ++i) x[i] *= envelope[i];
  normalize_rms(x, 0.0);
  return x;
}

// Synthetic four-mora "word": each mora is a short noise burst followed by a
// voiced vowel (harmonic complex through two formant resonators) with a
// falling F0 contour. Deterministic in word_id.
inline dsp::AudioBuffer synth_word(std::string_view word_id, double rate = 16000.0) {
  struct Vowel {
    double f1, f2;
  };
  constexpr std::array<Vowel, 5> kVowels = {
      {{800, 1200}, {300, 2300}, {350, 1400}, {500, 1900}, {500, 900}}};
  std::mt19937_64 rng(fnv1a(word_id));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> out;
  const double f0_start = 110.0 + 30.0 * uni(rng);
  double phase = 0.0;
  for (int mora = 0; mora < 4; ++mora) {
    const auto burst = static_cast<std::size_t>((0.02 + 0.03 * uni(rng)) * rate);
    std::vector<double> consonant(burst);
    for (auto& v : consonant) v = 0.3 * gauss(rng);
    one_pole_highpass(consonant, 2000.0 + 2000.0 * uni(rng), rate);

    const auto voiced = static_cast<std::size_t>((0.11 + 0.05 * uni(rng)) * rate);
    const Vowel vowel = kVowels[static_cast<std::size_t>(uni(rng) * kVowels.size()) % kVowels.size()];
    std::vector<double> vowel_part(voiced, 0.0);
    for (std::size_t i = 0; i < voiced; ++i) {
      const double progress = (mora * 1.0 + static_cast<double>(i) / voiced) / 4.0;
      const double f0 = f0_start * (1.0 - 0.2 * progress);
      phase += 2.0 * std::numbers::pi * f0 / rate;
      double sample = 0.0;
      for (int k = 1; k * f0 < 0.45 * rate && k <= 40; ++k) {
        sample += std::sin(k * phase) / k;
      }
      const double ramp = std::sin(std::numbers::pi * static_cast<double>(i) / voiced);
      vowel_part[i] = sample * ramp;
    }
    std::vector<double> f1(vowel_part), f2(vowel_part);
    resonator(f1, vowel.f1, 90.0, rate);
    resonator(f2, vowel.f2, 120.0, rate);
    for (std::size_t i = 0; i < voiced; ++i) vowel_part[i] = f1[i] + 0.5 * f2[i];

    out.insert(out.end(), consonant.begin(), consonant.end());
    out.insert(out.end(), vowel_part.begin(), vowel_part.end());
  }
  normalize_rms(out, -20.0);
  return dsp::AudioBuffer::mono(std::move(out), rate);
}

}  // namespace pipscreen::scene

#endif  // PIPSCREEN_SCENE_SPEECH_LIKE_HPP_

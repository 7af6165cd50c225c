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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "pipscreen/dsp/level.hpp"
#include "pipscreen/scene/babble.hpp"
#include "pipscreen/scene/impulse_response.hpp"
#include "pipscreen/scene/manifest.hpp"
#include "pipscreen/scene/observation.hpp"
#include "pipscreen/scene/speech_like.hpp"
#include "test_util.hpp"

namespace pipscreen::scene {
namespace {

using pipscreen::testing::naive_dft;

constexpr double kRate = 16000.0;

// Inter-channel delay (channel 2 relative to channel 1) from the phase of the
// cross-spectrum at a low frequency bin.
double phase_delay(const dsp::AudioBuffer& ir) {
  const std::size_t n = 256;
  std::vector<double> a(n, 0.0), b(n, 0.0);
  for (std::size_t i = 0; i < std::min(n, ir.length()); ++i) {
    a[i] = ir.channel(0)[i];
    b[i] = ir.channel(1)[i];
  }
  const std::size_t k = 4;
  const auto fa = naive_dft(a);
  const auto fb = naive_dft(b);
  const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
  return -std::arg(fb[k] / fa[k]) / omega;
}

TEST(SynthIr, BroadsideHasNoInterChannelDelay) {
  const auto ir = synth_ir(preset_position(5), 4.0, 0.0, 1);
  EXPECT_NEAR(phase_delay(ir), 0.0, 1e-9);
  for (std::size_t i = 0; i < ir.length(); ++i) {
    EXPECT_EQ(ir.channel(0)[i], ir.channel(1)[i]);
  }
}

TEST(SynthIr, ThirtyDegreesGivesFractionalDelay) {
  const double expected = 0.04 * 0.5 / 343.0 * kRate;  // 0.933 samples
  EXPECT_NEAR(expected, 0.9329, 1e-4);
  const auto ir = synth_ir(preset_position(8), 4.0, 0.0, 1);
  EXPECT_NEAR(phase_delay(ir), expected, 1e-3);
  const auto mirrored = synth_ir(preset_position(2), 4.0, 0.0, 1);
  EXPECT_NEAR(phase_delay(mirrored), -expected, 1e-3);
}

TEST(SynthIr, ZeroReverbIsDirectPathOnly) {
  const auto position = preset_position(7);
  const auto ir = synth_ir(position, 4.0, 0.0, 3);
  const auto path = direct_path(position, 4.0, kRate);
  std::vector<double> expected1(ir.length(), 0.0), expected2(ir.length(), 0.0);
  add_fractional_impulse(expected1, path.delay1, path.gain);
  add_fractional_impulse(expected2, path.delay2, path.gain);
  for (std::size_t i = 0; i < ir.length(); ++i) {
    EXPECT_EQ(ir.channel(0)[i], expected1[i]);
    EXPECT_EQ(ir.channel(1)[i], expected2[i]);
  }
}

TEST(SynthIr, TailDecaysSixtyDbAtReverbTime) {
  const double rt = 0.36;
  const auto ir = synth_ir(preset_position(5), 4.0, rt, 5);
  const auto with_direct = direct_path(preset_position(5), 4.0, kRate);
  const auto tail_start = static_cast<std::size_t>(std::ceil(with_direct.delay2)) + 1;
  // Windows far from the direct path so only the tail contributes.
  const std::size_t half = 400;
  const std::size_t c1 = tail_start + 600;
  const std::size_t c2 = c1 + static_cast<std::size_t>(rt * kRate) - 1300;
  const auto window_energy = [&](std::size_t c) {
    return dsp::energy(ir.channel(0).subspan(c - half, 2 * half));
  };
  const double decay_per_sample = 60.0 / (rt * kRate);
  const double expected_db = -decay_per_sample * static_cast<double>(c2 - c1);
  EXPECT_NEAR(10.0 * std::log10(window_energy(c2) / window_energy(c1)), expected_db, 1.5);
}

TEST(SynthIr, RejectsBadGeometry) {
  EXPECT_THROW(synth_ir({0.0, -5.0, 0}, 4.0, 0.3, 1), Error);
  EXPECT_THROW(synth_ir(preset_position(1), 0.0, 0.3, 1), Error);
  EXPECT_THROW(synth_ir(preset_position(1), 4.0, -0.1, 1), Error);
}

TEST(Positions, TwelvePresets) {
  EXPECT_EQ(kPresetPositions.size(), 12u);
  EXPECT_EQ(preset_position(10).azimuth_deg, 90.0);
  EXPECT_EQ(preset_position(12).distance_cm, 90.0);
  EXPECT_THROW(preset_position(13), Error);
}

double envelope_depth_db(std::span<const double> x) {
  const std::size_t w = 320;  // 20 ms
  std::vector<double> levels;
  for (std::size_t i = 0; i + w <= x.size(); i += w) {
    const double r = dsp::rms(x.subspan(i, w));
    levels.push_back(20.0 * std::log10(r + 1e-12));
  }
  double mean = 0.0;
  for (double l : levels) mean += l;
  mean /= static_cast<double>(levels.size());
  double var = 0.0;
  for (double l : levels) var += (l - mean) * (l - mean);
  return std::sqrt(var / static_cast<double>(levels.size() - 1));
}

TEST(Babble, DeterministicPerSeed) {
  const auto a = synth_babble(1.0, 4, 42);
  const auto b = synth_babble(1.0, 4, 42);
  EXPECT_EQ(a, b);
  const auto c = synth_babble(1.0, 4, 43);
  EXPECT_NE(a, c);
}

TEST(Babble, ManyTalkersModulateLess) {
  const auto one = synth_babble(4.0, 1, 7);
  const auto many = synth_babble(4.0, 32, 7);
  EXPECT_LT(envelope_depth_db(many.channel(0)), envelope_depth_db(one.channel(0)));
}

TEST(Babble, NormalisedLevel) {
  const auto b = synth_babble(2.0, 8, 3);
  const double power = (dsp::energy(b.channel(0)) + dsp::energy(b.channel(1))) /
                       (2.0 * static_cast<double>(b.length()));
  EXPECT_NEAR(10.0 * std::log10(power), -20.0, 1e-9);
  EXPECT_EQ(b.length(), 32000u);
}

TEST(Babble, ChannelsCorrelatedButDistinct) {
  const auto b = synth_babble(2.0, 8, 11);
  const auto x = b.channel(0), y = b.channel(1);
  const double norm = std::sqrt(dsp::energy(x) * dsp::energy(y));
  double best = 0.0;
  for (int lag = -8; lag <= 8; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 8; i + 8 < x.size(); ++i) acc += x[i] * y[i + lag];
    best = std::max(best, std::abs(acc) / norm);
  }
  EXPECT_GT(best, 0.0);
  EXPECT_LT(best, 1.0);
  EXPECT_GT(best, 0.3);
}

TEST(Babble, RejectsNoTalkers) { EXPECT_THROW(synth_babble(1.0, 0, 1), Error); }

class ObservationTest : public ::testing::Test {
 protected:
  void SetUp() override {
    clean_ = synth_word("w0001");
    babble_ = synth_babble(6.0, 8, 99);
  }
  dsp::AudioBuffer clean_;
  dsp::AudioBuffer babble_;
};

TEST_F(ObservationTest, SnrIsExactOnGrid) {
  for (double snr : kSnrGrid) {
    SceneConfig config;
    config.snr_db = snr;
    config.seed = 17;
    const auto obs = build_scene(clean_, babble_, config);
    EXPECT_NEAR(measured_snr_db(obs), snr, 0.01);
    EXPECT_NEAR(measured_snr_db(obs), snr, 1e-9);
  }
}

TEST_F(ObservationTest, DecompositionInvariant) {
  SceneConfig config;
  config.snr_db = -9.0;
  config.position = preset_position(9);
  const auto obs = build_scene(clean_, babble_, config);
  ASSERT_EQ(obs.mixture.length(), obs.speech_image.length());
  ASSERT_EQ(obs.mixture.length(), obs.noise_image.length());
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < obs.mixture.length(); ++i) {
      EXPECT_NEAR(obs.mixture.channel(c)[i] - obs.speech_image.channel(c)[i] -
                      obs.noise_image.channel(c)[i],
                  0.0, 1e-9);
    }
  }
}

TEST_F(ObservationTest, ThreeDbStepScalesNoiseEnergy) {
  SceneConfig config;
  config.seed = 5;
  config.snr_db = 0.0;
  const auto a = build_scene(clean_, babble_, config);
  config.snr_db = -3.0;
  const auto b = build_scene(clean_, babble_, config);
  const double ratio = dsp::energy(b.noise_image.channel(0)) / dsp::energy(a.noise_image.channel(0));
  EXPECT_NEAR(ratio, std::pow(10.0, 0.3), 1e-12);
}

TEST_F(ObservationTest, Deterministic) {
  SceneConfig config;
  config.seed = 23;
  config.snr_db = 3.0;
  const auto a = build_scene(clean_, babble_, config);
  const auto b = build_scene(clean_, babble_, config);
  EXPECT_EQ(a.mixture, b.mixture);
  EXPECT_EQ(a.noise_image, b.noise_image);
}

TEST_F(ObservationTest, NoisePaddingPrecedesSpeech) {
  SceneConfig config;
  const auto obs = build_scene(clean_, babble_, config);
  EXPECT_GE(obs.span.begin, 4608u);
  EXPECT_GT(obs.mixture.length(), clean_.length() + 2 * 4608);
}

TEST(MakeObservation, EqualEnergyAtZeroDb) {
  const auto clean = dsp::AudioBuffer::mono({1.0, -1.0, 1.0, -1.0}, kRate);
  const dsp::AudioBuffer ir({{1.0}, {1.0}}, kRate);
  const dsp::AudioBuffer noise({{0.5, 0.5, 0.5, 0.5}, {0.1, 0.2, 0.3, 0.4}}, kRate);
  const auto obs = make_observation(clean, ir, noise, 0.0);
  EXPECT_NEAR(dsp::energy(obs.noise_image.channel(0)), dsp::energy(obs.speech_image.channel(0)),
              1e-12);
  EXPECT_NEAR(obs.noise_image.channel(0)[0], 1.0, 1e-12);
}

TEST(MakeObservation, RejectsSilentNoise) {
  const auto clean = dsp::AudioBuffer::mono({1.0, 0.5}, kRate);
  const dsp::AudioBuffer ir({{1.0}, {1.0}}, kRate);
  const auto noise = dsp::AudioBuffer::zeros(2, 2, kRate);
  try {
    make_observation(clean, ir, noise, 0.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSilentSignal);
  }
}

TEST(MakeObservation, RejectsSilentCleanAndShortNoise) {
  const dsp::AudioBuffer ir({{1.0, 0.5}, {1.0, 0.5}}, kRate);
  const dsp::AudioBuffer noise({{1.0, 1.0}, {1.0, 1.0}}, kRate);
  EXPECT_THROW(make_observation(dsp::AudioBuffer::zeros(1, 2, kRate), ir, noise, 0.0), Error);
  EXPECT_THROW(make_observation(dsp::AudioBuffer::mono({1.0, 1.0}, kRate), ir, noise, 0.0),
               Error);
}

TEST(SceneConfig, RejectsOffGridUnlessAllowed) {
  SceneConfig config;
  config.snr_db = 1.5;
  EXPECT_THROW(config.validate(), Error);
  config.allow_off_grid = true;
  EXPECT_NO_THROW(config.validate());
}

TEST(Manifest, JsonRoundTripAndErrors) {
  auto m = grid_manifest({"w0001", "w0002"}, {-9.0, 3.0}, 5, 7);
  ASSERT_EQ(m.scenes.size(), 4u);
  EXPECT_EQ(m.scenes[0].mixture, "mixture/w0001_snrm09.wav");
  EXPECT_EQ(m.scenes[1].mixture, "mixture/w0001_snrp03.wav");
  const auto back = manifest_from_json(to_json(m));
  EXPECT_EQ(to_json(back), to_json(m));

  auto bad = to_json(m);
  bad["scenes"][1].erase("snr_db");
  try {
    manifest_from_json(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("scenes[1].snr_db"), std::string::npos);
  }
}

TEST(SynthWord, DeterministicAndWordLength) {
  const auto a = synth_word("w0420");
  EXPECT_EQ(a, synth_word("w0420"));
  EXPECT_NE(a, synth_word("w0421"));
  EXPECT_GT(a.duration(), 0.5);
  EXPECT_LT(a.duration(), 0.9);
  EXPECT_NEAR(*dsp::rms_db(a, 0), -20.0, 1e-9);
}

}  // namespace
}  // namespace pipscreen::scene

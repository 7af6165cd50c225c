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
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "pipscreen/dsp/level.hpp"
#include "pipscreen/enhance/beamformer.hpp"
#include "pipscreen/enhance/enhance.hpp"
#include "pipscreen/enhance/mask.hpp"
#include "pipscreen/scene/babble.hpp"
#include "pipscreen/scene/observation.hpp"
#include "pipscreen/scene/speech_like.hpp"
#include "test_util.hpp"

namespace pipscreen::enhance {
namespace {

using pipscreen::testing::random_signal;
using pipscreen::testing::relative_rms_error;

constexpr double kRate = 16000.0;

dsp::Spectrogram filled(std::size_t frames, std::size_t bins, Complex value) {
  dsp::StftParams params;
  params.fft_size = 2 * (bins - 1);
  params.window_length = params.fft_size;
  params.hop = params.fft_size / 2;
  dsp::Spectrogram spec(frames, params, kRate, (frames - 1) * params.hop);
  for (auto& v : spec.data()) v = value;
  return spec;
}

Vector2c random_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Vector2c(Complex(g(rng), g(rng)), Complex(g(rng), g(rng)));
}

Matrix2c random_psd(std::mt19937_64& rng) {
  Matrix2c b;
  b.col(0) = random_vector(rng);
  b.col(1) = random_vector(rng);
  return b * b.adjoint();
}

TEST(ComputeIrm, WorkedValues) {
  const auto s = filled(2, 3, Complex(1.0, 1.0));
  EXPECT_NEAR(compute_irm(s, filled(2, 3, Complex(-1.0, 1.0))).at(0, 0), 0.70711, 1e-5);
  EXPECT_EQ(compute_irm(s, filled(2, 3, 0.0)).at(1, 2), 1.0);
  EXPECT_NEAR(compute_irm(filled(2, 3, 1.0), filled(2, 3, std::sqrt(3.0))).at(0, 1), 0.5, 1e-15);
  EXPECT_EQ(compute_irm(filled(2, 3, 0.0), filled(2, 3, 0.0)).at(0, 0), 0.0);
}

TEST(ComputeIrm, RejectsShapeMismatch) {
  EXPECT_THROW(compute_irm(filled(2, 3, 1.0), filled(3, 3, 1.0)), Error);
}

TEST(ComputeIrm, RangeAndComplementarity) {
  const auto s = dsp::stft(random_signal(4000, 1), kRate, {});
  const auto v = dsp::stft(random_signal(4000, 2), kRate, {});
  const auto m = compute_irm(s, v);
  const auto m_noise = compute_irm(v, s);
  for (std::size_t i = 0; i < m.values().size(); ++i) {
    const double a = m.values()[i], b = m_noise.values()[i];
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_NEAR(a * a + b * b, 1.0, 1e-12);
  }
}

TEST(ApplyMask, OnesZerosAndDistributivity) {
  const auto s = dsp::stft(random_signal(4000, 3), kRate, {});
  const auto v = dsp::stft(random_signal(4000, 4), kRate, {});
  const auto ones = apply_mask(Mask::ones(s.frames(), s.bins()), s);
  const auto zeros = apply_mask(Mask(s.frames(), s.bins(), 0.0, MaskKind::kCustom), s);
  dsp::Spectrogram x = s;
  for (std::size_t i = 0; i < x.data().size(); ++i) x.data()[i] += v.data()[i];
  const auto m = compute_irm(s, v);
  const auto mx = apply_mask(m, x);
  const auto ms = apply_mask(m, s);
  const auto mv = apply_mask(m, v);
  for (std::size_t i = 0; i < s.data().size(); ++i) {
    EXPECT_EQ(ones.data()[i], s.data()[i]);
    EXPECT_EQ(std::abs(zeros.data()[i]), 0.0);
    EXPECT_LT(std::abs(mx.data()[i] - (ms.data()[i] + mv.data()[i])), 1e-12);
  }
  EXPECT_THROW(apply_mask(Mask::ones(1, s.bins()), s), Error);
}

TEST(ApplyMask, OnesMaskRoundTripIsIdentity) {
  const auto x = random_signal(8000, 5);
  const auto spec = dsp::stft(x, kRate, {});
  const auto y = dsp::istft(apply_mask(Mask::ones(spec.frames(), spec.bins()), spec));
  EXPECT_LT(relative_rms_error(y.channel(0), x), 1e-6);
}

TEST(EstMask, NoisePeriodsByFrameCentre) {
  const dsp::StftParams params;
  const std::size_t frames = 100;
  const auto mask = est_mask(frames, params, 288.0, kRate);
  // Oracle: integer frame-centre arithmetic, 288 ms = 4608 samples.
  const std::size_t period = 288 * 16;
  const std::size_t span = (frames - 1) * 256;
  std::size_t zero_frames_at_start = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t centre = t * 256;
    const bool expected_zero = centre < period || span - centre < period;
    if (centre < period) ++zero_frames_at_start;
    for (std::size_t f = 0; f < mask.bins(); ++f) {
      EXPECT_EQ(mask.at(t, f), expected_zero ? 0.0 : 1.0);
    }
  }
  EXPECT_EQ(zero_frames_at_start, 18u);
  EXPECT_EQ(mask.at(17, 0), 0.0);
  EXPECT_EQ(mask.at(18, 0), 1.0);
}

TEST(EstMask, ZeroPeriodIsAllOnes) {
  const auto mask = est_mask(10, {}, 0.0);
  for (double v : mask.values()) EXPECT_EQ(v, 1.0);
}

TEST(EstMask, SymmetricUnderFrameReversal) {
  for (std::size_t frames : {40u, 41u, 57u}) {
    const auto mask = est_mask(frames, {}, 288.0);
    for (std::size_t t = 0; t < frames; ++t) {
      EXPECT_EQ(mask.at(t, 0), mask.at(frames - 1 - t, 0));
    }
  }
}

TEST(EstMask, RejectsShortUtterance) {
  EXPECT_THROW(est_mask(30, {}, 288.0), Error);
}

TEST(EstimateScms, MaskExtremes) {
  const auto a = dsp::stft(random_signal(4000, 6), kRate, {});
  const auto b = dsp::stft(random_signal(4000, 7), kRate, {});
  const std::vector<dsp::Spectrogram> x = {a, b};
  const auto all_speech = estimate_scms(Mask::ones(a.frames(), a.bins()), x);
  const auto all_noise = estimate_scms(Mask(a.frames(), a.bins(), 0.0, MaskKind::kCustom), x);
  for (std::size_t f = 0; f < a.bins(); ++f) {
    EXPECT_EQ(all_speech.noise[f].norm(), 0.0);
    EXPECT_EQ(all_noise.speech[f].norm(), 0.0);
    EXPECT_LT((all_speech.speech[f] - all_noise.noise[f]).norm(), 1e-15);
  }
}

TEST(EstimateScms, SingleFrameOuterProduct) {
  auto a = filled(1, 2, Complex(1.0, 2.0));
  auto b = filled(1, 2, Complex(-0.5, 0.25));
  const auto bank = estimate_scms(Mask::ones(1, 2), {a, b});
  // x x^H by hand for x = [1+2i, -0.5+0.25i].
  EXPECT_EQ(bank.speech[0](0, 0), Complex(5.0, 0.0));
  EXPECT_EQ(bank.speech[0](0, 1), Complex(1.0, 2.0) * Complex(-0.5, -0.25));
  EXPECT_EQ(bank.speech[0](1, 0), Complex(-0.5, 0.25) * Complex(1.0, -2.0));
  EXPECT_EQ(bank.speech[0](1, 1), Complex(0.3125, 0.0));
}

TEST(EstimateScms, HermitianAndPsd) {
  const auto a = dsp::stft(random_signal(6000, 8), kRate, {});
  const auto b = dsp::stft(random_signal(6000, 9), kRate, {});
  const auto mask = compute_irm(a, b);
  const auto bank = estimate_scms(mask, {a, b});
  for (const auto* set : {&bank.speech, &bank.noise}) {
    for (const auto& r : *set) {
      EXPECT_LT((r - r.adjoint()).norm(), 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix2c> eig(r);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
    }
  }
  EXPECT_THROW(estimate_scms(Mask::ones(1, 1), {a, b}), Error);
  EXPECT_THROW(estimate_scms(mask, {a}), Error);
}

ScmBank single_bin(const Matrix2c& r_s, const Matrix2c& r_v) {
  return ScmBank{{r_s}, {r_v}, 1};
}

TEST(Steering, RecoversRankOneSource) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector2c a = random_vector(rng);
    const auto result = steering_vectors(single_bin(a * a.adjoint(), Matrix2c::Identity()));
    const Vector2c got = result.vectors[0];
    const double cosine = std::abs(got.dot(a)) / (got.norm() * a.norm());
    EXPECT_GT(cosine, 1.0 - 1e-8);
    EXPECT_GE(got(0).real(), 0.0);
    EXPECT_EQ(got(0).imag(), 0.0);
    EXPECT_TRUE(result.flagged.empty());
  }
}

TEST(Steering, TieBreaksToFirstAxis) {
  const auto result = steering_vectors(single_bin(Matrix2c::Identity(), Matrix2c::Identity()));
  const Vector2c got = result.vectors[0];
  EXPECT_EQ(got(1), Complex(0.0, 0.0));
  EXPECT_GT(got(0).real(), 0.0);
}

TEST(Steering, ScaleInvariantDirection) {
  std::mt19937_64 rng(11);
  const Matrix2c r_s = random_psd(rng), r_v = random_psd(rng);
  const Vector2c a = steering_vectors(single_bin(r_s, r_v)).vectors[0];
  const Vector2c b = steering_vectors(single_bin(10.0 * r_s, r_v)).vectors[0];
  EXPECT_LT((a / a.norm() - b / b.norm()).norm(), 1e-10);
}

TEST(Steering, SilentNoiseFallsBackToSpeechEigenvector) {
  const Vector2c a(Complex(0.6, 0.0), Complex(0.0, 0.8));
  const auto result = steering_vectors(single_bin(a * a.adjoint(), Matrix2c::Zero()));
  ASSERT_EQ(result.flagged.size(), 1u);
  EXPECT_LT((result.vectors[0] - a).norm(), 1e-12);
}

TEST(Mvdr, HandEvaluatedWeights) {
  const Vector2c a = Vector2c(1.0, 1.0) / std::sqrt(2.0);
  const auto bf = mvdr_weights({a}, single_bin(Matrix2c::Zero(), Matrix2c::Identity()), 0);
  EXPECT_LT(std::abs(bf.weights[0](0) - 0.5), 1e-12);
  EXPECT_LT(std::abs(bf.weights[0](1) - 0.5), 1e-12);
}

TEST(Mvdr, DistortionlessAndScaleInvariant) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix2c r_v = random_psd(rng);
    const Vector2c a = random_vector(rng);
    const ScmBank bank = single_bin(Matrix2c::Zero(), r_v);
    const auto bf = mvdr_weights({a}, bank, 0);
    const Complex response = bf.weights[0].dot(a);  // w^H a
    EXPECT_LT(std::abs(response - a(0)), 1e-10 * std::abs(a(0)));
    const Complex alpha(g(rng), g(rng));
    const auto scaled = mvdr_weights({alpha * a}, bank, 0);
    EXPECT_LT((scaled.weights[0] - bf.weights[0]).norm(), 1e-12 * bf.weights[0].norm());
  }
}

TEST(Mvdr, ZeroSteeringPassesThrough) {
  const auto bf = mvdr_weights({Vector2c::Zero()},
                               single_bin(Matrix2c::Zero(), Matrix2c::Identity()), 1);
  ASSERT_EQ(bf.flagged.size(), 1u);
  EXPECT_EQ(bf.weights[0], Vector2c(0.0, 1.0));
}

TEST(Beamform, PassThroughPureSourceAndLinearity) {
  const auto a = dsp::stft(random_signal(4000, 13), kRate, {});
  const auto b = dsp::stft(random_signal(4000, 14), kRate, {});
  Beamformer pass{{}, std::vector<Vector2c>(a.bins(), Vector2c(1.0, 0.0)), 0, {}};
  const auto y = beamform(pass, {a, b});
  for (std::size_t i = 0; i < a.data().size(); ++i) EXPECT_EQ(y.data()[i], a.data()[i]);

  // Pure source x_tf = a_f c_tf through MVDR weights for steering a_f.
  std::mt19937_64 rng(15);
  const std::size_t bins = a.bins();
  std::vector<Vector2c> steering(bins);
  ScmBank bank{std::vector<Matrix2c>(bins, Matrix2c::Zero()), {}, 1};
  for (std::size_t f = 0; f < bins; ++f) {
    steering[f] = random_vector(rng);
    bank.noise.push_back(random_psd(rng));
  }
  const auto bf = mvdr_weights(steering, bank, 0);
  dsp::Spectrogram x0 = a, x1 = a;
  for (std::size_t t = 0; t < a.frames(); ++t) {
    for (std::size_t f = 0; f < bins; ++f) {
      x0.at(t, f) = steering[f](0) * a.at(t, f);
      x1.at(t, f) = steering[f](1) * a.at(t, f);
    }
  }
  const auto out = beamform(bf, {x0, x1});
  for (std::size_t t = 0; t < a.frames(); ++t) {
    for (std::size_t f = 0; f < bins; ++f) {
      const Complex want = steering[f](0) * a.at(t, f);
      EXPECT_LE(std::abs(out.at(t, f) - want), 1e-9 * std::abs(want) + 1e-300);
    }
  }

  const auto sum = beamform(bf, {a, b});
  const auto first = beamform(bf, {a, filled(a.frames(), bins, 0.0)});
  const auto second = beamform(bf, {filled(a.frames(), bins, 0.0), b});
  for (std::size_t i = 0; i < sum.data().size(); ++i) {
    EXPECT_LT(std::abs(sum.data()[i] - first.data()[i] - second.data()[i]), 1e-12);
  }
}

class EnhanceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    babble_ = new dsp::AudioBuffer(scene::synth_babble(8.0, 8, 2024));
  }
  static void TearDownTestSuite() { delete babble_; }

  scene::NoisyObservation scene_at(double snr, std::uint64_t seed) const {
    scene::SceneConfig config;
    config.snr_db = snr;
    config.seed = seed;
    return scene::build_scene(scene::synth_word("w" + std::to_string(seed)), *babble_, config);
  }

  static dsp::AudioBuffer* babble_;
};
dsp::AudioBuffer* EnhanceTest::babble_ = nullptr;

TEST_F(EnhanceTest, UnprocessedIsChannelOne) {
  const auto obs = scene_at(-3.0, 1);
  const auto out = enhance(obs, EnhancementMethod::kUnprocessed);
  ASSERT_EQ(out.length(), obs.mixture.length());
  for (std::size_t i = 0; i < out.length(); ++i) EXPECT_EQ(out.channel(0)[i], obs.mixture.channel(0)[i]);
}

TEST_F(EnhanceTest, NoiseFreeIrmReturnsSpeech) {
  auto obs = scene_at(0.0, 2);
  obs.noise_image = dsp::AudioBuffer::zeros(2, obs.mixture.length(), kRate);
  obs.mixture = obs.speech_image;
  const auto out = enhance(obs, EnhancementMethod::kMask1chIrm);
  EXPECT_LT(relative_rms_error(out.channel(0), obs.speech_image.channel(0)), 1e-6);
}

TEST_F(EnhanceTest, ComponentsSumToOutput) {
  const auto obs = scene_at(-6.0, 3);
  for (auto method : kAllMethods) {
    const auto r = enhance_components(obs, method);
    for (std::size_t i = 0; i < r.output.length(); ++i) {
      EXPECT_NEAR(r.output.channel(0)[i],
                  r.speech_component.channel(0)[i] + r.noise_component.channel(0)[i], 1e-9);
    }
    EXPECT_NEAR(r.input_snr_db, -6.0, 1e-9);
  }
}

TEST_F(EnhanceTest, IrmImprovesSnrAtMinusNine) {
  const auto obs = scene_at(-9.0, 4);
  const auto r = enhance_components(obs, EnhancementMethod::kMask1chIrm);
  // Oracle: same mask applied separately to the two images, measured directly.
  const auto s = dsp::stft(obs.speech_image.channel(0), kRate, {});
  const auto v = dsp::stft(obs.noise_image.channel(0), kRate, {});
  const auto m = compute_irm(s, v);
  const auto s_out = dsp::istft(apply_mask(m, s));
  const auto v_out = dsp::istft(apply_mask(m, v));
  const double oracle = scene::span_snr_db(s_out.channel(0), v_out.channel(0), obs.span);
  EXPECT_NEAR(r.output_snr_db, oracle, 1e-9);
  EXPECT_GT(r.output_snr_db, -9.0 + 3.0);
}

TEST_F(EnhanceTest, BeamformersAreDistortionlessPerBin) {
  const auto obs = scene_at(0.0, 5);
  for (auto method : {EnhancementMethod::kMvdr2chIrm, EnhancementMethod::kMvdr2chEst}) {
    const auto r = enhance_components(obs, method);
    EXPECT_TRUE(std::isfinite(r.output_snr_db));
    EXPECT_EQ(r.output.length(), obs.mixture.length());
  }
}

TEST_F(EnhanceTest, SidecarFields) {
  const auto obs = scene_at(3.0, 6);
  const auto r = enhance_components(obs, EnhancementMethod::kMvdr2chEst);
  const auto j = sidecar_json(r, "w6");
  EXPECT_EQ(j["method"], "mvdr2ch_est");
  EXPECT_NEAR(j["input_snr_db"].get<double>(), 3.0, 1e-9);
  EXPECT_TRUE(j.contains("oracle_output_snr_db"));
  EXPECT_TRUE(j["flagged_frequencies_hz"].is_array());
}

}  // namespace
}  // namespace pipscreen::enhance

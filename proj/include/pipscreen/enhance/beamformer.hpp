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

#ifndef PIPSCREEN_ENHANCE_BEAMFORMER_HPP_
#define PIPSCREEN_ENHANCE_BEAMFORMER_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pipscreen/dsp/stft.hpp"
#include "pipscreen/enhance/mask.hpp"
#include "pipscreen/error.hpp"

namespace pipscreen::enhance {

using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;
using dsp::Complex;

// Mask-weighted speech and noise spatial covariances, one 2 x 2 matrix per
// frequency bin.
struct ScmBank {
  std::vector<Matrix2c> speech;
  std::vector<Matrix2c> noise;
  std::size_t frame_count = 0;
};

inline ScmBank estimate_scms(const Mask& mask, const std::vector<dsp::Spectrogram>& channels) {
  require(channels.size() == 2, ErrorCode::kInvalidArgument,
          "SCM estimation expects two channels");
  require(channels[0].same_shape(channels[1]) && mask.matches(channels[0]),
          ErrorCode::kDimensionMismatch, "mask and spectrograms differ in shape");
  const std::size_t frames = mask.frames();
  const std::size_t bins = mask.bins();
  ScmBank bank{std::vector<Matrix2c>(bins, Matrix2c::Zero()),
               std::vector<Matrix2c>(bins, Matrix2c::Zero()), frames};
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t f = 0; f < bins; ++f) {
      const Vector2c x(channels[0].at(t, f), channels[1].at(t, f));
      const Matrix2c outer = x * x.adjoint();
      const double m = mask.at(t, f);
      bank.speech[f] += m * outer;
      bank.noise[f] += (1.0 - m) * outer;
    }
  }
  const double inv_t = 1.0 / static_cast<double>(frames);
  for (std::size_t f = 0; f < bins; ++f) {
    bank.speech[f] *= inv_t;
    bank.noise[f] *= inv_t;
  }
  return bank;
}

// Eigenvector of the largest-real-part eigenvalue of a 2 x 2 matrix, from the
// characteristic polynomial. Returns [1, 0] when the eigenvalues tie.
inline Vector2c principal_eigenvector(const Matrix2c& a) {
  const Complex tr = a.trace();
  const Complex det = a.determinant();
  const Complex disc = tr * tr / 4.0 - det;
  if (std::abs(disc) < 1e-12 * std::norm(tr) || std::abs(disc) == 0.0) {
    return Vector2c(1.0, 0.0);
  }
  const Complex root = std::sqrt(disc);
  const Complex l1 = tr / 2.0 + root;
  const Complex l2 = tr / 2.0 - root;
  const Complex lambda = l1.real() >= l2.real() ? l1 : l2;
  const Vector2c from_row0(a(0, 1), lambda - a(0, 0));
  const Vector2c from_row1(lambda - a(1, 1), a(1, 0));
  Vector2c v = from_row0.norm() >= from_row1.norm() ? from_row0 : from_row1;
  const double n = v.norm();
  if (n == 0.0) return Vector2c(1.0, 0.0);
  return v / n;
}

// Rotates v so that v[ref] is real and non-negative.
inline Vector2c fix_phase(const Vector2c& v, std::size_t ref) {
  const double mag = std::abs(v(ref));
  if (mag == 0.0) return v;
  Vector2c out = v * (std::conj(v(ref)) / mag);
  out(ref) = Complex(mag, 0.0);
  return out;
}

inline Matrix2c loaded(const Matrix2c& r_v) {
  const double eps = 1e-6 * r_v.trace().real() / 2.0 + 1e-12;
  return r_v + eps * Matrix2c::Identity();
}

struct SteeringResult {
  std::vector<Vector2c> vectors;
  std::vector<std::size_t> flagged;  // bins that fell back to maxeig(R_s)
};

// a_f = R_v maxeig(R_v^-1 R_s) with R_v diagonally loaded. Bins whose noise
// SCM has no energy fall back to the principal eigenvector of R_s.
inline SteeringResult steering_vectors(const ScmBank& scms, std::size_t ref_channel = 0) {
  require(scms.speech.size() == scms.noise.size(), ErrorCode::kDimensionMismatch,
          "SCM bank is inconsistent");
  SteeringResult result;
  result.vectors.reserve(scms.noise.size());
  for (std::size_t f = 0; f < scms.noise.size(); ++f) {
    const Matrix2c& r_s = scms.speech[f];
    const double noise_power = scms.noise[f].trace().real();
    const Matrix2c r_v = loaded(scms.noise[f]);
    const Complex det = r_v.determinant();
    if (!(noise_power > 0.0) || !std::isfinite(std::abs(det)) || std::abs(det) == 0.0) {
      result.flagged.push_back(f);
      result.vectors.push_back(fix_phase(principal_eigenvector(r_s), ref_channel));
      continue;
    }
    const Vector2c v = principal_eigenvector(r_v.inverse() * r_s);
    result.vectors.push_back(fix_phase(r_v * v, ref_channel));
  }
  return result;
}

struct Beamformer {
  std::vector<Vector2c> steering;
  std::vector<Vector2c> weights;
  std::size_t ref_channel = 0;
  std::vector<std::size_t> flagged;  // bins given pass-through weights
};

// w_f = a_rf^* R_v^-1 a_f / (a_f^H R_v^-1 a_f).
inline Beamformer mvdr_weights(const std::vector<Vector2c>& steering, const ScmBank& scms,
                               std::size_t ref_channel = 0) {
  require(steering.size() == scms.noise.size(), ErrorCode::kDimensionMismatch,
          "steering and SCM bank differ in bin count");
  require(ref_channel < 2, ErrorCode::kInvalidArgument, "reference channel out of range");
  Beamformer bf{steering, {}, ref_channel, {}};
  bf.weights.reserve(steering.size());
  Vector2c pass_through = Vector2c::Zero();
  pass_through(ref_channel) = 1.0;
  for (std::size_t f = 0; f < steering.size(); ++f) {
    const Vector2c& a = steering[f];
    if (a.norm() == 0.0 || !std::isfinite(a.norm())) {
      bf.flagged.push_back(f);
      bf.weights.push_back(pass_through);
      continue;
    }
    const Vector2c b = loaded(scms.noise[f]).inverse() * a;
    const Complex denom = a.dot(b);  // a^H R^-1 a
    if (std::abs(denom) == 0.0 || !std::isfinite(std::abs(denom))) {
      bf.flagged.push_back(f);
      bf.weights.push_back(pass_through);
      continue;
    }
    bf.weights.push_back(std::conj(a(ref_channel)) * b / denom);
  }
  return bf;
}

// y_tf = w_f^H x_tf.
inline dsp::Spectrogram beamform(const Beamformer& bf,
                                 const std::vector<dsp::Spectrogram>& channels) {
  require(channels.size() == 2 && channels[0].same_shape(channels[1]),
          ErrorCode::kDimensionMismatch, "beamform expects two equal-shape channels");
  require(bf.weights.size() == channels[0].bins(), ErrorCode::kDimensionMismatch,
          "weights and spectrogram differ in bin count");
  dsp::Spectrogram out = channels[0];
  for (std::size_t t = 0; t < out.frames(); ++t) {
    for (std::size_t f = 0; f < out.bins(); ++f) {
      const Vector2c& w = bf.weights[f];
      out.at(t, f) = std::conj(w(0)) * channels[0].at(t, f) +
                     std::conj(w(1)) * channels[1].at(t, f);
    }
  }
  return out;
}

}  // namespace pipscreen::enhance

#endif  // PIPSCREEN_ENHANCE_BEAMFORMER_HPP_

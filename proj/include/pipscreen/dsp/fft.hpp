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

#ifndef PIPSCREEN_DSP_FFT_HPP_
#define PIPSCREEN_DSP_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace pipscreen::dsp {

using Complex = std::complex<double>;

// Thin wrapper over Eigen's FFT. Plans are cached per thread, so the free
// functions below are safe to call concurrently.
class RealFft {
 public:
  RealFft() { fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum); }

  // Returns the n/2+1 non-negative frequency bins of a length-n real signal.
  std::vector<Complex> forward(std::span<const double> input) {
    std::vector<double> in(input.begin(), input.end());
    std::vector<Complex> out;
    fft_.fwd(out, in);
    return out;
  }

  // Inverse of forward(); scaled so inverse(forward(x)) == x.
  std::vector<double> inverse(std::span<const Complex> half_spectrum,
                              std::size_t n) {
    std::vector<Complex> in(half_spectrum.begin(), half_spectrum.end());
    std::vector<double> out;
    fft_.inv(out, in, static_cast<Eigen::Index>(n));
    return out;
  }

 private:
  Eigen::FFT<double> fft_;
};

inline RealFft& thread_fft() {
  thread_local RealFft fft;
  return fft;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Full linear convolution, length a.size() + b.size() - 1.
inline std::vector<double> convolve(std::span<const double> a,
                                    std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  if (a.size() <= 64 || b.size() <= 64) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }
  const std::size_t n = next_pow2(out_len);
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  auto& fft = thread_fft();
  auto fa = fft.forward(pa);
  const auto fb = fft.forward(pb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  auto out = fft.inverse(fa, n);
  out.resize(out_len);
  return out;
}

}  // namespace pipscreen::dsp

#endif  // PIPSCREEN_DSP_FFT_HPP_

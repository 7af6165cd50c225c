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

#ifndef PIPSCREEN_PSYCH_FIT_HPP_
#define PIPSCREEN_PSYCH_FIT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pipscreen/error.hpp"
#include "pipscreen/psych/scoring.hpp"

namespace pipscreen::psych {

// Standard normal CDF computed through erfc so both tails keep full relative
// precision.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

struct FitOptions {
  double guess_rate = 0.0;
  double lapse_rate = 0.0;
  double sigma_min = 0.1;
  double sigma_max = 30.0;
  double tolerance = 1e-6;  // simplex diameter
  int max_iterations = 5000;
  int bootstrap_resamples = 0;  // 0 disables the CI
  double ci_level = 0.95;
  std::uint64_t bootstrap_seed = 1;
};

struct PsychFit {
  double mu = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double log_likelihood = -std::numeric_limits<double>::infinity();
  bool converged = false;
  std::string diagnostic;  // empty when the fit is clean
  int iterations = 0;
  std::optional<std::pair<double, double>> ci_mu;
};

// P(correct | snr) under the cumulative-Gaussian model.
inline double psychometric(double snr_db, double mu, double sigma, double guess = 0.0,
                           double lapse = 0.0) {
  return guess + (1.0 - guess - lapse) * normal_cdf((snr_db - mu) / sigma);
}

inline double log_likelihood(std::span<const ConditionCell> cells, double mu, double sigma,
                             double guess = 0.0, double lapse = 0.0) {
  constexpr double kTiny = 1e-300;
  double ll = 0.0;
  for (const auto& c : cells) {
    const double z = (c.snr_db - mu) / sigma;
    const double p = guess + (1.0 - guess - lapse) * normal_cdf(z);
    const double q = lapse + (1.0 - guess - lapse) * normal_cdf(-z);
    if (c.n_correct > 0) ll += c.n_correct * std::log(std::max(p, kTiny));
    if (c.n_trials > c.n_correct) ll += (c.n_trials - c.n_correct) * std::log(std::max(q, kTiny));
  }
  return ll;
}

namespace detail {

using Point = std::array<double, 2>;

struct Box {
  Point lo, hi;
  Point clamp(Point p) const {
    for (int i = 0; i < 2; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
    return p;
  }
};

struct MinimizeResult {
  Point x;
  double f;
  bool converged;
  int iterations;
};

// Nelder-Mead minimisation in two dimensions with every trial point projected
// into the box. Converged when the simplex diameter drops below `tol`.
inline MinimizeResult nelder_mead(const std::function<double(const Point&)>& f, Point start,
                                  Point step, const Box& box, double tol, int max_iter) {
  std::array<Point, 3> v;
  std::array<double, 3> fv;
  v[0] = box.clamp(start);
  v[1] = box.clamp({start[0] + step[0], start[1]});
  v[2] = box.clamp({start[0], start[1] + step[1]});
  if (v[1] == v[0]) v[1] = box.clamp({start[0] - step[0], start[1]});
  if (v[2] == v[0]) v[2] = box.clamp({start[0], start[1] - step[1]});
  for (int i = 0; i < 3; ++i) fv[i] = f(v[i]);

  const auto diameter = [&] {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        d = std::max(d, std::hypot(v[i][0] - v[j][0], v[i][1] - v[j][1]));
      }
    }
    return d;
  };
  const auto lerp = [](const Point& a, const Point& b, double t) {
    return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::array<Point, 3> sv;
    std::array<double, 3> sf;
    for (int i = 0; i < 3; ++i) {
      sv[i] = v[order[i]];
      sf[i] = fv[order[i]];
    }
    v = sv;
    fv = sf;
    if (diameter() < tol) return {v[0], fv[0], true, it};

    const Point centroid = {0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    const Point xr = box.clamp(lerp(centroid, v[2], -1.0));
    const double fr = f(xr);
    if (fr < fv[0]) {
      const Point xe = box.clamp(lerp(centroid, v[2], -2.0));
      const double fe = f(xe);
      if (fe < fr) {
        v[2] = xe;
        fv[2] = fe;
      } else {
        v[2] = xr;
        fv[2] = fr;
      }
      continue;
    }
    if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
      continue;
    }
    const bool outside = fr < fv[2];
    const Point xc = box.clamp(outside ? lerp(centroid, xr, 0.5) : lerp(centroid, v[2], 0.5));
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[2])) {
      v[2] = xc;
      fv[2] = fc;
      continue;
    }
    for (int i = 1; i < 3; ++i) {
      v[i] = lerp(v[0], v[i], 0.5);
      fv[i] = f(v[i]);
    }
  }
  const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
  return {v[static_cast<std::size_t>(best)], fv[static_cast<std::size_t>(best)], false, it};
}

// SNR at which the empirical proportion correct first crosses 0.5, by linear
// interpolation between adjacent SNRs. Falls back to the mid SNR.
inline double empirical_midpoint(std::vector<ConditionCell> cells) {
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.snr_db < b.snr_db; });
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    const double p0 = static_cast<double>(cells[i].n_correct) / cells[i].n_trials;
    const double p1 = static_cast<double>(cells[i + 1].n_correct) / cells[i + 1].n_trials;
    if ((p0 - 0.5) * (p1 - 0.5) <= 0.0 && p0 != p1) {
      return cells[i].snr_db + (0.5 - p0) / (p1 - p0) * (cells[i + 1].snr_db - cells[i].snr_db);
    }
  }
  return 0.5 * (cells.front().snr_db + cells.back().snr_db);
}

inline PsychFit fit_point(std::span<const ConditionCell> cells, const FitOptions& opt) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : cells) {
    lo = std::min(lo, c.snr_db);
    hi = std::max(hi, c.snr_db);
  }
  const double span = std::max(hi - lo, 1.0);
  const Box box{{lo - 4.0 * span, opt.sigma_min}, {hi + 4.0 * span, opt.sigma_max}};
  const auto objective = [&](const Point& x) {
    return -log_likelihood(cells, x[0], x[1], opt.guess_rate, opt.lapse_rate);
  };

  const double mid = empirical_midpoint({cells.begin(), cells.end()});
  const std::array<Point, 3> starts = {
      Point{mid, std::clamp(0.25 * span, opt.sigma_min, opt.sigma_max)},
      Point{mid, std::clamp(span, opt.sigma_min, opt.sigma_max)},
      Point{0.5 * (lo + hi), std::clamp(0.5 * span, opt.sigma_min, opt.sigma_max)},
  };
  PsychFit fit;
  std::optional<MinimizeResult> best;
  bool all_converged = true;
  int iterations = 0;
  for (const auto& s : starts) {
    const Point step = {0.25 * span, 0.5 * s[1]};
    const auto r = nelder_mead(objective, s, step, box, opt.tolerance, opt.max_iterations);
    iterations += r.iterations;
    if (!best || r.f < best->f) best = r;
    all_converged = all_converged && r.converged;
  }
  fit.mu = best->x[0];
  fit.sigma = best->x[1];
  fit.log_likelihood = -best->f;
  fit.iterations = iterations;
  fit.converged = best->converged;
  if (!best->converged) {
    fit.diagnostic = "iteration limit reached before the simplex converged";
  } else if (best->x[1] <= opt.sigma_min) {
    fit.diagnostic = "sigma at lower bound (responses perfectly separated)";
  } else if (best->x[0] <= box.lo[0] || best->x[0] >= box.hi[0]) {
    fit.converged = false;
    fit.diagnostic = "mu at search bound";
  }
  return fit;
}

}  // namespace detail

// Maximum-likelihood fit of P(correct) = guess + (1 - guess - lapse) *
// Phi((snr - mu) / sigma) to the cells of one condition.
inline PsychFit fit_psychometric(std::span<const ConditionCell> cells,
                                 const FitOptions& options = {}) {
  require(options.sigma_min > 0.0 && options.sigma_min < options.sigma_max,
          ErrorCode::kInvalidArgument, "invalid sigma bounds");
  require(options.guess_rate >= 0.0 && options.lapse_rate >= 0.0 &&
              options.guess_rate + options.lapse_rate < 1.0,
          ErrorCode::kInvalidArgument, "invalid guess/lapse rates");
  std::vector<ConditionCell> used;
  std::set<double> snrs;
  int total = 0, correct = 0;
  for (const auto& c : cells) {
    require(c.n_trials >= 0 && c.n_correct >= 0 && c.n_correct <= c.n_trials,
            ErrorCode::kInvalidArgument, "cell counts out of range");
    if (c.n_trials == 0) continue;
    used.push_back(c);
    snrs.insert(c.snr_db);
    total += c.n_trials;
    correct += c.n_correct;
  }
  require(snrs.size() >= 2, ErrorCode::kInvalidArgument,
          "need at least two SNRs with trials to fit");

  if (correct == 0 || correct == total) {
    PsychFit fit;
    fit.diagnostic = correct == 0 ? "all responses wrong; mu unidentifiable"
                                  : "all responses correct; mu unidentifiable";
    return fit;
  }
  PsychFit fit = detail::fit_point(used, options);

  if (options.bootstrap_resamples > 0 && fit.converged) {
    std::mt19937_64 rng(options.bootstrap_seed);
    std::vector<double> mus;
    std::vector<ConditionCell> resampled = used;
    for (int b = 0; b < options.bootstrap_resamples; ++b) {
      int rc = 0;
      for (std::size_t i = 0; i < used.size(); ++i) {
        std::binomial_distribution<int> draw(
            used[i].n_trials, static_cast<double>(used[i].n_correct) / used[i].n_trials);
        resampled[i].n_correct = draw(rng);
        rc += resampled[i].n_correct;
      }
      if (rc == 0 || rc == total) continue;
      const auto r = detail::fit_point(resampled, options);
      if (r.converged) mus.push_back(r.mu);
    }
    if (mus.size() >= 2) {
      std::sort(mus.begin(), mus.end());
      const double alpha = 0.5 * (1.0 - options.ci_level);
      const auto at = [&](double q) {
        const double pos = q * static_cast<double>(mus.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < mus.size() ? mus[i] + frac * (mus[i + 1] - mus[i]) : mus[i];
      };
      fit.ci_mu = std::make_pair(at(alpha), at(1.0 - alpha));
    }
  }
  return fit;
}

// The speech reception threshold: the SNR where the function crosses 50%.
// With zero guess and lapse rates this is mu; otherwise the 50% point is
// solved from the fitted function.
inline double srt(const PsychFit& fit, const FitOptions& options = {}) {
  require(fit.converged, ErrorCode::kFitNotConverged,
          "SRT requested from a non-converged fit: " + fit.diagnostic);
  if (options.guess_rate == 0.0 && options.lapse_rate == 0.0) return fit.mu;
  const double target = (0.5 - options.guess_rate) / (1.0 - options.guess_rate - options.lapse_rate);
  require(target > 0.0 && target < 1.0, ErrorCode::kInvalidArgument,
          "function never crosses 50% with these guess/lapse rates");
  // Invert Phi by bisection.
  double a = -40.0, b = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    (normal_cdf(m) < target ? a : b) = m;
  }
  return fit.mu + fit.sigma * 0.5 * (a + b);
}

}  // namespace pipscreen::psych

#endif  // PIPSCREEN_PSYCH_FIT_HPP_

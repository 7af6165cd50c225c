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

#ifndef PIPSCREEN_TONEPIP_SCREENING_HPP_
#define PIPSCREEN_TONEPIP_SCREENING_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pipscreen/error.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/records.hpp"
#include "pipscreen/tonepip/levels.hpp"

namespace pipscreen::tonepip {

struct SrtOutlierPolicy {
  std::set<std::string> manual_exclusions;
  bool mad_rule = false;
  double mad_k = 3.0;
};

// Keep iff min_mean_pips <= mean N_pip <= max_mean_pips (both inclusive) and
// the participant is not an SRT outlier.
struct ScreeningRule {
  double min_mean_pips = 9.0;
  double max_mean_pips = 13.0;
  SrtOutlierPolicy outlier;

  static ScreeningRule keep_all() {
    return {-std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), {}};
  }
};

enum class RejectReason { kTooFewPips, kTooManyPips, kSrtOutlier, kMissingTonePip };

inline std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kTooFewPips: return "too_few_pips";
    case RejectReason::kTooManyPips: return "too_many_pips";
    case RejectReason::kSrtOutlier: return "srt_outlier";
    case RejectReason::kMissingTonePip: return "missing_tonepip";
  }
  return "unknown";
}

struct ScreeningDecision {
  std::string participant_id;
  std::map<int, int> n_pip;  // frequency -> count
  std::optional<double> mean_pips;
  std::optional<RejectReason> reason;  // absent when kept

  bool kept() const { return !reason.has_value(); }
};

struct ScreeningOutcome {
  std::vector<std::string> kept;                                   // sorted
  std::vector<std::pair<std::string, RejectReason>> rejected;      // sorted by id
  std::vector<ScreeningDecision> decisions;                        // sorted by id
};

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// Pure set filter over participants. `srts` holds each participant's mean SRT
// and is only consulted by the MAD outlier rule.
inline ScreeningOutcome screen_participants(
    const std::vector<ParticipantRecord>& records, const ScreeningRule& rule,
    const std::map<std::string, double>& srts = {}) {
  require(rule.min_mean_pips < rule.max_mean_pips, ErrorCode::kInvalidArgument,
          "screening bounds must satisfy min < max");
  std::set<std::string> seen;
  for (const auto& r : records) {
    require(seen.insert(r.participant_id).second, ErrorCode::kInvalidArgument,
            "duplicate participant id " + r.participant_id);
  }

  std::optional<double> srt_median, srt_mad;
  if (rule.outlier.mad_rule && !srts.empty()) {
    std::vector<double> values;
    for (const auto& [id, v] : srts) values.push_back(v);
    srt_median = detail::median(values);
    std::vector<double> deviations;
    for (double v : values) deviations.push_back(std::abs(v - *srt_median));
    srt_mad = detail::median(deviations);
  }

  ScreeningOutcome outcome;
  for (const auto& r : records) {
    ScreeningDecision d;
    d.participant_id = r.participant_id;
    for (const auto& t : r.tonepip) d.n_pip[t.frequency_hz] = t.n_pip;
    if (r.tonepip.empty()) {
      d.reason = RejectReason::kMissingTonePip;
    } else {
      d.mean_pips = mean_pips(r.tonepip);
      if (*d.mean_pips < rule.min_mean_pips) {
        d.reason = RejectReason::kTooFewPips;
      } else if (*d.mean_pips > rule.max_mean_pips) {
        d.reason = RejectReason::kTooManyPips;
      } else if (rule.outlier.manual_exclusions.count(r.participant_id) > 0) {
        d.reason = RejectReason::kSrtOutlier;
      } else if (srt_mad && *srt_mad > 0.0) {
        const auto it = srts.find(r.participant_id);
        if (it != srts.end() &&
            std::abs(it->second - *srt_median) > rule.outlier.mad_k * *srt_mad) {
          d.reason = RejectReason::kSrtOutlier;
        }
      }
    }
    outcome.decisions.push_back(std::move(d));
  }
  std::sort(outcome.decisions.begin(), outcome.decisions.end(),
            [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
  for (const auto& d : outcome.decisions) {
    if (d.kept()) {
      outcome.kept.push_back(d.participant_id);
    } else {
      outcome.rejected.emplace_back(d.participant_id, *d.reason);
    }
  }
  return outcome;
}

inline Json screening_report_json(const ScreeningOutcome& outcome) {
  Json rows = Json::array();
  for (const auto& d : outcome.decisions) {
    Json pips = Json::object();
    for (const auto& [f, n] : d.n_pip) pips[std::to_string(f)] = n;
    rows.push_back({{"participant_id", d.participant_id},
                    {"n_pip", pips},
                    {"mean_n_pip", d.mean_pips ? Json(*d.mean_pips) : Json(nullptr)},
                    {"decision", d.kept() ? "keep" : "reject"},
                    {"reason", d.reason ? Json(std::string(to_string(*d.reason))) : Json(nullptr)}});
  }
  return {{"kept_count", outcome.kept.size()},
          {"rejected_count", outcome.rejected.size()},
          {"kept", outcome.kept},
          {"participants", rows}};
}

inline std::string screening_report_csv(const ScreeningOutcome& outcome) {
  std::ostringstream out;
  out << "participant_id";
  for (int f : kPresetFrequencies) out << ",n_pip_" << f;
  out << ",mean_n_pip,decision,reason\n";
  for (const auto& d : outcome.decisions) {
    out << d.participant_id;
    for (int f : kPresetFrequencies) {
      out << ',';
      if (auto it = d.n_pip.find(f); it != d.n_pip.end()) out << it->second;
    }
    out << ',';
    if (d.mean_pips) out << *d.mean_pips;
    out << ',' << (d.kept() ? "keep" : "reject") << ',';
    if (d.reason) out << to_string(*d.reason);
    out << '\n';
  }
  return out.str();
}

}  // namespace pipscreen::tonepip

#endif  // PIPSCREEN_TONEPIP_SCREENING_HPP_

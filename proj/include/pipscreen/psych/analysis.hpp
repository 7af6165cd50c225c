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

#ifndef PIPSCREEN_PSYCH_ANALYSIS_HPP_
#define PIPSCREEN_PSYCH_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pipscreen/csv.hpp"
#include "pipscreen/enhance/method.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/psych/fit.hpp"
#include "pipscreen/psych/scoring.hpp"
#include "pipscreen/psych/summary.hpp"
#include "pipscreen/records.hpp"
#include "pipscreen/tonepip/screening.hpp"

namespace pipscreen::psych {

struct ParticipantAnalysis {
  std::string participant_id;
  std::vector<ConditionCell> cells;
  std::map<enhance::EnhancementMethod, PsychFit> fits;
  std::map<enhance::EnhancementMethod, double> srts;  // converged fits only
};

struct AnalysisOptions {
  FitOptions fit;
  TallyOptions tally;
  tonepip::ScreeningRule screening;
  bool screen = true;
};

struct AnalysisResult {
  std::vector<ParticipantAnalysis> participants;  // every input participant
  std::optional<tonepip::ScreeningOutcome> screening;
  std::vector<std::string> analyzed;  // ids entering the summary
  std::vector<ConditionSummary> summary;
};

inline ParticipantAnalysis analyze_participant(const ParticipantRecord& record,
                                               const AnalysisOptions& options = {}) {
  ParticipantAnalysis pa;
  pa.participant_id = record.participant_id;
  pa.cells = tally(record.trials, options.tally).cells;
  for (auto m : enhance::kAllMethods) {
    const auto cells = cells_for(pa.cells, m);
    std::size_t snrs = 0;
    for (const auto& c : cells) snrs += c.n_trials > 0 ? 1 : 0;
    if (snrs < 2) continue;
    const auto fit = fit_psychometric(cells, options.fit);
    pa.fits[m] = fit;
    if (fit.converged) pa.srts[m] = srt(fit, options.fit);
  }
  return pa;
}

inline double mean_srt(const ParticipantAnalysis& pa) {
  double sum = 0.0;
  for (const auto& [m, v] : pa.srts) sum += v;
  return pa.srts.empty() ? 0.0 : sum / static_cast<double>(pa.srts.size());
}

// Fits every participant, screens the cohort (the outlier rule sees each
// participant's mean SRT across conditions) and summarizes the kept ones.
inline AnalysisResult analyze(const std::vector<ParticipantRecord>& records,
                              const AnalysisOptions& options = {}) {
  AnalysisResult result;
  std::map<std::string, double> mean_srts;
  for (const auto& r : records) {
    result.participants.push_back(analyze_participant(r, options));
    const auto& pa = result.participants.back();
    if (!pa.srts.empty()) mean_srts[pa.participant_id] = mean_srt(pa);
  }
  std::set<std::string> keep;
  if (options.screen) {
    result.screening = tonepip::screen_participants(records, options.screening, mean_srts);
    keep.insert(result.screening->kept.begin(), result.screening->kept.end());
  } else {
    for (const auto& r : records) keep.insert(r.participant_id);
  }
  SrtTable table;
  for (const auto& pa : result.participants) {
    if (keep.count(pa.participant_id) == 0 || pa.srts.empty()) continue;
    table[pa.participant_id] = pa.srts;
    result.analyzed.push_back(pa.participant_id);
  }
  std::sort(result.analyzed.begin(), result.analyzed.end());
  if (!table.empty()) result.summary = summarize(table);
  return result;
}

inline std::string results_csv(const std::vector<ParticipantAnalysis>& participants) {
  csv::Writer w({"participant_id", "method", "snr_db", "n_correct", "n_trials"});
  for (const auto& pa : participants) {
    for (const auto& c : pa.cells) {
      w.row({pa.participant_id, std::string(enhance::to_string(c.method)),
             csv::format_double(c.snr_db), std::to_string(c.n_correct),
             std::to_string(c.n_trials)});
    }
  }
  return w.str();
}

inline std::string fits_csv(const std::vector<ParticipantAnalysis>& participants) {
  csv::Writer w({"participant_id", "method", "mu", "sigma", "converged", "log_likelihood",
                 "ci_mu_low", "ci_mu_high", "diagnostic"});
  for (const auto& pa : participants) {
    for (const auto& [m, f] : pa.fits) {
      w.row({pa.participant_id, std::string(enhance::to_string(m)), csv::format_double(f.mu),
             csv::format_double(f.sigma), f.converged ? "true" : "false",
             std::isfinite(f.log_likelihood) ? csv::format_double(f.log_likelihood) : "",
             f.ci_mu ? csv::format_double(f.ci_mu->first) : "",
             f.ci_mu ? csv::format_double(f.ci_mu->second) : "", f.diagnostic});
    }
  }
  return w.str();
}

inline std::string summary_csv(const std::vector<ConditionSummary>& summary) {
  csv::Writer w({"method", "n", "mean_srt_db", "sd_srt_db"});
  for (const auto& s : summary) {
    w.row({std::string(enhance::to_string(s.method)), std::to_string(s.n),
           csv::format_double(s.mean), s.sd ? csv::format_double(*s.sd) : ""});
  }
  return w.str();
}

// Psychometric curves sampled on an SNR grid, per participant and per
// condition, together with the empirical proportions they were fitted to.
inline Json plot_data_json(const AnalysisResult& result, double snr_lo = -15.0,
                           double snr_hi = 9.0, double snr_step = 0.5) {
  std::vector<double> grid;
  for (double s = snr_lo; s <= snr_hi + 1e-9; s += snr_step) grid.push_back(s);
  Json participants = Json::array();
  for (const auto& pa : result.participants) {
    Json conditions = Json::object();
    for (const auto& [m, f] : pa.fits) {
      Json points = Json::array();
      for (const auto& c : cells_for(pa.cells, m)) {
        points.push_back({{"snr_db", c.snr_db},
                          {"proportion_correct",
                           static_cast<double>(c.n_correct) / std::max(c.n_trials, 1)}});
      }
      Json curve = Json::array();
      if (f.converged) {
        for (double s : grid) curve.push_back(psychometric(s, f.mu, f.sigma));
      }
      conditions[std::string(enhance::to_string(m))] = {
          {"converged", f.converged},
          {"mu", f.converged ? Json(f.mu) : Json(nullptr)},
          {"sigma", f.converged ? Json(f.sigma) : Json(nullptr)},
          {"empirical", points},
          {"curve", curve}};
    }
    participants.push_back({{"participant_id", pa.participant_id}, {"conditions", conditions}});
  }
  Json summary = Json::array();
  for (const auto& s : result.summary) {
    summary.push_back({{"method", enhance::to_string(s.method)},
                       {"n", s.n},
                       {"mean_srt_db", s.mean},
                       {"sd_srt_db", s.sd ? Json(*s.sd) : Json(nullptr)}});
  }
  return {{"snr_grid_db", grid},
          {"participants", participants},
          {"analyzed", result.analyzed},
          {"summary", summary}};
}

}  // namespace pipscreen::psych

#endif  // PIPSCREEN_PSYCH_ANALYSIS_HPP_

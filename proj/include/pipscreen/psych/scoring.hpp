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

#ifndef PIPSCREEN_PSYCH_SCORING_HPP_
#define PIPSCREEN_PSYCH_SCORING_HPP_

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pipscreen/enhance/method.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/psych/normalize.hpp"
#include "pipscreen/records.hpp"
#include "pipscreen/scene/observation.hpp"

namespace pipscreen::psych {

using enhance::EnhancementMethod;

// Whole-word scoring: correct iff the normalized strings are identical.
inline bool score_answer(std::string_view response, std::string_view truth) {
  const std::string t = normalize_answer(truth);
  require(!t.empty(), ErrorCode::kInvalidArgument, "empty ground-truth transcript");
  return normalize_answer(response) == t;
}

struct ConditionCell {
  EnhancementMethod method = EnhancementMethod::kUnprocessed;
  double snr_db = 0.0;
  int n_trials = 0;
  int n_correct = 0;

  bool operator==(const ConditionCell&) const = default;
};

struct TallyOptions {
  std::vector<double> snr_grid{scene::kSnrGrid.begin(), scene::kSnrGrid.end()};
  bool include_practice = false;
};

struct TallyResult {
  std::vector<ConditionCell> cells;  // only cells that received trials
  std::vector<std::pair<EnhancementMethod, double>> missing;
};

// Counts correct answers per (method, SNR) cell. Cells are ordered by method
// then SNR. Cells without trials are listed as missing, never fabricated.
inline TallyResult tally(std::span<const Trial> trials, const TallyOptions& options = {}) {
  std::set<std::string> ids;
  std::map<std::pair<std::size_t, double>, ConditionCell> cells;
  for (const auto& t : trials) {
    require(ids.insert(t.trial_id).second, ErrorCode::kDuplicateTrial,
            "duplicate trial id " + t.trial_id);
    if (t.practice && !options.include_practice) continue;
    require(std::find(options.snr_grid.begin(), options.snr_grid.end(), t.snr_db) !=
                options.snr_grid.end(),
            ErrorCode::kUnknownCondition,
            "trial " + t.trial_id + " has SNR " + std::to_string(t.snr_db) + " outside the grid");
    auto& cell = cells[{enhance::method_index(t.method), t.snr_db}];
    cell.method = t.method;
    cell.snr_db = t.snr_db;
    ++cell.n_trials;
    if (t.correct) ++cell.n_correct;
  }
  TallyResult result;
  for (auto m : enhance::kAllMethods) {
    for (double snr : options.snr_grid) {
      const auto it = cells.find({enhance::method_index(m), snr});
      if (it == cells.end()) {
        result.missing.emplace_back(m, snr);
      } else {
        result.cells.push_back(it->second);
      }
    }
  }
  return result;
}

inline std::vector<ConditionCell> cells_for(std::span<const ConditionCell> cells,
                                            EnhancementMethod method) {
  std::vector<ConditionCell> out;
  for (const auto& c : cells) {
    if (c.method == method) out.push_back(c);
  }
  return out;
}

}  // namespace pipscreen::psych

#endif  // PIPSCREEN_PSYCH_SCORING_HPP_

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

#ifndef PIPSCREEN_PSYCH_SUMMARY_HPP_
#define PIPSCREEN_PSYCH_SUMMARY_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pipscreen/enhance/method.hpp"
#include "pipscreen/error.hpp"

namespace pipscreen::psych {

struct ConditionSummary {
  enhance::EnhancementMethod method = enhance::EnhancementMethod::kUnprocessed;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // absent for a single participant
};

// SRTs keyed by participant, then by condition.
using SrtTable = std::map<std::string, std::map<enhance::EnhancementMethod, double>>;

// Per-condition sample mean and (n - 1)-denominator SD across participants.
// Values are summed in sorted order so the result does not depend on the
// order participants were supplied in.
inline std::vector<ConditionSummary> summarize(const SrtTable& srts) {
  require(!srts.empty(), ErrorCode::kInvalidArgument, "no participants to summarize");
  std::vector<ConditionSummary> out;
  for (auto m : enhance::kAllMethods) {
    std::vector<double> values;
    for (const auto& [id, row] : srts) {
      if (auto it = row.find(m); it != row.end()) values.push_back(it->second);
    }
    if (values.empty()) continue;
    std::sort(values.begin(), values.end());
    ConditionSummary s;
    s.method = m;
    s.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace pipscreen::psych

#endif  // PIPSCREEN_PSYCH_SUMMARY_HPP_

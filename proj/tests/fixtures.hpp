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

#ifndef PIPSCREEN_TESTS_FIXTURES_HPP_
#define PIPSCREEN_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "pipscreen/records.hpp"

namespace pipscreen::testing {

inline ParticipantRecord pip_record(const std::string& id, std::vector<int> counts) {
  static constexpr int kFreqs[] = {500, 1000, 2000, 4000};
  ParticipantRecord r;
  r.participant_id = id;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    r.tonepip.push_back({kFreqs[i], counts[i], 5.0 * (counts[i] - 1)});
  }
  return r;
}

// Draws four pip counts whose sum lies in [lo_sum, hi_sum].
inline std::vector<int> counts_with_sum(std::mt19937_64& rng, int lo_sum, int hi_sum) {
  std::uniform_int_distribution<int> pick(0, 15);
  for (;;) {
    std::vector<int> c = {pick(rng), pick(rng), pick(rng), pick(rng)};
    const int s = c[0] + c[1] + c[2] + c[3];
    if (s >= lo_sum && s <= hi_sum) return c;
  }
}

// A cohort of 39 participants of which exactly 25 have a mean pip count in
// [9, 13]. Seven fall below and seven above, and the boundaries are exercised
// explicitly (sums 36 and 52 are inside, 35 and 53 outside).
inline std::vector<ParticipantRecord> screening_cohort(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ParticipantRecord> out;
  int next = 0;
  const auto id = [&] {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%03d", next++);
    return std::string(buf);
  };
  out.push_back(pip_record(id(), {9, 9, 9, 9}));
  out.push_back(pip_record(id(), {13, 13, 13, 13}));
  out.push_back(pip_record(id(), {8, 9, 9, 9}));
  out.push_back(pip_record(id(), {13, 13, 14, 13}));
  for (int i = 0; i < 23; ++i) out.push_back(pip_record(id(), counts_with_sum(rng, 36, 52)));
  for (int i = 0; i < 6; ++i) out.push_back(pip_record(id(), counts_with_sum(rng, 0, 35)));
  for (int i = 0; i < 6; ++i) out.push_back(pip_record(id(), counts_with_sum(rng, 53, 60)));
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace pipscreen::testing

#endif  // PIPSCREEN_TESTS_FIXTURES_HPP_

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

#ifndef PIPSCREEN_RECORDS_HPP_
#define PIPSCREEN_RECORDS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "pipscreen/enhance/method.hpp"

namespace pipscreen {

struct TonePipResult {
  int frequency_hz = 0;
  int n_pip = 0;
  std::optional<double> listening_level_db;  // absent when nothing was audible

  bool operator==(const TonePipResult&) const = default;
};

// One presented word and the participant's answer.
struct Trial {
  std::string trial_id;
  std::string word_id;
  enhance::EnhancementMethod method = enhance::EnhancementMethod::kUnprocessed;
  double snr_db = 0.0;
  std::string response;
  std::string transcript;
  bool correct = false;
  bool practice = false;

  bool operator==(const Trial&) const = default;
};

struct ParticipantRecord {
  std::string participant_id;
  std::vector<TonePipResult> tonepip;
  std::vector<Trial> trials;
  std::string volume_setting;

  bool operator==(const ParticipantRecord&) const = default;
};

}  // namespace pipscreen

#endif  // PIPSCREEN_RECORDS_HPP_

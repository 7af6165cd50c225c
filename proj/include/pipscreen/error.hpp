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

#ifndef PIPSCREEN_ERROR_HPP_
#define PIPSCREEN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pipscreen {

// Integer values are part of the HTTP API and must never be renumbered.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kSilentSignal = 3,
  kIoError = 4,
  kParseError = 5,
  kNotFound = 6,

  kInsufficientCorpus = 10,

  kSessionDone = 20,
  kPhaseMismatch = 21,
  kWrongBlock = 22,
  kBlockAlreadyAccepted = 23,
  kBlockNotServed = 24,
  kBlockPendingAnswers = 25,
  kPhaseIncomplete = 26,

  kTonePipOutOfRange = 30,
  kTonePipDuplicate = 31,
  kUnknownFrequency = 32,

  kSessionExists = 40,
  kUnknownSession = 41,
  kAudioUnavailable = 42,

  kAnswersRejected = 50,

  kSessionsNotFinished = 60,
  kUnknownCondition = 61,
  kDuplicateTrial = 62,
  kFitNotConverged = 63,
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kSilentSignal: return "silent_signal";
    case ErrorCode::kIoError: return "io_error";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kInsufficientCorpus: return "insufficient_corpus";
    case ErrorCode::kSessionDone: return "session_done";
    case ErrorCode::kPhaseMismatch: return "phase_mismatch";
    case ErrorCode::kWrongBlock: return "wrong_block";
    case ErrorCode::kBlockAlreadyAccepted: return "block_already_accepted";
    case ErrorCode::kBlockNotServed: return "block_not_served";
    case ErrorCode::kBlockPendingAnswers: return "block_pending_answers";
    case ErrorCode::kPhaseIncomplete: return "phase_incomplete";
    case ErrorCode::kTonePipOutOfRange: return "tonepip_out_of_range";
    case ErrorCode::kTonePipDuplicate: return "tonepip_duplicate";
    case ErrorCode::kUnknownFrequency: return "unknown_frequency";
    case ErrorCode::kSessionExists: return "session_exists";
    case ErrorCode::kUnknownSession: return "unknown_session";
    case ErrorCode::kAudioUnavailable: return "audio_unavailable";
    case ErrorCode::kAnswersRejected: return "answers_rejected";
    case ErrorCode::kSessionsNotFinished: return "sessions_not_finished";
    case ErrorCode::kUnknownCondition: return "unknown_condition";
    case ErrorCode::kDuplicateTrial: return "duplicate_trial";
    case ErrorCode::kFitNotConverged: return "fit_not_converged";
  }
  return "unknown";
}

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace pipscreen

#endif  // PIPSCREEN_ERROR_HPP_

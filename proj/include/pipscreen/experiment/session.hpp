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

#ifndef PIPSCREEN_EXPERIMENT_SESSION_HPP_
#define PIPSCREEN_EXPERIMENT_SESSION_HPP_

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pipscreen/error.hpp"
#include "pipscreen/experiment/corpus.hpp"
#include "pipscreen/experiment/plan.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/psych/normalize.hpp"
#include "pipscreen/psych/scoring.hpp"
#include "pipscreen/records.hpp"
#include "pipscreen/tonepip/levels.hpp"

namespace pipscreen::experiment {

enum class Phase { kSetup, kTonepip, kPractice, kMain, kDone };

inline std::string to_string(Phase p) {
  switch (p) {
    case Phase::kSetup: return "setup";
    case Phase::kTonepip: return "tonepip";
    case Phase::kPractice: return "practice";
    case Phase::kMain: return "main";
    case Phase::kDone: return "done";
  }
  return "unknown";
}

inline Phase parse_phase(const std::string& s) {
  for (auto p : {Phase::kSetup, Phase::kTonepip, Phase::kPractice, Phase::kMain, Phase::kDone}) {
    if (to_string(p) == s) return p;
  }
  fail(ErrorCode::kParseError, "unknown phase '" + s + "'");
}

struct AnswerRecord {
  bool practice = false;
  std::size_t index = 0;  // position in the phase's stimulus list
  std::string response;   // exactly as submitted
  bool correct = false;
  std::string timestamp;

  bool operator==(const AnswerRecord&) const = default;
};

struct PhaseProgress {
  std::size_t served = 0;
  std::size_t accepted_blocks = 0;

  bool operator==(const PhaseProgress&) const = default;
};

struct SessionState {
  std::string session_id;
  SessionPlan plan;
  Script script = Script::kAscii;
  AnswerBounds bounds;
  Phase phase = Phase::kSetup;
  std::optional<std::string> volume_setting;
  std::vector<TonePipResult> tonepip;
  PhaseProgress practice;
  PhaseProgress main;
  std::vector<AnswerRecord> answers;
  std::uint64_t event_count = 0;
  std::string created_at;
  std::string updated_at;

  bool operator==(const SessionState&) const = default;

  const std::vector<Stimulus>& list(bool is_practice) const {
    return is_practice ? plan.practice : plan.main;
  }
  const PhaseProgress& progress(bool is_practice) const { return is_practice ? practice : main; }
  std::size_t block_size() const { return static_cast<std::size_t>(plan.options.block_size); }
};

// What a client may see about a served stimulus: no word, transcript or
// condition label.
struct StimulusTicket {
  Phase phase = Phase::kMain;
  std::size_t index = 0;
  std::size_t block = 0;
  std::size_t position = 0;  // within the block
  int part = 1;
};

struct FieldDiagnostic {
  std::size_t field = 0;
  std::string code;  // empty, encoding, script, length
  std::string message;
};

struct BlockValidation {
  bool accepted = false;
  std::size_t expected = 0;
  std::size_t received = 0;
  std::vector<FieldDiagnostic> diagnostics;
};

inline Json to_json(const BlockValidation& v) {
  Json diags = Json::array();
  for (const auto& d : v.diagnostics) {
    diags.push_back({{"field", d.field}, {"code", d.code}, {"message", d.message}});
  }
  return {{"accepted", v.accepted},
          {"expected", v.expected},
          {"received", v.received},
          {"diagnostics", diags}};
}

// Per-answer checks: non-empty, script, and character count.
inline BlockValidation validate_answers(const std::vector<std::string>& answers,
                                        std::size_t expected, Script script,
                                        const AnswerBounds& bounds) {
  BlockValidation v;
  v.expected = expected;
  v.received = answers.size();
  if (answers.size() != expected) {
    v.diagnostics.push_back({0, "arity",
                             "expected " + std::to_string(expected) + " answers, got " +
                                 std::to_string(answers.size())});
  }
  for (std::size_t i = 0; i < answers.size(); ++i) {
    std::string norm;
    try {
      norm = psych::normalize_answer(answers[i]);
    } catch (const Error&) {
      v.diagnostics.push_back({i, "encoding", "answer is not valid UTF-8"});
      continue;
    }
    if (norm.empty()) {
      v.diagnostics.push_back({i, "empty", "answer is empty"});
      continue;
    }
    const bool script_ok =
        script == Script::kKana ? psych::is_hiragana_only(norm) : psych::is_ascii_word(norm);
    if (!script_ok) {
      v.diagnostics.push_back(
          {i, "script",
           script == Script::kKana ? "use hiragana only" : "use lower-case letters a-z only"});
      continue;
    }
    const std::size_t n = psych::char_count(norm);
    if (n < bounds.min_chars || n > bounds.max_chars) {
      v.diagnostics.push_back({i, "length",
                               "answer has " + std::to_string(n) + " characters, expected " +
                                   std::to_string(bounds.min_chars) + "-" +
                                   std::to_string(bounds.max_chars)});
    }
  }
  v.accepted = v.diagnostics.empty();
  return v;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms % 1000));
  return buf;
}

// Applies one persisted event. This is the only code path that mutates a
// session, so replaying a log reproduces the live state exactly.
inline void apply_event(SessionState& s, const Json& event) {
  const std::string type = json_get<std::string>(event, "type", "event");
  const std::string ts = json_get<std::string>(event, "ts", "event");
  if (type == "created") {
    require(s.event_count == 0, ErrorCode::kParseError, "created event not first in log");
    s = SessionState{};
    s.session_id = json_get<std::string>(event, "session_id", "event");
    s.plan = plan_from_json(json_get<Json>(event, "plan", "event"));
    s.script = parse_script(json_get<std::string>(event, "script", "event"));
    s.bounds = {json_get<std::size_t>(event, "min_chars", "event"),
                json_get<std::size_t>(event, "max_chars", "event")};
    s.created_at = ts;
  } else if (type == "volume") {
    s.volume_setting = json_get<std::string>(event, "setting", "event");
    s.phase = Phase::kTonepip;
  } else if (type == "tonepip") {
    const int f = json_get<int>(event, "frequency_hz", "event");
    const int n = json_get<int>(event, "n_pip", "event");
    s.tonepip.push_back({f, n, tonepip::listening_level(n)});
    if (s.tonepip.size() == tonepip::kPresetFrequencies.size()) {
      s.phase = s.plan.practice.empty() ? Phase::kMain : Phase::kPractice;
    }
  } else if (type == "served") {
    const bool practice = json_get<bool>(event, "practice", "event");
    ++(practice ? s.practice : s.main).served;
  } else if (type == "answers") {
    const bool practice = json_get<bool>(event, "practice", "event");
    const auto block = json_get<std::size_t>(event, "block", "event");
    const auto answers = json_get<std::vector<std::string>>(event, "answers", "event");
    const auto& list = s.list(practice);
    for (std::size_t i = 0; i < answers.size(); ++i) {
      const std::size_t index = block * s.block_size() + i;
      s.answers.push_back({practice, index, answers[i],
                           psych::score_answer(answers[i], list[index].transcript), ts});
    }
    auto& progress = practice ? s.practice : s.main;
    ++progress.accepted_blocks;
    if (progress.accepted_blocks == s.plan.block_count(practice)) {
      s.phase = practice ? Phase::kMain : Phase::kDone;
    }
  } else {
    fail(ErrorCode::kParseError, "unknown event type '" + type + "'");
  }
  ++s.event_count;
  s.updated_at = ts;
}

// Validating front end over a SessionState. Every accepted operation becomes
// an event that is handed to the sink (for persistence) before it is applied.
class Session {
 public:
  using Sink = std::function<void(const Json&)>;
  using Clock = std::function<std::string()>;

  static Session create(const std::string& session_id, SessionPlan plan, Script script,
                        AnswerBounds bounds, Sink sink = {}, Clock clock = utc_timestamp) {
    require(bounds.min_chars >= 1 && bounds.min_chars <= bounds.max_chars,
            ErrorCode::kInvalidArgument, "invalid answer bounds");
    Session s(std::move(sink), std::move(clock));
    s.commit({{"type", "created"},
              {"session_id", session_id},
              {"plan", to_json(plan)},
              {"script", to_string(script)},
              {"min_chars", bounds.min_chars},
              {"max_chars", bounds.max_chars}});
    return s;
  }

  static Session replay(const std::vector<Json>& events, Sink sink = {},
                        Clock clock = utc_timestamp) {
    require(!events.empty(), ErrorCode::kParseError, "empty event log");
    Session s(std::move(sink), std::move(clock));
    for (const auto& e : events) apply_event(s.state_, e);
    return s;
  }

  const SessionState& state() const { return state_; }

  void record_volume(const std::string& setting) {
    expect_phase(Phase::kSetup);
    require(!setting.empty(), ErrorCode::kInvalidArgument, "empty volume setting");
    commit({{"type", "volume"}, {"setting", setting}});
  }

  TonePipResult submit_tonepip(int frequency_hz, int n_pip) {
    expect_phase(Phase::kTonepip);
    require(tonepip::is_preset_frequency(frequency_hz), ErrorCode::kUnknownFrequency,
            std::to_string(frequency_hz) + " Hz is not a session frequency");
    for (const auto& r : state_.tonepip) {
      require(r.frequency_hz != frequency_hz, ErrorCode::kTonePipDuplicate,
              "tone-pip count for " + std::to_string(frequency_hz) + " Hz already stored");
    }
    const auto result = tonepip::make_result(frequency_hz, n_pip);
    commit({{"type", "tonepip"}, {"frequency_hz", frequency_hz}, {"n_pip", n_pip}});
    return result;
  }

  StimulusTicket next_stimulus() {
    const bool practice = active_list();
    const auto& progress = state_.progress(practice);
    const std::size_t limit = (progress.accepted_blocks + 1) * state_.block_size();
    require(progress.served < limit, ErrorCode::kBlockPendingAnswers,
            "answers for block " + std::to_string(progress.accepted_blocks) +
                " must be submitted first");
    const std::size_t index = progress.served;
    commit({{"type", "served"}, {"practice", practice}, {"index", index}});
    return ticket(practice, index);
  }

  // The stimulus behind an already served index (for audio delivery).
  const Stimulus& served_stimulus(Phase phase, std::size_t index) const {
    require(phase == Phase::kPractice || phase == Phase::kMain, ErrorCode::kPhaseMismatch,
            "stimuli exist only in practice and main phases");
    const bool practice = phase == Phase::kPractice;
    require(index < state_.progress(practice).served, ErrorCode::kBlockNotServed,
            "stimulus " + std::to_string(index) + " has not been served");
    return state_.list(practice)[index];
  }

  BlockValidation submit_block_answers(std::size_t block, const std::vector<std::string>& answers,
                                       const Json& client_timing = nullptr) {
    const bool practice = active_list();
    const auto& progress = state_.progress(practice);
    require(block >= progress.accepted_blocks, ErrorCode::kBlockAlreadyAccepted,
            "block " + std::to_string(block) + " was already accepted");
    require(block == progress.accepted_blocks, ErrorCode::kWrongBlock,
            "expected answers for block " + std::to_string(progress.accepted_blocks) +
                ", got block " + std::to_string(block));
    require(progress.served >= (block + 1) * state_.block_size(), ErrorCode::kBlockNotServed,
            "block " + std::to_string(block) + " has not been fully served");
    auto validation =
        validate_answers(answers, state_.block_size(), state_.script, state_.bounds);
    if (!validation.accepted) return validation;
    Json event = {{"type", "answers"}, {"practice", practice}, {"block", block},
                  {"answers", answers}};
    if (!client_timing.is_null()) event["client_timing"] = client_timing;
    commit(std::move(event));
    return validation;
  }

  StimulusTicket ticket(bool practice, std::size_t index) const {
    const std::size_t bs = state_.block_size();
    const std::size_t block = index / bs;
    return {practice ? Phase::kPractice : Phase::kMain, index, block, index % bs,
            practice ? 0 : state_.plan.part_of(block)};
  }

 private:
  Session(Sink sink, Clock clock) : sink_(std::move(sink)), clock_(std::move(clock)) {}

  void expect_phase(Phase p) const {
    require(state_.phase != Phase::kDone || p == Phase::kDone, ErrorCode::kSessionDone,
            "session is finished");
    require(state_.phase == p, ErrorCode::kPhaseMismatch,
            "operation needs phase " + to_string(p) + ", session is in " +
                to_string(state_.phase));
  }

  // True for the practice list, false for the main list.
  bool active_list() const {
    require(state_.phase != Phase::kDone, ErrorCode::kSessionDone, "session is finished");
    require(state_.phase == Phase::kPractice || state_.phase == Phase::kMain,
            ErrorCode::kPhaseMismatch,
            "operation needs phase practice or main, session is in " + to_string(state_.phase));
    return state_.phase == Phase::kPractice;
  }

  void commit(Json event) {
    event["seq"] = state_.event_count;
    event["ts"] = clock_();
    if (sink_) sink_(event);
    apply_event(state_, event);
  }

  SessionState state_;
  Sink sink_;
  Clock clock_;
};

inline std::string trial_id(bool practice, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%04zu", practice ? "practice" : "main", index);
  return buf;
}

// Analysis view of a session.
inline ParticipantRecord to_record(const SessionState& s) {
  ParticipantRecord r;
  r.participant_id = s.plan.participant_id;
  r.tonepip = s.tonepip;
  r.volume_setting = s.volume_setting.value_or("");
  for (const auto& a : s.answers) {
    const auto& stim = s.list(a.practice)[a.index];
    r.trials.push_back({trial_id(a.practice, a.index), stim.word_id, stim.method, stim.snr_db,
                        a.response, stim.transcript, a.correct, a.practice});
  }
  return r;
}

// Client-safe summary of a session: progress and tone-pip results only.
inline Json state_view_json(const SessionState& s) {
  Json tp = Json::array();
  for (const auto& r : s.tonepip) {
    tp.push_back({{"frequency_hz", r.frequency_hz},
                  {"n_pip", r.n_pip},
                  {"listening_level_db",
                   r.listening_level_db ? Json(*r.listening_level_db) : Json(nullptr)}});
  }
  const auto progress = [&](bool practice) {
    const auto& p = s.progress(practice);
    return Json{{"served", p.served},
                {"accepted_blocks", p.accepted_blocks},
                {"blocks", s.plan.block_count(practice)},
                {"block_size", s.block_size()}};
  };
  return {{"session_id", s.session_id},
          {"participant_id", s.plan.participant_id},
          {"phase", to_string(s.phase)},
          {"volume_setting", s.volume_setting ? Json(*s.volume_setting) : Json(nullptr)},
          {"tonepip", tp},
          {"tonepip_frequencies_hz", tonepip::kPresetFrequencies},
          {"practice", progress(true)},
          {"main", progress(false)},
          {"script", to_string(s.script)},
          {"answer_chars", {{"min", s.bounds.min_chars}, {"max", s.bounds.max_chars}}},
          {"created_at", s.created_at},
          {"updated_at", s.updated_at}};
}

inline Json to_json(const StimulusTicket& t) {
  return {{"phase", to_string(t.phase)},
          {"index", t.index},
          {"block", t.block},
          {"position", t.position},
          {"part", t.part}};
}

}  // namespace pipscreen::experiment

#endif  // PIPSCREEN_EXPERIMENT_SESSION_HPP_

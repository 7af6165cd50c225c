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

#ifndef PIPSCREEN_EXPERIMENT_EXPORT_HPP_
#define PIPSCREEN_EXPERIMENT_EXPORT_HPP_

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pipscreen/csv.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/experiment/session.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/psych/analysis.hpp"
#include "pipscreen/records.hpp"

namespace pipscreen::experiment {

// File name -> CSV text.
using Bundle = std::map<std::string, std::string>;

inline const std::vector<std::string>& bundle_files() {
  static const std::vector<std::string> kFiles = {"answers.csv", "practice_answers.csv",
                                                  "tonepip.csv", "participants.csv",
                                                  "results.csv"};
  return kFiles;
}

namespace detail {

inline const std::vector<std::string> kAnswerHeader = {
    "participant_id", "trial_id", "word_id", "transcript", "method",
    "snr_db",         "response", "correct"};

}  // namespace detail

// Analysis bundle for a set of participant records. `states` only supplies
// the phase column of the participant table.
inline Bundle export_results(std::vector<ParticipantRecord> records,
                             const std::vector<SessionState>& states = {}) {
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
  csv::Writer main(detail::kAnswerHeader), practice(detail::kAnswerHeader);
  csv::Writer tonepip({"participant_id", "frequency_hz", "n_pip", "listening_level_db"});
  csv::Writer participants({"participant_id", "volume_setting", "phase", "n_answers"});
  std::vector<psych::ParticipantAnalysis> tallies;
  for (const auto& r : records) {
    for (const auto& t : r.trials) {
      (t.practice ? practice : main)
          .row({r.participant_id, t.trial_id, t.word_id, t.transcript,
                std::string(enhance::to_string(t.method)), csv::format_double(t.snr_db),
                t.response, t.correct ? "1" : "0"});
    }
    for (const auto& p : r.tonepip) {
      tonepip.row({r.participant_id, std::to_string(p.frequency_hz), std::to_string(p.n_pip),
                   p.listening_level_db ? csv::format_double(*p.listening_level_db) : ""});
    }
    std::string phase = "done";
    for (const auto& s : states) {
      if (s.plan.participant_id == r.participant_id) phase = to_string(s.phase);
    }
    participants.row({r.participant_id, r.volume_setting, phase, std::to_string(r.trials.size())});
    psych::ParticipantAnalysis pa;
    pa.participant_id = r.participant_id;
    pa.cells = psych::tally(r.trials).cells;
    tallies.push_back(std::move(pa));
  }
  return {{"answers.csv", main.str()},
          {"practice_answers.csv", practice.str()},
          {"tonepip.csv", tonepip.str()},
          {"participants.csv", participants.str()},
          {"results.csv", psych::results_csv(tallies)}};
}

// Unfinished sessions are an error unless `include_partial` is set.
inline Bundle export_sessions(const std::vector<SessionState>& states, bool include_partial) {
  std::vector<ParticipantRecord> records;
  std::vector<std::string> unfinished;
  for (const auto& s : states) {
    if (s.phase != Phase::kDone) unfinished.push_back(s.session_id);
    records.push_back(to_record(s));
  }
  if (!include_partial && !unfinished.empty()) {
    std::string list;
    for (const auto& id : unfinished) list += (list.empty() ? "" : ", ") + id;
    fail(ErrorCode::kSessionsNotFinished, "sessions not finished: " + list);
  }
  return export_results(std::move(records), states);
}

// Reconstructs participant records from a bundle. The participant table is
// the roster; answers and tone-pip rows must refer to listed participants.
inline std::vector<ParticipantRecord> load_records(const Bundle& bundle) {
  const auto file = [&](const std::string& name) -> const std::string& {
    const auto it = bundle.find(name);
    require(it != bundle.end(), ErrorCode::kNotFound, "bundle lacks " + name);
    return it->second;
  };
  std::map<std::string, ParticipantRecord> by_id;
  std::vector<std::string> order;
  {
    const auto t = csv::parse(file("participants.csv"), "participants.csv");
    const auto c_id = t.column("participant_id", "participants.csv");
    const auto c_vol = t.column("volume_setting", "participants.csv");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& id = t.rows[i][c_id];
      require(by_id.count(id) == 0, ErrorCode::kParseError,
              "participants.csv:" + std::to_string(t.lines[i]) + ": duplicate participant " + id);
      by_id[id].participant_id = id;
      by_id[id].volume_setting = t.rows[i][c_vol];
      order.push_back(id);
    }
  }
  const auto lookup = [&](const std::string& id, const std::string& where) -> ParticipantRecord& {
    const auto it = by_id.find(id);
    require(it != by_id.end(), ErrorCode::kParseError, where + ": unknown participant " + id);
    return it->second;
  };
  {
    const std::string name = "tonepip.csv";
    const auto t = csv::parse(file(name), name);
    const auto c_id = t.column("participant_id", name);
    const auto c_f = t.column("frequency_hz", name);
    const auto c_n = t.column("n_pip", name);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const std::string where = name + ":" + std::to_string(t.lines[i]);
      const int n = static_cast<int>(csv::parse_int(t.rows[i][c_n], where));
      lookup(t.rows[i][c_id], where)
          .tonepip.push_back({static_cast<int>(csv::parse_int(t.rows[i][c_f], where)), n,
                              tonepip::listening_level(n)});
    }
  }
  for (const std::string name : {"practice_answers.csv", "answers.csv"}) {
    const auto t = csv::parse(file(name), name);
    std::vector<std::size_t> cols;
    for (const auto& h : detail::kAnswerHeader) cols.push_back(t.column(h, name));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const std::string where = name + ":" + std::to_string(t.lines[i]);
      const auto& row = t.rows[i];
      Trial trial;
      trial.trial_id = row[cols[1]];
      trial.word_id = row[cols[2]];
      trial.transcript = row[cols[3]];
      try {
        trial.method = enhance::parse_method(row[cols[4]]);
      } catch (const Error& e) {
        fail(ErrorCode::kParseError, where + ": " + e.what());
      }
      trial.snr_db = csv::parse_double(row[cols[5]], where);
      trial.response = row[cols[6]];
      require(row[cols[7]] == "0" || row[cols[7]] == "1", ErrorCode::kParseError,
              where + ": correct must be 0 or 1");
      trial.correct = row[cols[7]] == "1";
      trial.practice = name == "practice_answers.csv";
      lookup(row[cols[0]], where).trials.push_back(std::move(trial));
    }
  }
  std::vector<ParticipantRecord> out;
  for (const auto& id : order) out.push_back(std::move(by_id[id]));
  return out;
}

inline void write_bundle(const std::filesystem::path& dir, const Bundle& bundle) {
  for (const auto& [name, text] : bundle) write_text_file(dir / name, text);
}

inline Bundle read_bundle(const std::filesystem::path& dir) {
  require(std::filesystem::is_directory(dir), ErrorCode::kNotFound,
          "bundle directory " + dir.string() + " does not exist");
  Bundle bundle;
  for (const auto& name : bundle_files()) {
    const auto path = dir / name;
    if (std::filesystem::exists(path)) bundle[name] = read_text_file(path);
  }
  return bundle;
}

}  // namespace pipscreen::experiment

#endif  // PIPSCREEN_EXPERIMENT_EXPORT_HPP_

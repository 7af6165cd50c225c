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

#ifndef PIPSCREEN_EXPERIMENT_STORE_HPP_
#define PIPSCREEN_EXPERIMENT_STORE_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pipscreen/error.hpp"
#include "pipscreen/experiment/corpus.hpp"
#include "pipscreen/experiment/plan.hpp"
#include "pipscreen/experiment/session.hpp"
#include "pipscreen/json_util.hpp"

namespace pipscreen::experiment {

struct StoreOptions {
  PlanOptions plan;
  std::optional<AnswerBounds> bounds;  // defaults follow the corpus script
  Session::Clock clock = utc_timestamp;
};

inline bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  });
}

// Reads an NDJSON event log. A final line without a terminating newline is a
// write interrupted by a crash and is ignored.
inline std::vector<Json> read_event_log(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<Json> events;
  std::size_t start = 0, line = 1;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string::npos) break;
    const std::string_view row(text.data() + start, end - start);
    if (!row.empty()) {
      try {
        events.push_back(Json::parse(row));
      } catch (const Json::parse_error& e) {
        fail(ErrorCode::kParseError, path.string() + ":" + std::to_string(line) + ": " + e.what());
      }
    }
    start = end + 1;
    ++line;
  }
  return events;
}

// All sessions of a running service. Sessions are persisted as append-only
// NDJSON event logs under <data_dir>/sessions (no persistence when no data
// directory is given). Each session has its own mutex so different sessions
// never contend; the session table has a shared mutex.
class SessionStore {
 public:
  SessionStore(Corpus corpus, std::optional<std::filesystem::path> data_dir,
               StoreOptions options = {})
      : corpus_(std::move(corpus)), data_dir_(std::move(data_dir)), options_(std::move(options)) {
    corpus_.validate();
    options_.plan.validate();
    if (!data_dir_) return;
    std::filesystem::create_directories(sessions_dir());
    for (const auto& file : std::filesystem::directory_iterator(sessions_dir())) {
      if (file.path().extension() != ".ndjson") continue;
      const auto events = read_event_log(file.path());
      if (events.empty()) continue;
      auto entry = std::make_shared<Entry>(
          Session::replay(events, sink_for(file.path().stem().string()), options_.clock));
      sessions_[entry->session.state().session_id] = entry;
    }
  }

  const Corpus& corpus() const { return corpus_; }
  const std::optional<std::filesystem::path>& data_dir() const { return data_dir_; }

  SessionState create(const std::string& participant_id, std::uint64_t seed) {
    require(valid_session_id(participant_id), ErrorCode::kInvalidArgument,
            "participant id must be 1-64 characters of [A-Za-z0-9_-]");
    auto plan = create_session(corpus_, participant_id, seed, options_.plan);
    std::unique_lock lock(table_mutex_);
    require(sessions_.count(participant_id) == 0, ErrorCode::kSessionExists,
            "session " + participant_id + " already exists");
    auto entry = std::make_shared<Entry>(Session::create(
        participant_id, std::move(plan), corpus_.script,
        options_.bounds.value_or(default_bounds(corpus_.script)), sink_for(participant_id),
        options_.clock));
    sessions_[participant_id] = entry;
    return entry->session.state();
  }

  // Runs `fn` with exclusive access to one session.
  template <typename Fn>
  auto with_session(const std::string& id, Fn&& fn) {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return fn(entry->session);
  }

  SessionState get(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return entry->session.state();
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(table_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, e] : sessions_) out.push_back(id);
    return out;
  }

  // Consistent copies of all sessions, sorted by id.
  std::vector<SessionState> snapshot() const {
    std::vector<SessionState> out;
    for (const auto& id : ids()) out.push_back(get(id));
    return out;
  }

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    std::mutex mutex;
    Session session;
  };

  std::filesystem::path sessions_dir() const { return *data_dir_ / "sessions"; }

  Session::Sink sink_for(const std::string& id) const {
    if (!data_dir_) return {};
    const auto path = sessions_dir() / (id + ".ndjson");
    return [path](const Json& event) {
      std::ofstream out(path, std::ios::app | std::ios::binary);
      out << event.dump() << '\n';
      out.flush();
      require(static_cast<bool>(out), ErrorCode::kIoError, "cannot append to " + path.string());
    };
  }

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(table_mutex_);
    const auto it = sessions_.find(id);
    require(it != sessions_.end(), ErrorCode::kUnknownSession, "no session " + id);
    return it->second;
  }

  Corpus corpus_;
  std::optional<std::filesystem::path> data_dir_;
  StoreOptions options_;
  mutable std::shared_mutex table_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace pipscreen::experiment

#endif  // PIPSCREEN_EXPERIMENT_STORE_HPP_

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

#ifndef PIPSCREEN_TOOLS_RUN_LOG_HPP_
#define PIPSCREEN_TOOLS_RUN_LOG_HPP_

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>

#include "pipscreen/experiment/session.hpp"
#include "pipscreen/json_util.hpp"

namespace pipscreen::cli {

// Machine-readable run log: one JSON object per line, written to a file or
// to stderr. Only the "ts" field varies between identical runs.
class RunLog {
 public:
  RunLog() = default;

  void open(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    file_.open(path, std::ios::app);
    require(static_cast<bool>(file_), ErrorCode::kIoError, "cannot open log " + path.string());
  }

  void write(const std::string& event, Json fields = Json::object()) {
    fields["ts"] = experiment::utc_timestamp();
    fields["event"] = event;
    const std::string line = fields.dump() + "\n";
    std::lock_guard lock(mutex_);
    std::ostream& out = file_.is_open() ? static_cast<std::ostream&>(file_) : std::cerr;
    out << line;
    out.flush();
  }

 private:
  std::ofstream file_;
  std::mutex mutex_;
};

}  // namespace pipscreen::cli

#endif  // PIPSCREEN_TOOLS_RUN_LOG_HPP_

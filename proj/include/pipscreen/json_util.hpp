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

#ifndef PIPSCREEN_JSON_UTIL_HPP_
#define PIPSCREEN_JSON_UTIL_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pipscreen/error.hpp"

namespace pipscreen {

using Json = nlohmann::json;

// Field lookup that reports the JSON path of missing or mistyped values.
template <typename T>
T json_get(const Json& object, const std::string& key, const std::string& context) {
  const std::string where = context.empty() ? key : context + "." + key;
  require(object.is_object() && object.contains(key), ErrorCode::kParseError,
          "missing field " + where);
  try {
    return object.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, "bad value for " + where + ": " + e.what());
  }
}

template <typename T>
T json_get_or(const Json& object, const std::string& key, T fallback,
              const std::string& context) {
  if (!object.is_object() || !object.contains(key) || object.at(key).is_null()) {
    return fallback;
  }
  return json_get<T>(object, key, context);
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIoError, "cannot open " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorCode::kIoError, "cannot write " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_json_file(const std::filesystem::path& path, const Json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

}  // namespace pipscreen

#endif  // PIPSCREEN_JSON_UTIL_HPP_

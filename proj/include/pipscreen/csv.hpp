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

#ifndef PIPSCREEN_CSV_HPP_
#define PIPSCREEN_CSV_HPP_

#include <charconv>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pipscreen/error.hpp"

namespace pipscreen::csv {

// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class Writer {
 public:
  explicit Writer(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) text_ += ',';
      text_ += quote(fields[i]);
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line of each row, 1-based

  std::size_t column(std::string_view name, std::string_view context) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    fail(ErrorCode::kParseError,
         std::string(context) + ": missing column '" + std::string(name) + "'");
  }
};

// RFC 4180 style parser: quoted fields may contain commas, quotes and line
// breaks. Every row must have as many fields as the header.
inline Table parse(std::string_view text, std::string_view context = "csv") {
  Table table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  const auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    if (table.header.empty() && table.rows.empty()) {
      table.header = std::move(record);
    } else {
      if (record.size() != table.header.size()) {
        fail(ErrorCode::kParseError, std::string(context) + ":" + std::to_string(record_line) +
                                         ": expected " + std::to_string(table.header.size()) +
                                         " fields, got " + std::to_string(record.size()));
      }
      table.rows.push_back(std::move(record));
      table.lines.push_back(record_line);
    }
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      field += c;
      field_started = true;
    }
  }
  require(!in_quotes, ErrorCode::kParseError, std::string(context) + ": unterminated quote");
  if (field_started || !record.empty()) end_record();
  return table;
}

inline double parse_double(std::string_view s, std::string_view context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCode::kParseError,
          std::string(context) + ": not a number: '" + std::string(s) + "'");
  return v;
}

inline long long parse_int(std::string_view s, std::string_view context) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCode::kParseError,
          std::string(context) + ": not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace pipscreen::csv

#endif  // PIPSCREEN_CSV_HPP_

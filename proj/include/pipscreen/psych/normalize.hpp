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

#ifndef PIPSCREEN_PSYCH_NORMALIZE_HPP_
#define PIPSCREEN_PSYCH_NORMALIZE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pipscreen/error.hpp"

namespace pipscreen::psych {

// Decodes UTF-8 into code points. Malformed input is a parse error rather
// than being silently replaced.
inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      fail(ErrorCode::kParseError, "invalid UTF-8 lead byte");
    }
    require(i + static_cast<std::size_t>(extra) < s.size(), ErrorCode::kParseError,
            "truncated UTF-8 sequence");
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      require((b & 0xC0) == 0x80, ErrorCode::kParseError, "invalid UTF-8 continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    require(cp >= kMin[extra] && cp <= 0x10FFFF && (cp < 0xD800 || cp > 0xDFFF),
            ErrorCode::kParseError, "invalid UTF-8 code point");
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

inline std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  for (char32_t cp : cps) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

inline constexpr char32_t kLongVowelMark = U'ー';

inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' ||
         c == U'　';
}

inline bool is_hiragana(char32_t c) { return c >= U'ぁ' && c <= U'ゖ'; }
inline bool is_katakana(char32_t c) { return c >= U'ァ' && c <= U'ヶ'; }

// Folds one code point: katakana to hiragana and ASCII upper to lower case.
inline char32_t fold(char32_t c) {
  if (is_katakana(c)) return c - 0x60;
  if (c >= U'A' && c <= U'Z') return c - U'A' + U'a';
  return c;
}

// Canonical answer form: surrounding whitespace trimmed (ideographic space
// included), kana unified to hiragana, long-vowel marks dropped, ASCII
// lower-cased. Idempotent.
inline std::string normalize_answer(std::string_view raw) {
  const auto cps = decode_utf8(raw);
  std::size_t b = 0, e = cps.size();
  while (b < e && is_space(cps[b])) ++b;
  while (e > b && is_space(cps[e - 1])) --e;
  std::u32string out;
  for (std::size_t i = b; i < e; ++i) {
    if (cps[i] == kLongVowelMark) continue;
    out.push_back(fold(cps[i]));
  }
  return encode_utf8(out);
}

// Number of characters (code points) in a UTF-8 string.
inline std::size_t char_count(std::string_view s) { return decode_utf8(s).size(); }

inline bool is_hiragana_only(std::string_view s) {
  const auto cps = decode_utf8(s);
  if (cps.empty()) return false;
  for (char32_t c : cps) {
    if (!is_hiragana(c)) return false;
  }
  return true;
}

inline bool is_ascii_word(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < 'a' || c > 'z') return false;
  }
  return true;
}

}  // namespace pipscreen::psych

#endif  // PIPSCREEN_PSYCH_NORMALIZE_HPP_

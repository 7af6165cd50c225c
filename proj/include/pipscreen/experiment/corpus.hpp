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

#ifndef PIPSCREEN_EXPERIMENT_CORPUS_HPP_
#define PIPSCREEN_EXPERIMENT_CORPUS_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pipscreen/error.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/psych/normalize.hpp"

namespace pipscreen::experiment {

enum class Script { kKana, kAscii };

inline std::string to_string(Script s) { return s == Script::kKana ? "kana" : "ascii"; }

inline Script parse_script(const std::string& s) {
  if (s == "kana") return Script::kKana;
  if (s == "ascii") return Script::kAscii;
  fail(ErrorCode::kParseError, "unknown corpus script '" + s + "'");
}

// Character-count bounds an answer must satisfy to be accepted.
struct AnswerBounds {
  std::size_t min_chars = 3;
  std::size_t max_chars = 6;

  bool operator==(const AnswerBounds&) const = default;
};

inline AnswerBounds default_bounds(Script script) {
  return script == Script::kKana ? AnswerBounds{3, 6} : AnswerBounds{4, 12};
}

struct CorpusEntry {
  std::string word_id;
  std::string transcript;
  int familiarity_rank = 1;  // larger is less familiar
  std::optional<std::string> audio;  // clean 1-channel recording, relative to the corpus file

  bool operator==(const CorpusEntry&) const = default;
};

struct Corpus {
  Script script = Script::kAscii;
  std::vector<CorpusEntry> entries;
  std::filesystem::path base_dir;

  void validate() const {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      const std::string where = "entries[" + std::to_string(i) + "]";
      require(!e.word_id.empty(), ErrorCode::kParseError, where + ": empty word_id");
      require(ids.insert(e.word_id).second, ErrorCode::kParseError,
              where + ": duplicate word_id " + e.word_id);
      const std::string norm = psych::normalize_answer(e.transcript);
      require(!norm.empty(), ErrorCode::kParseError, where + ": empty transcript");
      require(script == Script::kKana ? psych::is_hiragana_only(norm) : psych::is_ascii_word(norm),
              ErrorCode::kParseError,
              where + ": transcript '" + e.transcript + "' does not match the " +
                  to_string(script) + " script");
    }
  }

  int lowest_familiarity_rank() const {
    int rank = 0;
    for (const auto& e : entries) rank = std::max(rank, e.familiarity_rank);
    return rank;
  }

  // Words of the least familiar rank, in corpus order.
  std::vector<const CorpusEntry*> pool() const {
    const int rank = lowest_familiarity_rank();
    std::vector<const CorpusEntry*> out;
    for (const auto& e : entries) {
      if (e.familiarity_rank == rank) out.push_back(&e);
    }
    return out;
  }

  const CorpusEntry& find(const std::string& word_id) const {
    for (const auto& e : entries) {
      if (e.word_id == word_id) return e;
    }
    fail(ErrorCode::kNotFound, "word " + word_id + " not in corpus");
  }
};

inline Json to_json(const Corpus& corpus) {
  Json entries = Json::array();
  for (const auto& e : corpus.entries) {
    Json j = {{"word_id", e.word_id},
              {"transcript", e.transcript},
              {"familiarity_rank", e.familiarity_rank}};
    j["audio"] = e.audio ? Json(*e.audio) : Json(nullptr);
    entries.push_back(j);
  }
  return {{"script", to_string(corpus.script)}, {"entries", entries}};
}

inline Corpus corpus_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
  Corpus c;
  c.base_dir = base_dir;
  c.script = parse_script(json_get<std::string>(j, "script", ""));
  const auto entries = json_get<Json>(j, "entries", "");
  require(entries.is_array(), ErrorCode::kParseError, "entries must be an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    CorpusEntry e;
    e.word_id = json_get<std::string>(entries[i], "word_id", where);
    e.transcript = json_get<std::string>(entries[i], "transcript", where);
    e.familiarity_rank = json_get<int>(entries[i], "familiarity_rank", where);
    if (entries[i].contains("audio") && !entries[i]["audio"].is_null()) {
      e.audio = json_get<std::string>(entries[i], "audio", where);
    }
    c.entries.push_back(std::move(e));
  }
  c.validate();
  return c;
}

inline Corpus load_corpus(const std::filesystem::path& path) {
  return corpus_from_json(read_json_file(path), path.parent_path());
}

// Romanised 4-mora pseudo-words over a consonant-vowel inventory, unique
// across the whole corpus. Word ids are "r<rank>_<nnnn>".
inline Corpus synthetic_corpus(int words_per_rank = 400, int ranks = 4, std::uint64_t seed = 1) {
  require(words_per_rank > 0 && ranks > 0, ErrorCode::kInvalidArgument,
          "corpus sizes must be positive");
  static const std::vector<std::string> kMorae = [] {
    std::vector<std::string> out;
    const char* onsets[] = {"", "k", "s", "t", "n", "h", "m", "y", "r", "w", "g", "z", "d", "b", "p"};
    const char* vowels[] = {"a", "i", "u", "e", "o"};
    for (const char* c : onsets) {
      for (const char* v : vowels) {
        const std::string m = std::string(c) + v;
        if (m == "yi" || m == "ye" || m == "wi" || m == "wu" || m == "we") continue;
        out.push_back(m);
      }
    }
    return out;
  }();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kMorae.size() - 1);
  std::set<std::string> used;
  Corpus corpus;
  corpus.script = Script::kAscii;
  for (int rank = 1; rank <= ranks; ++rank) {
    for (int i = 0; i < words_per_rank; ++i) {
      std::string word;
      do {
        word.clear();
        for (int m = 0; m < 4; ++m) word += kMorae[pick(rng)];
      } while (!used.insert(word).second);
      char id[32];
      std::snprintf(id, sizeof(id), "r%d_%04d", rank, i);
      corpus.entries.push_back({id, word, rank, std::nullopt});
    }
  }
  return corpus;
}

}  // namespace pipscreen::experiment

#endif  // PIPSCREEN_EXPERIMENT_CORPUS_HPP_

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

#ifndef PIPSCREEN_EXPERIMENT_PLAN_HPP_
#define PIPSCREEN_EXPERIMENT_PLAN_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pipscreen/enhance/method.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/experiment/corpus.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/scene/observation.hpp"
#include "pipscreen/scene/speech_like.hpp"

namespace pipscreen::experiment {

using enhance::EnhancementMethod;

struct Stimulus {
  std::string word_id;
  std::string transcript;  // server side only
  EnhancementMethod method = EnhancementMethod::kUnprocessed;
  double snr_db = 0.0;

  bool operator==(const Stimulus&) const = default;
};

struct PlanOptions {
  int words_per_cell = 20;
  int block_size = 10;
  int practice_size = 10;
  int parts = 2;

  void validate() const {
    require(words_per_cell > 0 && block_size > 0 && practice_size >= 0 && parts > 0,
            ErrorCode::kInvalidArgument, "plan sizes must be positive");
    const int total = words_per_cell * static_cast<int>(enhance::kAllMethods.size()) *
                      static_cast<int>(scene::kSnrGrid.size());
    require(total % block_size == 0 && practice_size % block_size == 0,
            ErrorCode::kInvalidArgument, "stimulus counts must be whole blocks");
    require((total / block_size) % parts == 0, ErrorCode::kInvalidArgument,
            "blocks must split evenly into parts");
  }

  bool operator==(const PlanOptions&) const = default;
};

struct SessionPlan {
  std::string participant_id;
  std::uint64_t seed = 0;
  PlanOptions options;
  std::vector<Stimulus> main;      // block b is main[b*block_size, (b+1)*block_size)
  std::vector<Stimulus> practice;  // disjoint words

  std::size_t block_count(bool is_practice) const {
    const auto& list = is_practice ? practice : main;
    return list.size() / static_cast<std::size_t>(options.block_size);
  }

  // Part (1-based) a main block belongs to.
  int part_of(std::size_t block) const {
    const std::size_t per_part = block_count(false) / static_cast<std::size_t>(options.parts);
    return static_cast<int>(block / per_part) + 1;
  }

  bool operator==(const SessionPlan&) const = default;
};

// Per-participant RNG seed: the participant id is hashed so that equal seeds
// for different participants still give different plans.
inline std::uint64_t plan_seed(const std::string& participant_id, std::uint64_t seed) {
  std::uint64_t z = scene::fnv1a(participant_id) ^ (seed + 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Shuffles the least-familiar pool, deals 20 words to each (method, SNR)
// cell, shuffles the presentation order and cuts it into blocks. Practice
// words are drawn from corpus entries not used in the main list.
inline SessionPlan create_session(const Corpus& corpus, const std::string& participant_id,
                                  std::uint64_t seed, const PlanOptions& options = {}) {
  options.validate();
  require(!participant_id.empty(), ErrorCode::kInvalidArgument, "empty participant id");
  const std::size_t n_cells = enhance::kAllMethods.size() * scene::kSnrGrid.size();
  const std::size_t n_main = n_cells * static_cast<std::size_t>(options.words_per_cell);
  auto pool = corpus.pool();
  require(pool.size() >= n_main, ErrorCode::kInsufficientCorpus,
          "least-familiar pool has " + std::to_string(pool.size()) + " words, need " +
              std::to_string(n_main));

  std::mt19937_64 rng(plan_seed(participant_id, seed));
  std::shuffle(pool.begin(), pool.end(), rng);

  SessionPlan plan;
  plan.participant_id = participant_id;
  plan.seed = seed;
  plan.options = options;
  std::set<std::string> used;
  for (std::size_t i = 0; i < n_main; ++i) {
    const std::size_t cell = i / static_cast<std::size_t>(options.words_per_cell);
    const auto method = enhance::kAllMethods[cell / scene::kSnrGrid.size()];
    const double snr = scene::kSnrGrid[cell % scene::kSnrGrid.size()];
    plan.main.push_back({pool[i]->word_id, pool[i]->transcript, method, snr});
    used.insert(pool[i]->word_id);
  }
  std::shuffle(plan.main.begin(), plan.main.end(), rng);

  std::vector<const CorpusEntry*> rest;
  for (const auto& e : corpus.entries) {
    if (used.count(e.word_id) == 0) rest.push_back(&e);
  }
  require(rest.size() >= static_cast<std::size_t>(options.practice_size),
          ErrorCode::kInsufficientCorpus, "not enough words left for the practice set");
  std::shuffle(rest.begin(), rest.end(), rng);
  std::uniform_int_distribution<std::size_t> cell_pick(0, n_cells - 1);
  for (int i = 0; i < options.practice_size; ++i) {
    const std::size_t cell = cell_pick(rng);
    plan.practice.push_back({rest[static_cast<std::size_t>(i)]->word_id,
                             rest[static_cast<std::size_t>(i)]->transcript,
                             enhance::kAllMethods[cell / scene::kSnrGrid.size()],
                             scene::kSnrGrid[cell % scene::kSnrGrid.size()]});
  }
  return plan;
}

inline Json to_json(const Stimulus& s) {
  return {{"word_id", s.word_id},
          {"transcript", s.transcript},
          {"method", enhance::to_string(s.method)},
          {"snr_db", s.snr_db}};
}

inline Stimulus stimulus_from_json(const Json& j, const std::string& where) {
  return {json_get<std::string>(j, "word_id", where),
          json_get<std::string>(j, "transcript", where),
          enhance::parse_method(json_get<std::string>(j, "method", where)),
          json_get<double>(j, "snr_db", where)};
}

inline Json to_json(const SessionPlan& plan) {
  Json main = Json::array(), practice = Json::array();
  for (const auto& s : plan.main) main.push_back(to_json(s));
  for (const auto& s : plan.practice) practice.push_back(to_json(s));
  return {{"participant_id", plan.participant_id},
          {"seed", plan.seed},
          {"options",
           {{"words_per_cell", plan.options.words_per_cell},
            {"block_size", plan.options.block_size},
            {"practice_size", plan.options.practice_size},
            {"parts", plan.options.parts}}},
          {"main", main},
          {"practice", practice}};
}

inline SessionPlan plan_from_json(const Json& j) {
  SessionPlan plan;
  plan.participant_id = json_get<std::string>(j, "participant_id", "plan");
  plan.seed = json_get<std::uint64_t>(j, "seed", "plan");
  const auto o = json_get<Json>(j, "options", "plan");
  plan.options = {json_get<int>(o, "words_per_cell", "plan.options"),
                  json_get<int>(o, "block_size", "plan.options"),
                  json_get<int>(o, "practice_size", "plan.options"),
                  json_get<int>(o, "parts", "plan.options")};
  const auto main = json_get<Json>(j, "main", "plan");
  const auto practice = json_get<Json>(j, "practice", "plan");
  for (std::size_t i = 0; i < main.size(); ++i) {
    plan.main.push_back(stimulus_from_json(main[i], "plan.main[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < practice.size(); ++i) {
    plan.practice.push_back(
        stimulus_from_json(practice[i], "plan.practice[" + std::to_string(i) + "]"));
  }
  return plan;
}

}  // namespace pipscreen::experiment

#endif  // PIPSCREEN_EXPERIMENT_PLAN_HPP_

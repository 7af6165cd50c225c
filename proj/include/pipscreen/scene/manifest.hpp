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

#ifndef PIPSCREEN_SCENE_MANIFEST_HPP_
#define PIPSCREEN_SCENE_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pipscreen/json_util.hpp"
#include "pipscreen/scene/positions.hpp"

namespace pipscreen::scene {

struct BabbleSpec {
  std::optional<std::string> path;  // WAV recording; synthesised when absent
  double duration = 30.0;
  int n_talkers = 16;
  std::uint64_t seed = 1;
};

struct SceneEntry {
  std::string word_id;
  int position_id = kDefaultPositionId;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> clean;  // synthesised from word_id when absent
  std::optional<std::string> ir;     // synthesised from position when absent
  std::string mixture;
  std::string speech;
  std::string noise;
};

struct SceneManifest {
  double sample_rate = 16000.0;
  double mic_spacing_cm = 4.0;
  double reverb_time = 0.36;
  double noise_pad_ms = 288.0;
  BabbleSpec babble;
  std::vector<SceneEntry> scenes;
  std::filesystem::path base_dir;  // relative paths resolve against this

  std::filesystem::path resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : base_dir / p;
  }
};

inline Json to_json(const SceneManifest& m) {
  Json babble = {{"duration_s", m.babble.duration},
                 {"n_talkers", m.babble.n_talkers},
                 {"seed", m.babble.seed}};
  if (m.babble.path) babble["path"] = *m.babble.path;
  Json scenes = Json::array();
  for (const auto& s : m.scenes) {
    Json e = {{"word_id", s.word_id}, {"position_id", s.position_id},
              {"snr_db", s.snr_db},   {"seed", s.seed},
              {"mixture", s.mixture}, {"speech", s.speech},
              {"noise", s.noise}};
    if (s.clean) e["clean"] = *s.clean;
    if (s.ir) e["ir"] = *s.ir;
    scenes.push_back(std::move(e));
  }
  return {{"sample_rate", m.sample_rate},   {"mic_spacing_cm", m.mic_spacing_cm},
          {"reverb_time_s", m.reverb_time}, {"noise_pad_ms", m.noise_pad_ms},
          {"babble", babble},               {"scenes", scenes}};
}

inline SceneManifest manifest_from_json(const Json& j, std::filesystem::path base_dir = {}) {
  require(j.is_object(), ErrorCode::kParseError, "scene manifest must be an object");
  SceneManifest m;
  m.base_dir = std::move(base_dir);
  m.sample_rate = json_get_or<double>(j, "sample_rate", m.sample_rate, "");
  m.mic_spacing_cm = json_get_or<double>(j, "mic_spacing_cm", m.mic_spacing_cm, "");
  m.reverb_time = json_get_or<double>(j, "reverb_time_s", m.reverb_time, "");
  m.noise_pad_ms = json_get_or<double>(j, "noise_pad_ms", m.noise_pad_ms, "");
  if (j.contains("babble")) {
    const auto& b = j.at("babble");
    if (b.contains("path")) m.babble.path = json_get<std::string>(b, "path", "babble");
    m.babble.duration = json_get_or<double>(b, "duration_s", m.babble.duration, "babble");
    m.babble.n_talkers = json_get_or<int>(b, "n_talkers", m.babble.n_talkers, "babble");
    m.babble.seed = json_get_or<std::uint64_t>(b, "seed", m.babble.seed, "babble");
  }
  require(j.contains("scenes") && j.at("scenes").is_array(), ErrorCode::kParseError,
          "missing field scenes");
  const auto& scenes = j.at("scenes");
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const std::string ctx = "scenes[" + std::to_string(i) + "]";
    const auto& e = scenes[i];
    SceneEntry s;
    s.word_id = json_get<std::string>(e, "word_id", ctx);
    s.position_id = json_get_or<int>(e, "position_id", kDefaultPositionId, ctx);
    s.snr_db = json_get<double>(e, "snr_db", ctx);
    s.seed = json_get<std::uint64_t>(e, "seed", ctx);
    if (e.contains("clean")) s.clean = json_get<std::string>(e, "clean", ctx);
    if (e.contains("ir")) s.ir = json_get<std::string>(e, "ir", ctx);
    s.mixture = json_get<std::string>(e, "mixture", ctx);
    s.speech = json_get<std::string>(e, "speech", ctx);
    s.noise = json_get<std::string>(e, "noise", ctx);
    m.scenes.push_back(std::move(s));
  }
  return m;
}

inline SceneManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_json_file(path), path.parent_path());
}

inline std::string snr_tag(double snr_db) {
  const long v = std::lround(snr_db);
  return std::string(v < 0 ? "m" : "p") + (std::abs(v) < 10 ? "0" : "") +
         std::to_string(std::abs(v));
}

// Grid manifest: every word at every SNR, one position, seeds derived from
// the base seed and the scene index.
inline SceneManifest grid_manifest(const std::vector<std::string>& word_ids,
                                   const std::vector<double>& snrs, int position_id,
                                   std::uint64_t base_seed) {
  SceneManifest m;
  std::uint64_t index = 0;
  for (const auto& word : word_ids) {
    for (double snr : snrs) {
      const std::string stem = word + "_snr" + snr_tag(snr);
      m.scenes.push_back({word, position_id, snr, base_seed * 1000003ull + index++,
                          std::nullopt, std::nullopt, "mixture/" + stem + ".wav",
                          "speech/" + stem + ".wav", "noise/" + stem + ".wav"});
    }
  }
  return m;
}

}  // namespace pipscreen::scene

#endif  // PIPSCREEN_SCENE_MANIFEST_HPP_

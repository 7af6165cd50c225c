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

#ifndef PIPSCREEN_SCENE_POSITIONS_HPP_
#define PIPSCREEN_SCENE_POSITIONS_HPP_

#include <array>
#include <string>

#include "pipscreen/error.hpp"

namespace pipscreen::scene {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

struct SourcePosition {
  double azimuth_deg = 0.0;  // from broadside, positive towards microphone 1
  double distance_cm = 100.0;
  int position_id = 0;       // 0 = user defined

  void validate() const {
    require(distance_cm > 0.0, ErrorCode::kInvalidArgument,
            "source distance must be positive");
  }
};

// The twelve measured loudspeaker positions: a 3 x 3 grid of directions and
// distances, plus three wide angles at 90 cm.
inline constexpr std::array<SourcePosition, 12> kPresetPositions = {{
    {-30.0, 70.0, 1}, {-30.0, 100.0, 2}, {-30.0, 130.0, 3},
    {0.0, 70.0, 4},   {0.0, 100.0, 5},   {0.0, 130.0, 6},
    {30.0, 70.0, 7},  {30.0, 100.0, 8},  {30.0, 130.0, 9},
    {90.0, 90.0, 10}, {-75.0, 90.0, 11}, {-105.0, 90.0, 12},
}};

inline constexpr int kDefaultPositionId = 5;

inline SourcePosition preset_position(int id) {
  for (const auto& p : kPresetPositions) {
    if (p.position_id == id) return p;
  }
  fail(ErrorCode::kInvalidArgument, "unknown position id " + std::to_string(id));
}

}  // namespace pipscreen::scene

#endif  // PIPSCREEN_SCENE_POSITIONS_HPP_

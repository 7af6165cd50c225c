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

#ifndef PIPSCREEN_ENHANCE_METHOD_HPP_
#define PIPSCREEN_ENHANCE_METHOD_HPP_

#include <array>
#include <string>
#include <string_view>

#include "pipscreen/error.hpp"

namespace pipscreen::enhance {

enum class EnhancementMethod { kUnprocessed, kMask1chIrm, kMvdr2chIrm, kMvdr2chEst };

inline constexpr std::array<EnhancementMethod, 4> kAllMethods = {
    EnhancementMethod::kUnprocessed, EnhancementMethod::kMask1chIrm,
    EnhancementMethod::kMvdr2chIrm, EnhancementMethod::kMvdr2chEst};

inline std::string_view to_string(EnhancementMethod method) {
  switch (method) {
    case EnhancementMethod::kUnprocessed: return "unprocessed";
    case EnhancementMethod::kMask1chIrm: return "mask1ch_irm";
    case EnhancementMethod::kMvdr2chIrm: return "mvdr2ch_irm";
    case EnhancementMethod::kMvdr2chEst: return "mvdr2ch_est";
  }
  return "unknown";
}

inline EnhancementMethod parse_method(std::string_view text) {
  for (auto m : kAllMethods) {
    if (to_string(m) == text) return m;
  }
  fail(ErrorCode::kUnknownCondition, "unknown enhancement method '" + std::string(text) + "'");
}

inline std::size_t method_index(EnhancementMethod method) {
  return static_cast<std::size_t>(method);
}

}  // namespace pipscreen::enhance

#endif  // PIPSCREEN_ENHANCE_METHOD_HPP_

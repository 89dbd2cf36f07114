// Copyright 2026 The hfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Basic vocabulary types shared by every hfuzz module.

#ifndef HFUZZ_TYPES_H_
#define HFUZZ_TYPES_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hfuzz {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

// Identifies a program location: a basic block (for coverage) or a
// buffer-write / allocation site (for the memory runtime).
struct LocationId {
  uint32_t value = 0;

  friend constexpr auto operator<=>(LocationId, LocationId) = default;
};

// Stable id for a named program location (32-bit FNV-1a of the label).
constexpr LocationId Loc(std::string_view label) {
  uint32_t h = 2166136261u;
  for (char c : label) {
    h ^= static_cast<uint8_t>(c);
    h *= 16777619u;
  }
  return LocationId{h};
}

inline std::string ToString(LocationId id) { return std::to_string(id.value); }

// How a single target run is instrumented.
//   kCoverageOnly:     edge coverage, no headroom walks (the fast fuzzing run).
//   kHeadroomProfiled: headroom profile, no coverage (the driver's run).
//   kPlainDetect:      overrun detection only (crash triage).
enum class ExecutionMode { kCoverageOnly, kHeadroomProfiled, kPlainDetect };

std::string_view ExecutionModeName(ExecutionMode mode);

}  // namespace hfuzz

template <>
struct std::hash<hfuzz::LocationId> {
  size_t operator()(hfuzz::LocationId id) const noexcept {
    return std::hash<uint32_t>{}(id.value);
  }
};

#endif  // HFUZZ_TYPES_H_

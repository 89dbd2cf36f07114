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

// AFL-style edge coverage: a hashed edge-hit-count map, hit-count bucketing,
// and the "does this run add anything new" fitness check.

#ifndef HFUZZ_COVERAGE_RUNTIME_H_
#define HFUZZ_COVERAGE_RUNTIME_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hfuzz/types.h"

namespace hfuzz {

inline constexpr size_t kDefaultCoverageMapSize = 1 << 16;

// Maps a raw hit count to its bucket code: one bit per class
// {1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+}; 0 stays 0.
constexpr uint8_t BucketFor(uint32_t count) {
  if (count == 0) return 0;
  if (count == 1) return 1;
  if (count == 2) return 2;
  if (count == 3) return 4;
  if (count <= 7) return 8;
  if (count <= 15) return 16;
  if (count <= 31) return 32;
  if (count <= 127) return 64;
  return 128;
}

// Bucketed edge-hit map of a single run.
class CoverageProfile {
 public:
  CoverageProfile() = default;
  explicit CoverageProfile(std::vector<uint8_t> buckets)
      : buckets_(std::move(buckets)) {}

  const std::vector<uint8_t>& buckets() const { return buckets_; }
  size_t size() const { return buckets_.size(); }
  // Number of nonzero slots.
  size_t Breadth() const;

  friend bool operator==(const CoverageProfile&,
                         const CoverageProfile&) = default;

 private:
  friend class CoverageMap;
  std::vector<uint8_t> buckets_;
};

// Per-run edge counter. Reset() before each run; TraceEdge() at every basic
// block; Finalize() to obtain the bucketed profile.
class CoverageMap {
 public:
  explicit CoverageMap(size_t map_size = kDefaultCoverageMapSize);

  void Reset();
  void TraceEdge(LocationId loc) {
    const uint32_t cur = loc.value;
    uint8_t& slot = counts_[(cur ^ prev_) % counts_.size()];
    if (slot != 0xff) ++slot;  // saturates inside the 128+ bucket
    prev_ = cur >> 1;
  }

  // Raw (unbucketed) count at a slot; for tests.
  uint8_t raw_count(size_t slot) const { return counts_[slot]; }
  size_t size() const { return counts_.size(); }

  // Writes the bucketed counts into `out`, reusing its storage.
  void Finalize(CoverageProfile& out) const;
  CoverageProfile Finalize() const;

 private:
  std::vector<uint8_t> counts_;
  uint32_t prev_ = 0;
};

// Union of all bucket codes retained so far; only ever gains bits.
class GlobalCoverage {
 public:
  explicit GlobalCoverage(size_t map_size = kDefaultCoverageMapSize)
      : seen_(map_size, 0) {}

  const std::vector<uint8_t>& seen() const { return seen_; }
  size_t Breadth() const;

 private:
  friend bool IsFit(const CoverageProfile&, GlobalCoverage&);
  friend bool WouldBeFit(const CoverageProfile&, const GlobalCoverage&);
  std::vector<uint8_t> seen_;
};

// True iff some slot of `profile` has a bucket not yet in `global`; when true
// `global` absorbs the profile.
bool IsFit(const CoverageProfile& profile, GlobalCoverage& global);

// The same test without absorbing.
bool WouldBeFit(const CoverageProfile& profile, const GlobalCoverage& global);

}  // namespace hfuzz

#endif  // HFUZZ_COVERAGE_RUNTIME_H_

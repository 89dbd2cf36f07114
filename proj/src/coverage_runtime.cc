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

#include "hfuzz/coverage_runtime.h"

#include <algorithm>
#include <array>
#include <cassert>
#include <cstring>

namespace hfuzz {
namespace {

constexpr std::array<uint8_t, 256> MakeBucketTable() {
  std::array<uint8_t, 256> table{};
  for (uint32_t i = 0; i < 256; ++i) table[i] = BucketFor(i);
  return table;
}
constexpr std::array<uint8_t, 256> kBucketTable = MakeBucketTable();

size_t CountNonZero(const std::vector<uint8_t>& v) {
  return static_cast<size_t>(
      std::count_if(v.begin(), v.end(), [](uint8_t b) { return b != 0; }));
}

// Word-at-a-time scan; the maps are mostly zero.
template <bool kAbsorb, typename Seen>
bool HasNewBits(const std::vector<uint8_t>& profile, Seen& seen) {
  assert(profile.size() == seen.size());
  const size_t n = profile.size();
  bool fit = false;
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    uint64_t p, s;
    std::memcpy(&p, profile.data() + i, 8);
    if (p == 0) continue;
    std::memcpy(&s, seen.data() + i, 8);
    if ((p & ~s) == 0) continue;
    fit = true;
    if constexpr (!kAbsorb) {
      return true;
    } else {
      s |= p;
      std::memcpy(seen.data() + i, &s, 8);
    }
  }
  for (; i < n; ++i) {
    if ((profile[i] & ~seen[i]) == 0) continue;
    fit = true;
    if constexpr (!kAbsorb) {
      return true;
    } else {
      seen[i] |= profile[i];
    }
  }
  return fit;
}

}  // namespace

size_t CoverageProfile::Breadth() const { return CountNonZero(buckets_); }

size_t GlobalCoverage::Breadth() const { return CountNonZero(seen_); }

CoverageMap::CoverageMap(size_t map_size) : counts_(map_size, 0) {
  assert(map_size > 0);
}

void CoverageMap::Reset() {
  std::memset(counts_.data(), 0, counts_.size());
  prev_ = 0;
}

void CoverageMap::Finalize(CoverageProfile& out) const {
  out.buckets_.resize(counts_.size());
  const size_t n = counts_.size();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    uint64_t word;
    std::memcpy(&word, counts_.data() + i, 8);
    if (word == 0) {
      std::memset(out.buckets_.data() + i, 0, 8);
      continue;
    }
    for (size_t j = i; j < i + 8; ++j) out.buckets_[j] = kBucketTable[counts_[j]];
  }
  for (; i < n; ++i) out.buckets_[i] = kBucketTable[counts_[i]];
}

CoverageProfile CoverageMap::Finalize() const {
  CoverageProfile profile;
  Finalize(profile);
  return profile;
}

bool IsFit(const CoverageProfile& profile, GlobalCoverage& global) {
  return HasNewBits<true>(profile.buckets(), global.seen_);
}

bool WouldBeFit(const CoverageProfile& profile, const GlobalCoverage& global) {
  return HasNewBits<false>(profile.buckets(), global.seen_);
}

}  // namespace hfuzz

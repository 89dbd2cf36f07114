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

// A granule-level model of ASAN-style shadow memory.
//
// Main memory is divided into granules of `granule_bytes` bytes; the shadow
// map keeps one ShadowCode per granule. Every buffer is laid out as
//
//   [ left redzone (R) | buffer (k granules) | right redzone (R) ]
//
// so each buffer owns its redzones exclusively. Buffers are rounded up to
// whole granules; there is no partial-granule poisoning, which makes
// overrun detection granule-precise.
//
// On top of detection, a write in kHeadroomProfiled mode walks the shadow map
// from the written granule to the nearest right and left redzones and records
// the scaled headroom of the write site: how close (relative to the buffer
// size, scaled to [1,128]) the write came to the end of its buffer. The
// per-site minimum over a run is the run's headroom profile.

#ifndef HFUZZ_SHADOW_RUNTIME_H_
#define HFUZZ_SHADOW_RUNTIME_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "hfuzz/types.h"

namespace hfuzz {

enum class ShadowCode : uint8_t {
  kUnallocated = 0,
  kAddressable,
  kLeftRedzone,
  kRightRedzone,
};

struct ShadowConfig {
  size_t granule_bytes = 8;       // must be a power of two
  size_t redzone_granules = 2;    // per side, >= 1
  size_t capacity_granules = 1 << 16;
};

absl::Status ValidateShadowConfig(const ShadowConfig& config);

class ShadowMap {
 public:
  ShadowMap(size_t granule_bytes, size_t capacity_granules);

  // Granules outside the map read as kUnallocated.
  ShadowCode code(int64_t granule) const {
    if (granule < 0 || granule >= static_cast<int64_t>(codes_.size())) {
      return ShadowCode::kUnallocated;
    }
    return codes_[static_cast<size_t>(granule)];
  }
  void Mark(int64_t begin, int64_t end, ShadowCode code);
  void Clear();

  size_t granule_bytes() const { return granule_bytes_; }
  size_t capacity() const { return codes_.size(); }

  // Main-memory byte address -> granule index (floor division).
  int64_t GranuleOf(int64_t byte_address) const;

 private:
  std::vector<ShadowCode> codes_;
  size_t granule_bytes_;
  int granule_shift_;
  int64_t high_water_ = 0;  // codes_[high_water_..] are all kUnallocated
};

struct BufferHandle {
  int64_t base_granule = 0;
  size_t size_granules = 0;
  size_t size_bytes = 0;
  LocationId alloc_site;
  uint64_t serial = 0;  // distinguishes reallocations at the same address

  friend bool operator==(const BufferHandle&, const BufferHandle&) = default;
};

inline constexpr uint8_t kMaxHeadroom = 128;

// Per-site minimum scaled headroom of one run. Absent sites mean 128.
class HeadroomProfile {
 public:
  using Entries = std::map<LocationId, uint8_t>;

  HeadroomProfile() = default;
  explicit HeadroomProfile(Entries entries) : entries_(std::move(entries)) {}

  uint8_t Get(LocationId site) const {
    auto it = entries_.find(site);
    return it == entries_.end() ? kMaxHeadroom : it->second;
  }
  // Keeps the minimum across visits. `value` must be in [1,128].
  void Lower(LocationId site, uint8_t value);

  const Entries& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

  friend bool operator==(const HeadroomProfile&,
                         const HeadroomProfile&) = default;

 private:
  Entries entries_;
};

struct CrashReport {
  LocationId store_idx;
  uint64_t input_id = 0;
  int64_t write_granule = 0;     // first faulting granule of the write
  int64_t overrun_granules = 0;  // distance past the end (or before start)

  friend bool operator==(const CrashReport&, const CrashReport&) = default;
};

struct WriteOutcome {
  std::optional<CrashReport> crash;
  std::optional<uint8_t> scaled_headroom;  // set in kHeadroomProfiled mode

  bool overrun() const { return crash.has_value(); }
};

// Walks right to the first right-redzone granule and left to the first
// left-redzone granule, scales, and lowers `profile` at `store_idx`.
// Requires shadow.code(write_granule) == kAddressable.
uint8_t CalculateHeadroom(int64_t write_granule, LocationId store_idx,
                          const ShadowMap& shadow, HeadroomProfile& profile);

class ShadowRuntime {
 public:
  explicit ShadowRuntime(ShadowConfig config = {});

  // ResourceExhausted when no free range can hold the buffer plus redzones.
  absl::StatusOr<BufferHandle> AllocBuffer(size_t size_bytes,
                                           LocationId alloc_site);
  // FailedPrecondition on double free or an unknown handle.
  absl::Status FreeBuffer(const BufferHandle& handle);

  WriteOutcome CheckedWrite(const BufferHandle& handle, int64_t offset_bytes,
                            size_t len_bytes, LocationId store_idx,
                            ExecutionMode mode);

  HeadroomProfile SnapshotProfile() const { return profile_; }
  const HeadroomProfile& profile() const { return profile_; }
  void ResetProfile() { profile_.clear(); }

  // Releases every buffer; the next allocation starts from a clean map.
  void ResetMemory();

  const ShadowMap& shadow() const { return shadow_; }
  const ShadowConfig& config() const { return config_; }
  size_t live_buffers() const { return live_.size(); }

 private:
  struct Block {
    BufferHandle handle;
    int64_t start = 0;  // first left-redzone granule
    int64_t length = 0;
  };

  void Release(int64_t start, int64_t length);

  ShadowConfig config_;
  ShadowMap shadow_;
  HeadroomProfile profile_;
  std::map<int64_t, int64_t> free_;  // start -> length, non-adjacent
  std::map<int64_t, Block> live_;    // keyed by base_granule
  uint64_t next_serial_ = 1;
};

}  // namespace hfuzz

#endif  // HFUZZ_SHADOW_RUNTIME_H_

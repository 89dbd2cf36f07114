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

#include "hfuzz/shadow_runtime.h"

#include <algorithm>
#include <bit>
#include <cassert>

#include "absl/strings/str_cat.h"

namespace hfuzz {

std::string_view ExecutionModeName(ExecutionMode mode) {
  switch (mode) {
    case ExecutionMode::kCoverageOnly:
      return "coverage";
    case ExecutionMode::kHeadroomProfiled:
      return "headroom";
    case ExecutionMode::kPlainDetect:
      return "detect";
  }
  return "?";
}

absl::Status ValidateShadowConfig(const ShadowConfig& config) {
  if (config.granule_bytes == 0 || !std::has_single_bit(config.granule_bytes)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "granule size must be a power of two, got ", config.granule_bytes));
  }
  if (config.redzone_granules < 1) {
    return absl::InvalidArgumentError("redzone width must be >= 1 granule");
  }
  if (config.capacity_granules < 2 * config.redzone_granules + 1) {
    return absl::InvalidArgumentError("shadow capacity too small");
  }
  return absl::OkStatus();
}

ShadowMap::ShadowMap(size_t granule_bytes, size_t capacity_granules)
    : codes_(capacity_granules, ShadowCode::kUnallocated),
      granule_bytes_(granule_bytes),
      granule_shift_(std::countr_zero(granule_bytes)) {
  assert(std::has_single_bit(granule_bytes));
}

void ShadowMap::Mark(int64_t begin, int64_t end, ShadowCode code) {
  assert(begin >= 0 && end <= static_cast<int64_t>(codes_.size()));
  std::fill(codes_.begin() + begin, codes_.begin() + end, code);
  if (code != ShadowCode::kUnallocated) high_water_ = std::max(high_water_, end);
}

void ShadowMap::Clear() {
  std::fill(codes_.begin(), codes_.begin() + high_water_,
            ShadowCode::kUnallocated);
  high_water_ = 0;
}

int64_t ShadowMap::GranuleOf(int64_t byte_address) const {
  // Arithmetic shift floors for negative addresses too.
  return byte_address >> granule_shift_;
}

void HeadroomProfile::Lower(LocationId site, uint8_t value) {
  assert(value >= 1 && value <= kMaxHeadroom);
  auto [it, inserted] = entries_.try_emplace(site, value);
  if (!inserted) it->second = std::min(it->second, value);
}

uint8_t CalculateHeadroom(int64_t write_granule, LocationId store_idx,
                          const ShadowMap& shadow, HeadroomProfile& profile) {
  assert(shadow.code(write_granule) == ShadowCode::kAddressable);
  const int64_t limit = static_cast<int64_t>(shadow.capacity());
  int64_t end = write_granule;
  int64_t beg = write_granule;
  int64_t raw_headroom = 0;
  int64_t left_margin = 0;
  while (shadow.code(end) != ShadowCode::kRightRedzone) {
    ++end;
    ++raw_headroom;
    assert(end < limit);
  }
  while (shadow.code(beg) != ShadowCode::kLeftRedzone) {
    --beg;
    ++left_margin;
    assert(beg >= 0);
  }
  (void)limit;
  // left_margin + raw_headroom - 1 is the buffer size in granules.
  const auto scaled = static_cast<uint8_t>(
      (raw_headroom * kMaxHeadroom) / (left_margin + raw_headroom - 1));
  profile.Lower(store_idx, scaled);
  return scaled;
}

ShadowRuntime::ShadowRuntime(ShadowConfig config)
    : config_(config),
      shadow_(config.granule_bytes, config.capacity_granules) {
  assert(ValidateShadowConfig(config).ok());
  free_.emplace(0, static_cast<int64_t>(config_.capacity_granules));
}

absl::StatusOr<BufferHandle> ShadowRuntime::AllocBuffer(size_t size_bytes,
                                                        LocationId alloc_site) {
  if (size_bytes == 0) {
    return absl::InvalidArgumentError("zero-sized allocation");
  }
  const auto granules = static_cast<int64_t>(
      (size_bytes + config_.granule_bytes - 1) / config_.granule_bytes);
  const auto rz = static_cast<int64_t>(config_.redzone_granules);
  const int64_t need = granules + 2 * rz;
  auto it = std::find_if(free_.begin(), free_.end(),
                         [need](const auto& r) { return r.second >= need; });
  if (it == free_.end()) {
    return absl::ResourceExhaustedError(
        absl::StrCat("shadow capacity exhausted allocating ", size_bytes,
                     " bytes at site ", alloc_site.value));
  }
  const int64_t start = it->first;
  const int64_t remaining = it->second - need;
  free_.erase(it);
  if (remaining > 0) free_.emplace(start + need, remaining);

  const int64_t base = start + rz;
  shadow_.Mark(start, base, ShadowCode::kLeftRedzone);
  shadow_.Mark(base, base + granules, ShadowCode::kAddressable);
  shadow_.Mark(base + granules, base + granules + rz,
               ShadowCode::kRightRedzone);

  BufferHandle handle{base, static_cast<size_t>(granules), size_bytes,
                      alloc_site, next_serial_++};
  live_.emplace(base, Block{handle, start, need});
  return handle;
}

absl::Status ShadowRuntime::FreeBuffer(const BufferHandle& handle) {
  auto it = live_.find(handle.base_granule);
  if (it == live_.end() || it->second.handle.serial != handle.serial) {
    return absl::FailedPreconditionError(
        absl::StrCat("free of a buffer that is not live (base granule ",
                     handle.base_granule, ")"));
  }
  const Block block = it->second;
  live_.erase(it);
  shadow_.Mark(block.start, block.start + block.length,
               ShadowCode::kUnallocated);
  Release(block.start, block.length);
  return absl::OkStatus();
}

void ShadowRuntime::Release(int64_t start, int64_t length) {
  auto next = free_.lower_bound(start);
  if (next != free_.end() && start + length == next->first) {
    length += next->second;
    next = free_.erase(next);
  }
  if (next != free_.begin()) {
    auto prev = std::prev(next);
    if (prev->first + prev->second == start) {
      prev->second += length;
      return;
    }
  }
  free_.emplace(start, length);
}

void ShadowRuntime::ResetMemory() {
  shadow_.Clear();
  live_.clear();
  free_.clear();
  free_.emplace(0, static_cast<int64_t>(config_.capacity_granules));
}

WriteOutcome ShadowRuntime::CheckedWrite(const BufferHandle& handle,
                                         int64_t offset_bytes,
                                         size_t len_bytes, LocationId store_idx,
                                         ExecutionMode mode) {
  assert(len_bytes >= 1);
  const auto g = static_cast<int64_t>(config_.granule_bytes);
  const int64_t first_byte = handle.base_granule * g + offset_bytes;
  const int64_t last_byte = first_byte + static_cast<int64_t>(len_bytes) - 1;
  const int64_t first = shadow_.GranuleOf(first_byte);
  const int64_t last = shadow_.GranuleOf(last_byte);
  const int64_t buf_begin = handle.base_granule;
  const int64_t buf_end =
      handle.base_granule + static_cast<int64_t>(handle.size_granules);

  WriteOutcome outcome;
  // The first granule of the write that is outside the handle's range or not
  // addressable in shadow memory is the faulting one.
  for (int64_t gr = first; gr <= last; ++gr) {
    const bool in_range = gr >= buf_begin && gr < buf_end;
    if (in_range && shadow_.code(gr) == ShadowCode::kAddressable) continue;
    int64_t overrun = 0;
    if (last >= buf_end) {
      overrun = last - (buf_end - 1);
    } else if (first < buf_begin) {
      overrun = buf_begin - first;
    }
    outcome.crash = CrashReport{store_idx, 0, gr, overrun};
    return outcome;
  }
  if (mode == ExecutionMode::kHeadroomProfiled) {
    outcome.scaled_headroom =
        CalculateHeadroom(last, store_idx, shadow_, profile_);
  }
  return outcome;
}

}  // namespace hfuzz

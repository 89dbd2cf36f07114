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

// The headroom driver worker.
//
// For every CandidateBatch taken from Q_A the driver runs each sample with
// headroom instrumentation, in order. A sample whose profile is strictly
// below the global minimum profile at any site is kept and the minimum is
// lowered elementwise before the next sample is evaluated. Kept samples go
// back to the fuzzer on Q_R together with the batch parent.
//
// Samples that overrun are always kept and logged as crash candidates.

#ifndef HFUZZ_HEADROOM_DRIVER_H_
#define HFUZZ_HEADROOM_DRIVER_H_

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>

#include "hfuzz/fuzzer_core.h"
#include "hfuzz/shadow_runtime.h"
#include "hfuzz/target_harness.h"

namespace hfuzz {

// Global elementwise minimum over all processed headroom profiles. Sites
// never visited read as 128.
class MinHProfile {
 public:
  uint8_t Get(LocationId site) const {
    auto it = entries_.find(site);
    return it == entries_.end() ? kMaxHeadroom : it->second;
  }
  void Absorb(const HeadroomProfile& profile);
  const std::map<LocationId, uint8_t>& entries() const { return entries_; }

  friend bool operator==(const MinHProfile&, const MinHProfile&) = default;

 private:
  std::map<LocationId, uint8_t> entries_;
};

// True iff profile[s] < min[s] for some site s.
bool IsLess(const HeadroomProfile& profile, const MinHProfile& min);

// The retention rule on its own: keeps a profile iff IsLess, absorbing it
// when kept.
class HeadroomSelector {
 public:
  bool Consider(const HeadroomProfile& profile);
  const MinHProfile& min_profile() const { return min_; }

 private:
  MinHProfile min_;
};

struct DriverConfig {
  HarnessConfig harness;
  // Never dequeue; models a driver that has fallen arbitrarily far behind.
  bool stall = false;
};

struct DriverStats {
  uint64_t execs = 0;
  uint64_t batches = 0;
  uint64_t retained = 0;
  uint64_t batches_sent = 0;
};

class HeadroomDriver {
 public:
  HeadroomDriver(const Target& target, DriverConfig config, CandidateQueue* qa,
                 RetainQueue* qr, Clock::time_point start);

  // Runs one batch; nullopt when nothing was kept.
  std::optional<RetainBatch> ProcessBatch(const CandidateBatch& batch);

  // Blocks on Q_A until it is closed or RequestStop() is called.
  void Run();
  // Processes every batch currently queued without blocking. Returns the
  // number of batches handled.
  size_t DrainAvailable();
  void RequestStop() { stop_.store(true, std::memory_order_relaxed); }

  // Appends `timestamp,site,min` rows for every visited site.
  void set_headroom_output(std::ostream* out) { headroom_out_ = out; }
  void WriteHeadroomHeader();
  void WriteHeadroomRows();

  const MinHProfile& min_profile() const { return selector_.min_profile(); }
  const CrashLog& crashes() const { return crashes_; }
  DriverStats stats() const;

 private:
  void Deliver(RetainBatch batch);
  void MaybeWriteHeadroom();
  double Elapsed() const;

  const Target& target_;
  DriverConfig config_;
  CandidateQueue* qa_;
  RetainQueue* qr_;
  Clock::time_point start_;
  Executor executor_;
  HeadroomSelector selector_;
  CrashLog crashes_;

  std::atomic<bool> stop_{false};
  std::atomic<uint64_t> execs_{0};
  std::atomic<uint64_t> batches_{0};
  std::atomic<uint64_t> retained_{0};
  std::atomic<uint64_t> batches_sent_{0};

  std::ostream* headroom_out_ = nullptr;
  int64_t last_headroom_second_ = -1;
};

}  // namespace hfuzz

#endif  // HFUZZ_HEADROOM_DRIVER_H_

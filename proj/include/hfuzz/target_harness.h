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

// In-process targets and their execution.
//
// A Target is a deterministic procedure over (input bytes, ExecContext). It
// reports basic blocks through ExecContext::Block() and performs every buffer
// allocation and write through the context, which forwards them to the shadow
// runtime. One target body serves all three execution modes; the mode only
// selects the bookkeeping (coverage map, headroom walks, or neither).
//
// An overrun or an engine failure unwinds the target immediately; targets
// must not catch exceptions thrown by the context.

#ifndef HFUZZ_TARGET_HARNESS_H_
#define HFUZZ_TARGET_HARNESS_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "hfuzz/coverage_runtime.h"
#include "hfuzz/shadow_runtime.h"
#include "hfuzz/types.h"

namespace hfuzz {

struct HarnessConfig {
  ShadowConfig shadow;
  size_t coverage_map_size = kDefaultCoverageMapSize;
  uint64_t step_budget = 1'000'000;  // blocks + memory events per run
  size_t max_input_len = 4096;
};

class ExecContext {
 public:
  ExecContext(const HarnessConfig& config, ShadowRuntime& memory,
              CoverageMap& coverage);

  BufferHandle Alloc(size_t size_bytes, LocationId alloc_site);
  void Free(const BufferHandle& handle);
  // Unwinds the target on overrun.
  void Write(const BufferHandle& handle, int64_t offset_bytes, size_t len_bytes,
             LocationId store_idx);
  void Block(LocationId loc) {
    Step();
    if (mode_ == ExecutionMode::kCoverageOnly) coverage_.TraceEdge(loc);
  }

  ExecutionMode mode() const { return mode_; }

 private:
  friend class Executor;

  void Step();
  void Begin(ExecutionMode mode);

  const HarnessConfig& config_;
  ShadowRuntime& memory_;
  CoverageMap& coverage_;
  ExecutionMode mode_ = ExecutionMode::kPlainDetect;
  uint64_t steps_ = 0;
  std::optional<CrashReport> crash_;
};

struct Target {
  std::string name;
  std::function<void(ByteSpan, ExecContext&)> entry;
  // Ground truth for evaluation only; the engine never consults these.
  std::set<LocationId> declared_vuln_sites;
  std::map<LocationId, std::string> site_labels;
  Bytes seed;                               // benign starting input
  std::map<LocationId, Bytes> witnesses;    // one overrunning input per site
};

enum class RunOutcome { kCompleted, kOverrun, kEngineError };

std::string_view RunOutcomeName(RunOutcome outcome);

struct RunResult {
  RunOutcome outcome = RunOutcome::kCompleted;
  std::optional<CrashReport> crash;          // iff kOverrun
  std::optional<CoverageProfile> coverage;   // iff mode == kCoverageOnly
  std::optional<HeadroomProfile> headroom;   // iff mode == kHeadroomProfiled
  std::chrono::nanoseconds exec_time{0};
  std::string error;                         // iff kEngineError
};

// Reusable execution state for one target. Each Run() starts from fresh
// runtime state: buffers re-laid-out, coverage and headroom reset.
class Executor {
 public:
  explicit Executor(const Target& target, HarnessConfig config = {});

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  // The returned reference is valid until the next Run().
  const RunResult& Run(ByteSpan input, ExecutionMode mode);

  const Target& target() const { return target_; }
  const HarnessConfig& config() const { return config_; }
  uint64_t runs() const { return runs_; }

 private:
  const Target& target_;
  HarnessConfig config_;
  ShadowRuntime memory_;
  CoverageMap coverage_;
  ExecContext context_;
  RunResult result_;
  uint64_t runs_ = 0;
};

// One-shot convenience wrapper around Executor.
RunResult RunTarget(const Target& target, ByteSpan input, ExecutionMode mode,
                    const HarnessConfig& config = {});

}  // namespace hfuzz

#endif  // HFUZZ_TARGET_HARNESS_H_

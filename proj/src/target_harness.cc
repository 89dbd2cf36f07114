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

#include "hfuzz/target_harness.h"

#include <exception>
#include <string>
#include <utility>

#include "absl/strings/str_cat.h"

namespace hfuzz {
namespace {

// Thrown through the target to stop it at the faulting write.
struct OverrunUnwind {};

struct EngineAbort {
  std::string message;
};

}  // namespace

std::string_view RunOutcomeName(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::kCompleted:
      return "completed";
    case RunOutcome::kOverrun:
      return "overrun";
    case RunOutcome::kEngineError:
      return "engine_error";
  }
  return "?";
}

ExecContext::ExecContext(const HarnessConfig& config, ShadowRuntime& memory,
                         CoverageMap& coverage)
    : config_(config), memory_(memory), coverage_(coverage) {}

void ExecContext::Begin(ExecutionMode mode) {
  mode_ = mode;
  steps_ = 0;
  crash_.reset();
  memory_.ResetMemory();
  memory_.ResetProfile();
  if (mode == ExecutionMode::kCoverageOnly) coverage_.Reset();
}

void ExecContext::Step() {
  if (++steps_ > config_.step_budget) {
    throw EngineAbort{absl::StrCat("step budget of ", config_.step_budget,
                                   " exceeded")};
  }
}

BufferHandle ExecContext::Alloc(size_t size_bytes, LocationId alloc_site) {
  Step();
  auto handle = memory_.AllocBuffer(size_bytes, alloc_site);
  if (!handle.ok()) throw EngineAbort{std::string(handle.status().message())};
  return *handle;
}

void ExecContext::Free(const BufferHandle& handle) {
  Step();
  if (auto status = memory_.FreeBuffer(handle); !status.ok()) {
    throw EngineAbort{std::string(status.message())};
  }
}

void ExecContext::Write(const BufferHandle& handle, int64_t offset_bytes,
                        size_t len_bytes, LocationId store_idx) {
  Step();
  WriteOutcome outcome =
      memory_.CheckedWrite(handle, offset_bytes, len_bytes, store_idx, mode_);
  if (outcome.overrun()) {
    crash_ = outcome.crash;
    throw OverrunUnwind{};
  }
}

Executor::Executor(const Target& target, HarnessConfig config)
    : target_(target),
      config_(std::move(config)),
      memory_(config_.shadow),
      coverage_(config_.coverage_map_size),
      context_(config_, memory_, coverage_) {}

const RunResult& Executor::Run(ByteSpan input, ExecutionMode mode) {
  ++runs_;
  result_.outcome = RunOutcome::kCompleted;
  result_.crash.reset();
  result_.headroom.reset();
  result_.error.clear();
  if (mode != ExecutionMode::kCoverageOnly) result_.coverage.reset();

  const auto start = std::chrono::steady_clock::now();
  context_.Begin(mode);
  if (input.size() > config_.max_input_len) {
    result_.outcome = RunOutcome::kEngineError;
    result_.error = absl::StrCat("input of ", input.size(),
                                 " bytes exceeds the maximum of ",
                                 config_.max_input_len);
  } else {
    try {
      target_.entry(input, context_);
    } catch (const OverrunUnwind&) {
      result_.outcome = RunOutcome::kOverrun;
      result_.crash = context_.crash_;
    } catch (const EngineAbort& abort) {
      result_.outcome = RunOutcome::kEngineError;
      result_.error = abort.message;
    }
  }
  if (mode == ExecutionMode::kCoverageOnly) {
    if (!result_.coverage) result_.coverage.emplace();
    coverage_.Finalize(*result_.coverage);
  } else if (mode == ExecutionMode::kHeadroomProfiled) {
    result_.headroom = memory_.SnapshotProfile();
  }
  result_.exec_time = std::chrono::steady_clock::now() - start;
  return result_;
}

RunResult RunTarget(const Target& target, ByteSpan input, ExecutionMode mode,
                    const HarnessConfig& config) {
  Executor executor(target, config);
  return executor.Run(input, mode);
}

}  // namespace hfuzz

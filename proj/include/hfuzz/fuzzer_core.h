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

// The coverage-guided fuzzer worker.
//
// Each iteration:
//   1. takes at most one RetainBatch from Q_R without blocking and adds its
//      inputs as headroom-retained children of the batch parent;
//   2. selects the next parent (alternating coverage / headroom classes);
//   3. computes its fuzz potential N;
//   4. generates N offspring;
//   5. runs each offspring with coverage instrumentation, keeping the ones
//      that add coverage and recording overruns as crash candidates;
//   6. samples all kept offspring plus sample_pct% of the rest;
//   7. offers ⟨parent, samples⟩ to Q_A, dropping the batch if Q_A is full.
// Baseline mode skips 1, 6 and 7 and never touches either queue.

#ifndef HFUZZ_FUZZER_CORE_H_
#define HFUZZ_FUZZER_CORE_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "hfuzz/bounded_queue.h"
#include "hfuzz/corpus.h"
#include "hfuzz/coverage_runtime.h"
#include "hfuzz/mutation_engine.h"
#include "hfuzz/target_harness.h"

namespace hfuzz {

using Clock = std::chrono::steady_clock;

// ⟨t, S_n⟩: a parent and the sampled offspring sent to the driver.
struct CandidateBatch {
  TestInput parent;
  std::vector<Bytes> samples;
};

// ⟨t_h, S_h⟩: the driver's headroom-fit subset of one CandidateBatch.
struct RetainBatch {
  TestInput parent;
  std::vector<Bytes> fit;
};

using CandidateQueue = BoundedQueue<CandidateBatch>;
using RetainQueue = BoundedQueue<RetainBatch>;

enum class FuzzMode { kHdrFuzz, kBaselineCoverageOnly };

std::string_view FuzzModeName(FuzzMode mode);

struct CrashCandidate {
  LocationId site;
  Bytes input;
  double found_at_secs = 0;  // since campaign start
  std::string source;        // "fuzzer", "driver" or "corpus"
};

// First candidate per faulting site, in order of discovery.
class CrashLog {
 public:
  // True when `site` had not been seen before.
  bool Record(LocationId site, ByteSpan input, double found_at_secs,
              std::string_view source);
  const std::vector<CrashCandidate>& candidates() const { return candidates_; }
  uint64_t total() const { return total_; }

 private:
  std::vector<CrashCandidate> candidates_;
  std::map<LocationId, size_t> by_site_;
  uint64_t total_ = 0;
};

struct FuzzerConfig {
  FuzzMode mode = FuzzMode::kHdrFuzz;
  double sample_pct = 5.0;
  uint64_t rng_seed = 1;
  std::optional<uint64_t> exec_budget;
  std::optional<Clock::duration> time_budget;
  bool drain_all = false;  // take every pending RetainBatch per iteration
  HarnessConfig harness;
  MutationConfig mutation;
};

struct FuzzerStats {
  uint64_t execs = 0;
  uint64_t iterations = 0;
  uint64_t qa_sent = 0;
  uint64_t qa_drops = 0;
  uint64_t qr_received = 0;
  uint64_t crashes = 0;
};

// S_n: indices of every retained offspring plus ceil(pct% of the others),
// the latter drawn uniformly without replacement.
std::vector<size_t> SampleInputs(const std::vector<bool>& retained, double pct,
                                 Rng& rng);

class Fuzzer {
 public:
  // `qa`/`qr` may be null in baseline mode. `start` anchors timestamps.
  Fuzzer(const Target& target, Bytes seed, FuzzerConfig config,
         CandidateQueue* qa, RetainQueue* qr, Clock::time_point start);

  // Runs the seed; FailedPrecondition unless it completes.
  absl::Status Init();

  // One loop iteration. False once the budget is exhausted or a stop was
  // requested; no work is done in that case.
  bool Step();
  // Steps until Step() returns false.
  void Run();
  void RequestStop() { stop_.store(true, std::memory_order_relaxed); }

  // Appends a `stats.csv` row at most once per second while running.
  void set_stats_output(std::ostream* out) { stats_out_ = out; }
  void WriteStatsHeader();
  void WriteStatsRow();

  const CorpusTree& corpus() const { return corpus_; }
  const CrashLog& crashes() const { return crashes_; }
  const GlobalCoverage& global_coverage() const { return global_; }
  FuzzerStats stats() const;
  const FuzzerConfig& config() const { return config_; }

 private:
  bool BudgetExhausted();
  const RunResult& Execute(ByteSpan input);
  void DrainRetained();
  void AdoptRetained(const TestInput& parent, Bytes data);
  void NoteNode(InputId id, size_t breadth);
  void MaybeWriteStats();
  double Elapsed() const;

  const Target& target_;
  FuzzerConfig config_;
  CandidateQueue* qa_;
  RetainQueue* qr_;
  Clock::time_point start_;
  std::optional<Clock::time_point> deadline_;

  Executor executor_;
  CorpusTree corpus_;
  GlobalCoverage global_;
  Rng rng_;
  CrashLog crashes_;
  std::vector<size_t> breadth_;  // coverage breadth per node id
  double breadth_sum_ = 0;
  double length_sum_ = 0;

  std::atomic<bool> stop_{false};
  std::atomic<uint64_t> execs_{0};
  std::atomic<uint64_t> iterations_{0};
  std::atomic<uint64_t> qa_sent_{0};
  std::atomic<uint64_t> qa_drops_{0};
  std::atomic<uint64_t> qr_received_{0};

  std::ostream* stats_out_ = nullptr;
  int64_t last_stats_second_ = -1;
};

}  // namespace hfuzz

#endif  // HFUZZ_FUZZER_CORE_H_

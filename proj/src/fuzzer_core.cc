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

#include "hfuzz/fuzzer_core.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace hfuzz {

std::string_view FuzzModeName(FuzzMode mode) {
  return mode == FuzzMode::kHdrFuzz ? "hdr" : "baseline";
}

bool CrashLog::Record(LocationId site, ByteSpan input, double found_at_secs,
                      std::string_view source) {
  ++total_;
  if (by_site_.contains(site)) return false;
  by_site_.emplace(site, candidates_.size());
  candidates_.push_back(CrashCandidate{site, Bytes(input.begin(), input.end()),
                                       found_at_secs, std::string(source)});
  return true;
}

std::vector<size_t> SampleInputs(const std::vector<bool>& retained, double pct,
                                 Rng& rng) {
  std::vector<size_t> chosen;
  std::vector<size_t> rest;
  for (size_t i = 0; i < retained.size(); ++i) {
    (retained[i] ? chosen : rest).push_back(i);
  }
  const double fraction = std::clamp(pct, 0.0, 100.0) / 100.0;
  const auto extra = std::min(
      rest.size(),
      static_cast<size_t>(std::ceil(fraction * static_cast<double>(rest.size()) -
                                    1e-9)));
  // Partial Fisher-Yates: the first `extra` slots become a uniform sample.
  for (size_t i = 0; i < extra; ++i) {
    std::swap(rest[i], rest[i + rng.Below(rest.size() - i)]);
    chosen.push_back(rest[i]);
  }
  return chosen;
}

Fuzzer::Fuzzer(const Target& target, Bytes seed, FuzzerConfig config,
               CandidateQueue* qa, RetainQueue* qr, Clock::time_point start)
    : target_(target),
      config_(std::move(config)),
      qa_(qa),
      qr_(qr),
      start_(start),
      executor_(target, config_.harness),
      corpus_(std::move(seed)),
      global_(config_.harness.coverage_map_size),
      rng_(config_.rng_seed) {
  if (config_.time_budget) deadline_ = start_ + *config_.time_budget;
  config_.mutation.max_input_len = config_.harness.max_input_len;
  assert(config_.mode == FuzzMode::kBaselineCoverageOnly ||
         (qa_ != nullptr && qr_ != nullptr));
}

double Fuzzer::Elapsed() const {
  return std::chrono::duration<double>(Clock::now() - start_).count();
}

const RunResult& Fuzzer::Execute(ByteSpan input) {
  execs_.fetch_add(1, std::memory_order_relaxed);
  const RunResult& result = executor_.Run(input, ExecutionMode::kCoverageOnly);
  if (result.outcome == RunOutcome::kOverrun) {
    crashes_.Record(result.crash->store_idx, input, Elapsed(), "fuzzer");
  }
  return result;
}

absl::Status Fuzzer::Init() {
  const Bytes seed = corpus_.root().data;
  const RunResult& result = Execute(seed);
  if (result.outcome != RunOutcome::kCompleted) {
    return absl::FailedPreconditionError(absl::StrCat(
        "seed input does not complete on target ", target_.name, ": ",
        std::string(RunOutcomeName(result.outcome)), " ", result.error));
  }
  IsFit(*result.coverage, global_);
  NoteNode(0, result.coverage->Breadth());
  return absl::OkStatus();
}

void Fuzzer::NoteNode(InputId id, size_t breadth) {
  if (breadth_.size() <= id) breadth_.resize(id + 1, 0);
  breadth_[id] = breadth;
  breadth_sum_ += static_cast<double>(breadth);
  length_sum_ += static_cast<double>(corpus_.node(id).data.size());
}

bool Fuzzer::BudgetExhausted() {
  if (stop_.load(std::memory_order_relaxed)) return true;
  if (config_.exec_budget &&
      execs_.load(std::memory_order_relaxed) >= *config_.exec_budget) {
    return true;
  }
  if (deadline_ && Clock::now() >= *deadline_) return true;
  return false;
}

void Fuzzer::AdoptRetained(const TestInput& parent, Bytes data) {
  if (corpus_.Contains(data)) return;
  // One coverage run gives the node a breadth for fuzz-potential purposes and
  // harvests any overrun it triggers. Coverage is not absorbed: the input was
  // retained for headroom, not for coverage.
  const RunResult& result = Execute(data);
  // Like offspring, inputs that overrun stay crash artifacts only.
  if (result.outcome != RunOutcome::kCompleted) return;
  const size_t breadth = result.coverage->Breadth();
  auto added = corpus_.AddChild(parent.id, std::move(data),
                                Origin::kHeadroomRetained,
                                execs_.load(std::memory_order_relaxed));
  if (added.ok() && added->has_value()) NoteNode(**added, breadth);
}

void Fuzzer::DrainRetained() {
  do {
    std::optional<RetainBatch> batch = qr_->TryPop();
    if (!batch) return;
    qr_received_.fetch_add(1, std::memory_order_relaxed);
    for (Bytes& data : batch->fit) AdoptRetained(batch->parent, std::move(data));
  } while (config_.drain_all);
}

bool Fuzzer::Step() {
  if (BudgetExhausted()) return false;
  MaybeWriteStats();
  const bool hdr = config_.mode == FuzzMode::kHdrFuzz;
  if (hdr) DrainRetained();

  // Copy: adding children may reallocate the node store.
  const TestInput parent = corpus_.SelectNextH();
  const double n_nodes = static_cast<double>(corpus_.size());
  const CorpusStats stats{breadth_sum_ / n_nodes, length_sum_ / n_nodes};
  const size_t potential = GetFuzzPotential(parent, breadth_[parent.id], stats,
                                            config_.mutation.potential);
  std::vector<Offspring> offspring =
      GenerateOffspring(parent, potential, rng_, &corpus_, config_.mutation);

  std::vector<bool> retained;
  retained.reserve(offspring.size());
  size_t processed = 0;
  for (Offspring& child : offspring) {
    if ((processed & 63) == 0 && processed > 0) {
      if (BudgetExhausted()) break;
      MaybeWriteStats();
    }
    if (config_.exec_budget &&
        execs_.load(std::memory_order_relaxed) >= *config_.exec_budget) {
      break;
    }
    ++processed;
    const RunResult& result = Execute(child.data);
    bool kept = false;
    if (result.outcome == RunOutcome::kCompleted &&
        IsFit(*result.coverage, global_)) {
      const size_t breadth = result.coverage->Breadth();
      auto added = corpus_.AddChild(parent.id, child.data,
                                    Origin::kCoverageRetained,
                                    execs_.load(std::memory_order_relaxed));
      if (added.ok() && added->has_value()) {
        NoteNode(**added, breadth);
        kept = true;
      }
    }
    retained.push_back(kept);
  }
  iterations_.fetch_add(1, std::memory_order_relaxed);

  if (hdr && processed > 0) {
    CandidateBatch batch{parent, {}};
    for (size_t i : SampleInputs(retained, config_.sample_pct, rng_)) {
      batch.samples.push_back(std::move(offspring[i].data));
    }
    if (!batch.samples.empty()) {
      if (qa_->TryPush(std::move(batch))) {
        qa_sent_.fetch_add(1, std::memory_order_relaxed);
      } else {
        qa_drops_.fetch_add(1, std::memory_order_relaxed);
      }
    }
  }
  return true;
}

void Fuzzer::Run() {
  while (Step()) {
  }
  MaybeWriteStats();
}

FuzzerStats Fuzzer::stats() const {
  return FuzzerStats{
      execs_.load(std::memory_order_relaxed),
      iterations_.load(std::memory_order_relaxed),
      qa_sent_.load(std::memory_order_relaxed),
      qa_drops_.load(std::memory_order_relaxed),
      qr_received_.load(std::memory_order_relaxed),
      crashes_.total(),
  };
}

void Fuzzer::WriteStatsHeader() {
  if (stats_out_ == nullptr) return;
  *stats_out_ << "timestamp,execs,corpus_seed,corpus_coverage,corpus_headroom,"
                 "qa_drops,crashes\n";
}

void Fuzzer::WriteStatsRow() {
  if (stats_out_ == nullptr) return;
  const FuzzerStats s = stats();
  *stats_out_ << absl::StrCat(
      Elapsed(), ",", s.execs, ",", corpus_.CountByOrigin(Origin::kSeed), ",",
      corpus_.CountByOrigin(Origin::kCoverageRetained), ",",
      corpus_.CountByOrigin(Origin::kHeadroomRetained), ",", s.qa_drops, ",",
      crashes_.candidates().size(), "\n");
  stats_out_->flush();
}

void Fuzzer::MaybeWriteStats() {
  if (stats_out_ == nullptr) return;
  const auto second = static_cast<int64_t>(Elapsed());
  if (second <= last_stats_second_) return;
  last_stats_second_ = second;
  WriteStatsRow();
}

}  // namespace hfuzz

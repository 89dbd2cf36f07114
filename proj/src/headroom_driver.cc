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

#include "hfuzz/headroom_driver.h"

#include <algorithm>
#include <chrono>
#include <thread>

#include "absl/strings/str_cat.h"

namespace hfuzz {
namespace {

constexpr auto kPollInterval = std::chrono::milliseconds(100);

}  // namespace

void MinHProfile::Absorb(const HeadroomProfile& profile) {
  for (const auto& [site, value] : profile.entries()) {
    auto [it, inserted] = entries_.try_emplace(site, value);
    if (!inserted) it->second = std::min(it->second, value);
  }
}

bool IsLess(const HeadroomProfile& profile, const MinHProfile& min) {
  return std::any_of(profile.entries().begin(), profile.entries().end(),
                     [&](const auto& e) { return e.second < min.Get(e.first); });
}

bool HeadroomSelector::Consider(const HeadroomProfile& profile) {
  if (!IsLess(profile, min_)) return false;
  min_.Absorb(profile);
  return true;
}

HeadroomDriver::HeadroomDriver(const Target& target, DriverConfig config,
                               CandidateQueue* qa, RetainQueue* qr,
                               Clock::time_point start)
    : target_(target),
      config_(std::move(config)),
      qa_(qa),
      qr_(qr),
      start_(start),
      executor_(target, config_.harness) {}

double HeadroomDriver::Elapsed() const {
  return std::chrono::duration<double>(Clock::now() - start_).count();
}

std::optional<RetainBatch> HeadroomDriver::ProcessBatch(
    const CandidateBatch& batch) {
  batches_.fetch_add(1, std::memory_order_relaxed);
  RetainBatch out{batch.parent, {}};
  for (const Bytes& sample : batch.samples) {
    if (stop_.load(std::memory_order_relaxed)) break;
    execs_.fetch_add(1, std::memory_order_relaxed);
    const RunResult& result =
        executor_.Run(sample, ExecutionMode::kHeadroomProfiled);
    if (result.outcome == RunOutcome::kOverrun) {
      crashes_.Record(result.crash->store_idx, sample, Elapsed(), "driver");
      // Writes before the fault still count toward the minimum.
      selector_.Consider(*result.headroom);
      out.fit.push_back(sample);
    } else if (result.outcome == RunOutcome::kCompleted &&
               selector_.Consider(*result.headroom)) {
      out.fit.push_back(sample);
    }
  }
  retained_.fetch_add(out.fit.size(), std::memory_order_relaxed);
  if (out.fit.empty()) return std::nullopt;
  return out;
}

void HeadroomDriver::Deliver(RetainBatch batch) {
  if (qr_->Push(std::move(batch))) {
    batches_sent_.fetch_add(1, std::memory_order_relaxed);
  }
}

void HeadroomDriver::Run() {
  while (!stop_.load(std::memory_order_relaxed)) {
    MaybeWriteHeadroom();
    if (config_.stall) {
      if (qa_->closed()) break;
      std::this_thread::sleep_for(kPollInterval);
      continue;
    }
    std::optional<CandidateBatch> batch = qa_->PopFor(kPollInterval);
    if (!batch) {
      if (qa_->closed()) break;
      continue;
    }
    if (auto kept = ProcessBatch(*batch)) Deliver(*std::move(kept));
  }
  WriteHeadroomRows();
}

size_t HeadroomDriver::DrainAvailable() {
  if (config_.stall) return 0;
  size_t n = 0;
  while (std::optional<CandidateBatch> batch = qa_->TryPop()) {
    ++n;
    if (auto kept = ProcessBatch(*batch)) {
      // Never block here: the caller is the only consumer of Q_R.
      if (qr_->TryPush(*std::move(kept))) {
        batches_sent_.fetch_add(1, std::memory_order_relaxed);
      }
    }
  }
  return n;
}

DriverStats HeadroomDriver::stats() const {
  return DriverStats{
      execs_.load(std::memory_order_relaxed),
      batches_.load(std::memory_order_relaxed),
      retained_.load(std::memory_order_relaxed),
      batches_sent_.load(std::memory_order_relaxed),
  };
}

void HeadroomDriver::WriteHeadroomHeader() {
  if (headroom_out_ != nullptr) *headroom_out_ << "timestamp,site,min\n";
}

void HeadroomDriver::WriteHeadroomRows() {
  if (headroom_out_ == nullptr) return;
  const double now = Elapsed();
  for (const auto& [site, value] : min_profile().entries()) {
    *headroom_out_ << absl::StrCat(now, ",", site.value, ",", value, "\n");
  }
  headroom_out_->flush();
}

void HeadroomDriver::MaybeWriteHeadroom() {
  if (headroom_out_ == nullptr) return;
  const auto second = static_cast<int64_t>(Elapsed());
  if (second <= last_headroom_second_) return;
  last_headroom_second_ = second;
  WriteHeadroomRows();
}

}  // namespace hfuzz

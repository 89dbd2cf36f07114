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

// Campaign lifecycle: spawn the fuzzer (and, in hdr mode, the driver), stop
// both at budget expiry, triage, and write the run directory:
//
//   report.json          CampaignReport
//   stats.csv            fuzzer progress, one row per second
//   headroom.csv         driver minimum headroom per site, once per second
//   vulns_over_time.csv  cumulative distinct sites per second
//   corpus/              final corpus tree
//   crashes/             one witness per site, <store_idx>_<hash>.bin

#ifndef HFUZZ_CAMPAIGN_H_
#define HFUZZ_CAMPAIGN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "hfuzz/corpus.h"
#include "hfuzz/fuzzer_core.h"
#include "hfuzz/mutation_engine.h"
#include "hfuzz/target_harness.h"

namespace hfuzz {

struct CampaignConfig {
  std::string target;
  std::optional<std::filesystem::path> seed_file;  // default: built-in seed
  std::filesystem::path out_dir;
  double budget_secs = 60;
  std::optional<uint64_t> exec_budget;
  double sample_pct = 5;
  size_t granule_bytes = 8;
  size_t redzone_granules = 2;
  size_t queue_cap = 256;
  uint64_t rng_seed = 1;
  FuzzMode mode = FuzzMode::kHdrFuzz;
  std::optional<std::filesystem::path> mutation_config;
  bool drain_all = false;
  // Single thread: the driver drains Q_A in-process after every fuzzer
  // iteration. With an exec budget the whole campaign is reproducible.
  bool deterministic = false;
  // Test hook: the driver never dequeues.
  bool stall_driver = false;
};

struct SiteFinding {
  LocationId site;
  double time_to_first_crash_secs = 0;
  std::string witness_file;  // relative to the run directory
  std::string source;        // fuzzer | driver | corpus

  friend bool operator==(const SiteFinding&, const SiteFinding&) = default;
};

struct QueueCounters {
  uint64_t qa_pushed = 0;
  uint64_t qa_popped = 0;
  uint64_t qr_pushed = 0;
  uint64_t qr_popped = 0;

  friend bool operator==(const QueueCounters&, const QueueCounters&) = default;
};

struct CampaignReport {
  std::string target;
  FuzzMode mode = FuzzMode::kHdrFuzz;
  uint64_t rng_seed = 0;
  double budget_secs = 0;
  double elapsed_secs = 0;
  std::vector<SiteFinding> findings;  // sorted by site
  uint64_t total_execs = 0;           // fuzzer
  uint64_t headroom_execs = 0;        // driver
  uint64_t qa_drop_count = 0;
  QueueCounters queues;
  std::map<std::string, uint64_t> corpus_sizes;  // by origin name
  std::string error;                             // set on worker failure

  std::vector<LocationId> sites() const;

  friend bool operator==(const CampaignReport&,
                         const CampaignReport&) = default;
};

std::string ReportToJson(const CampaignReport& report);
absl::StatusOr<CampaignReport> ReportFromJson(std::string_view text);

// A site together with the input that proves it.
struct TriagedSite {
  LocationId site;
  Bytes witness;
  double found_at_secs = 0;
  std::string source;
};

// Replays every candidate and every corpus node in kPlainDetect mode; the
// distinct faulting store sites are the findings. Corpus-only findings are
// stamped with `end_secs`.
std::vector<TriagedSite> Triage(const Target& target,
                                const HarnessConfig& harness,
                                const std::vector<CrashCandidate>& candidates,
                                const CorpusTree& corpus, double end_secs);

// Runs a full campaign and writes the run directory. Usage problems
// (unknown target, unreadable seed, bad config) are returned as errors; a
// worker failure yields a partial report with `error` set.
absl::StatusOr<CampaignReport> RunCampaign(const CampaignConfig& config);

// Rows (second, cumulative distinct sites) for s = 0 .. horizon.
std::vector<std::pair<int64_t, double>> TimelineRows(
    const CampaignReport& report);

// Reads <run_dir>/report.json and writes <run_dir>/vulns_over_time.csv.
absl::Status EmitTimeline(const std::filesystem::path& run_dir);

// Averages vulns_over_time.csv across runs (a run's last value carries
// forward past its horizon) and writes the result to `out_csv`. Lists every
// unusable run directory on error.
absl::Status AggregateTimelines(const std::vector<std::filesystem::path>& runs,
                                const std::filesystem::path& out_csv);

}  // namespace hfuzz

#endif  // HFUZZ_CAMPAIGN_H_

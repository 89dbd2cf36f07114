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

#include "hfuzz/campaign.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "hfuzz/benchmark_suite.h"
#include "hfuzz/headroom_driver.h"
#include "json.hpp"

namespace hfuzz {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr std::string_view kTimelineHeader = "seconds,cumulative_sites";

// Part of the wall-clock budget kept back for triage and output.
Clock::duration TriageReserve(double budget_secs) {
  const double reserve = std::min(0.5, 0.02 * budget_secs);
  return std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(reserve));
}

absl::StatusOr<std::string> ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path.string()));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

absl::Status WriteText(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

std::string WitnessName(LocationId site, ByteSpan data) {
  return absl::StrCat(site.value, "_", Sha256Hex(data).substr(0, 16), ".bin");
}

}  // namespace

std::vector<LocationId> CampaignReport::sites() const {
  std::vector<LocationId> out;
  for (const SiteFinding& f : findings) out.push_back(f.site);
  return out;
}

std::string ReportToJson(const CampaignReport& r) {
  json sites = json::array();
  json ttfc = json::object();
  json witnesses = json::object();
  json sources = json::object();
  for (const SiteFinding& f : r.findings) {
    sites.push_back(f.site.value);
    ttfc[ToString(f.site)] = f.time_to_first_crash_secs;
    witnesses[ToString(f.site)] = f.witness_file;
    sources[ToString(f.site)] = f.source;
  }
  json doc = {
      {"target", r.target},
      {"mode", FuzzModeName(r.mode)},
      {"rng_seed", r.rng_seed},
      {"budget_secs", r.budget_secs},
      {"elapsed_secs", r.elapsed_secs},
      {"distinct_vuln_sites_found", sites},
      {"time_to_first_crash", ttfc},
      {"witnesses", witnesses},
      {"finding_sources", sources},
      {"total_execs", r.total_execs},
      {"headroom_execs", r.headroom_execs},
      {"qa_drop_count", r.qa_drop_count},
      {"queue_counters",
       {{"qa_pushed", r.queues.qa_pushed},
        {"qa_popped", r.queues.qa_popped},
        {"qr_pushed", r.queues.qr_pushed},
        {"qr_popped", r.queues.qr_popped}}},
      {"corpus_sizes", r.corpus_sizes},
      {"error", r.error},
  };
  return doc.dump(2) + "\n";
}

absl::StatusOr<CampaignReport> ReportFromJson(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::DataLossError("report is not a JSON object");
  }
  try {
    CampaignReport r;
    r.target = doc.at("target").get<std::string>();
    const auto mode = doc.at("mode").get<std::string>();
    if (mode != "hdr" && mode != "baseline") {
      return absl::DataLossError(absl::StrCat("unknown mode ", mode));
    }
    r.mode = mode == "hdr" ? FuzzMode::kHdrFuzz : FuzzMode::kBaselineCoverageOnly;
    r.rng_seed = doc.at("rng_seed").get<uint64_t>();
    r.budget_secs = doc.at("budget_secs").get<double>();
    r.elapsed_secs = doc.at("elapsed_secs").get<double>();
    for (const json& s : doc.at("distinct_vuln_sites_found")) {
      SiteFinding f;
      f.site = LocationId{s.get<uint32_t>()};
      const std::string key = ToString(f.site);
      f.time_to_first_crash_secs = doc.at("time_to_first_crash").at(key).get<double>();
      f.witness_file = doc.at("witnesses").at(key).get<std::string>();
      f.source = doc.at("finding_sources").at(key).get<std::string>();
      r.findings.push_back(std::move(f));
    }
    r.total_execs = doc.at("total_execs").get<uint64_t>();
    r.headroom_execs = doc.at("headroom_execs").get<uint64_t>();
    r.qa_drop_count = doc.at("qa_drop_count").get<uint64_t>();
    const json& q = doc.at("queue_counters");
    r.queues = QueueCounters{q.at("qa_pushed").get<uint64_t>(),
                             q.at("qa_popped").get<uint64_t>(),
                             q.at("qr_pushed").get<uint64_t>(),
                             q.at("qr_popped").get<uint64_t>()};
    r.corpus_sizes =
        doc.at("corpus_sizes").get<std::map<std::string, uint64_t>>();
    r.error = doc.at("error").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    return absl::DataLossError(absl::StrCat("malformed report: ", e.what()));
  }
}

std::vector<TriagedSite> Triage(const Target& target,
                                const HarnessConfig& harness,
                                const std::vector<CrashCandidate>& candidates,
                                const CorpusTree& corpus, double end_secs) {
  Executor executor(target, harness);
  std::map<LocationId, TriagedSite> found;
  auto replay = [&](ByteSpan input, double when, std::string_view source) {
    const RunResult& r = executor.Run(input, ExecutionMode::kPlainDetect);
    if (r.outcome != RunOutcome::kOverrun) return;
    const LocationId site = r.crash->store_idx;
    auto it = found.find(site);
    if (it != found.end() && it->second.found_at_secs <= when) return;
    found[site] = TriagedSite{site, Bytes(input.begin(), input.end()), when,
                              std::string(source)};
  };
  for (const CrashCandidate& c : candidates) {
    replay(c.input, c.found_at_secs, c.source);
  }
  for (const TestInput& node : corpus.nodes()) replay(node.data, end_secs, "corpus");

  std::vector<TriagedSite> out;
  for (auto& [site, t] : found) out.push_back(std::move(t));
  return out;
}

absl::StatusOr<CampaignReport> RunCampaign(const CampaignConfig& config) {
  const Target* target = FindTarget(config.target);
  if (target == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown target '", config.target, "'"));
  }
  Bytes seed = target->seed;
  if (config.seed_file) {
    auto text = ReadText(*config.seed_file);
    if (!text.ok()) return text.status();
    seed.assign(text->begin(), text->end());
  }
  if (config.budget_secs < 0) {
    return absl::InvalidArgumentError("budget must be non-negative");
  }
  if (config.sample_pct < 0 || config.sample_pct > 100) {
    return absl::InvalidArgumentError("sample percentage must be in [0,100]");
  }
  if (config.queue_cap == 0) {
    return absl::InvalidArgumentError("queue capacity must be positive");
  }

  HarnessConfig harness;
  harness.shadow.granule_bytes = config.granule_bytes;
  harness.shadow.redzone_granules = config.redzone_granules;
  if (auto s = ValidateShadowConfig(harness.shadow); !s.ok()) return s;
  if (seed.size() > harness.max_input_len) {
    return absl::InvalidArgumentError("seed exceeds the maximum input length");
  }

  FuzzerConfig fuzzer_config;
  fuzzer_config.mode = config.mode;
  fuzzer_config.sample_pct = config.sample_pct;
  fuzzer_config.rng_seed = config.rng_seed;
  fuzzer_config.exec_budget = config.exec_budget;
  fuzzer_config.drain_all = config.drain_all;
  fuzzer_config.harness = harness;
  if (config.mutation_config) {
    auto text = ReadText(*config.mutation_config);
    if (!text.ok()) return text.status();
    auto weights = ParseMutationWeights(*text);
    if (!weights.ok()) return weights.status();
    fuzzer_config.mutation.weights = *weights;
  }
  const auto budget = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(config.budget_secs));
  if (!config.deterministic || !config.exec_budget) {
    fuzzer_config.time_budget = budget - TriageReserve(config.budget_secs);
  }

  std::error_code ec;
  fs::create_directories(config.out_dir / "crashes", ec);
  if (ec) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot create ", config.out_dir.string(), ": ", ec.message()));
  }
  std::ofstream stats_csv(config.out_dir / "stats.csv", std::ios::trunc);
  std::ofstream headroom_csv(config.out_dir / "headroom.csv", std::ios::trunc);

  const bool hdr = config.mode == FuzzMode::kHdrFuzz;
  const Clock::time_point start = Clock::now();
  CandidateQueue qa(config.queue_cap);
  RetainQueue qr(config.queue_cap);
  Fuzzer fuzzer(*target, seed, fuzzer_config, hdr ? &qa : nullptr,
                hdr ? &qr : nullptr, start);
  fuzzer.set_stats_output(&stats_csv);
  fuzzer.WriteStatsHeader();
  if (auto s = fuzzer.Init(); !s.ok()) return s;

  std::optional<HeadroomDriver> driver;
  if (hdr) {
    DriverConfig driver_config{harness, config.stall_driver};
    driver.emplace(*target, driver_config, &qa, &qr, start);
    driver->set_headroom_output(&headroom_csv);
  }
  if (driver) driver->WriteHeadroomHeader();

  CampaignReport report;
  if (config.deterministic) {
    try {
      while (fuzzer.Step()) {
        if (driver) driver->DrainAvailable();
      }
    } catch (const std::exception& e) {
      report.error = absl::StrCat("worker failed: ", e.what());
    }
  } else {
    std::string fuzzer_error;
    std::string driver_error;
    {
      std::jthread driver_thread;
      if (driver) {
        driver_thread = std::jthread([&] {
          try {
            driver->Run();
          } catch (const std::exception& e) {
            driver_error = e.what();
            fuzzer.RequestStop();
          }
        });
      }
      std::jthread fuzzer_thread([&] {
        try {
          fuzzer.Run();
        } catch (const std::exception& e) {
          fuzzer_error = e.what();
        }
      });
      fuzzer_thread.join();
      if (driver) driver->RequestStop();
      qa.Close();
      qr.Close();
    }
    if (!fuzzer_error.empty()) {
      report.error = absl::StrCat("fuzzer worker failed: ", fuzzer_error);
    } else if (!driver_error.empty()) {
      report.error = absl::StrCat("driver worker failed: ", driver_error);
    }
  }
  fuzzer.WriteStatsRow();
  if (driver) driver->WriteHeadroomRows();
  const double fuzz_end =
      std::chrono::duration<double>(Clock::now() - start).count();

  std::vector<CrashCandidate> candidates = fuzzer.crashes().candidates();
  if (driver) {
    const auto& dc = driver->crashes().candidates();
    candidates.insert(candidates.end(), dc.begin(), dc.end());
  }
  std::vector<TriagedSite> triaged =
      Triage(*target, harness, candidates, fuzzer.corpus(), fuzz_end);

  report.target = target->name;
  report.mode = config.mode;
  report.rng_seed = config.rng_seed;
  report.budget_secs = config.budget_secs;
  for (const TriagedSite& t : triaged) {
    const std::string name = WitnessName(t.site, t.witness);
    const std::string text(t.witness.begin(), t.witness.end());
    if (auto s = WriteText(config.out_dir / "crashes" / name, text); !s.ok()) {
      return s;
    }
    report.findings.push_back(SiteFinding{
        t.site, t.found_at_secs, absl::StrCat("crashes/", name), t.source});
  }
  const FuzzerStats fs = fuzzer.stats();
  report.total_execs = fs.execs;
  report.qa_drop_count = fs.qa_drops;
  if (driver) report.headroom_execs = driver->stats().execs;
  const auto qa_counters = qa.counters();
  const auto qr_counters = qr.counters();
  report.queues = QueueCounters{qa_counters.pushed, qa_counters.popped,
                                qr_counters.pushed, qr_counters.popped};
  for (Origin o : {Origin::kSeed, Origin::kCoverageRetained,
                   Origin::kHeadroomRetained}) {
    report.corpus_sizes[std::string(OriginName(o))] =
        fuzzer.corpus().CountByOrigin(o);
  }

  if (auto s = fuzzer.corpus().Persist(config.out_dir / "corpus"); !s.ok()) {
    return s;
  }
  report.elapsed_secs =
      std::chrono::duration<double>(Clock::now() - start).count();
  if (auto s = WriteText(config.out_dir / "report.json", ReportToJson(report));
      !s.ok()) {
    return s;
  }
  if (auto s = EmitTimeline(config.out_dir); !s.ok()) return s;
  return report;
}

std::vector<std::pair<int64_t, double>> TimelineRows(
    const CampaignReport& report) {
  auto horizon = static_cast<int64_t>(std::ceil(report.budget_secs));
  for (const SiteFinding& f : report.findings) {
    horizon = std::max(horizon, static_cast<int64_t>(
                                    std::ceil(f.time_to_first_crash_secs)));
  }
  std::vector<std::pair<int64_t, double>> rows;
  for (int64_t s = 0; s <= horizon; ++s) {
    const auto n = std::count_if(
        report.findings.begin(), report.findings.end(),
        [s](const SiteFinding& f) {
          return f.time_to_first_crash_secs <= static_cast<double>(s);
        });
    rows.emplace_back(s, static_cast<double>(n));
  }
  return rows;
}

absl::Status EmitTimeline(const fs::path& run_dir) {
  auto text = ReadText(run_dir / "report.json");
  if (!text.ok()) return text.status();
  auto report = ReportFromJson(*text);
  if (!report.ok()) return report.status();
  std::string csv = std::string(kTimelineHeader) + "\n";
  for (const auto& [s, n] : TimelineRows(*report)) {
    absl::StrAppend(&csv, s, ",", n, "\n");
  }
  return WriteText(run_dir / "vulns_over_time.csv", csv);
}

absl::Status AggregateTimelines(const std::vector<fs::path>& runs,
                                const fs::path& out_csv) {
  if (runs.empty()) return absl::InvalidArgumentError("no run directories given");
  std::vector<std::vector<double>> series;
  std::vector<std::string> bad;
  for (const fs::path& run : runs) {
    auto text = ReadText(run / "vulns_over_time.csv");
    if (!text.ok()) {
      bad.push_back(run.string());
      continue;
    }
    std::vector<double> values;
    bool ok = true;
    for (absl::string_view piece : absl::StrSplit(*text, '\n', absl::SkipEmpty())) {
      const std::string line(piece);
      if (line == kTimelineHeader) continue;
      std::vector<std::string> cols = absl::StrSplit(line, ',');
      int64_t second = 0;
      double value = 0;
      if (cols.size() != 2 || !absl::SimpleAtoi(cols[0], &second) ||
          !absl::SimpleAtod(cols[1], &value) ||
          second != static_cast<int64_t>(values.size())) {
        ok = false;
        break;
      }
      values.push_back(value);
    }
    if (!ok || values.empty()) {
      bad.push_back(run.string());
      continue;
    }
    series.push_back(std::move(values));
  }
  if (!bad.empty()) {
    return absl::NotFoundError(absl::StrCat(
        "missing or unreadable vulns_over_time.csv in: ", absl::StrJoin(bad, ", ")));
  }
  size_t horizon = 0;
  for (const auto& s : series) horizon = std::max(horizon, s.size());
  std::string csv = "seconds,mean_sites\n";
  for (size_t t = 0; t < horizon; ++t) {
    double sum = 0;
    for (const auto& s : series) sum += t < s.size() ? s[t] : s.back();
    absl::StrAppend(&csv, t, ",", sum / static_cast<double>(series.size()), "\n");
  }
  return WriteText(out_csv, csv);
}

}  // namespace hfuzz

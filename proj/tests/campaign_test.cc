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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "hfuzz/benchmark_suite.h"

namespace hfuzz {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() /
               ("hfuzz_campaign_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary | std::ios::trunc) << s;
}

CampaignReport SampleReport() {
  CampaignReport r;
  r.target = "magic_header";
  r.mode = FuzzMode::kBaselineCoverageOnly;
  r.rng_seed = 9;
  r.budget_secs = 12.5;
  r.elapsed_secs = 12.75;
  r.findings = {{Loc("a"), 0.25, "crashes/a.bin", "fuzzer"},
                {Loc("b"), 3.0, "crashes/b.bin", "corpus"}};
  r.total_execs = 1234;
  r.headroom_execs = 56;
  r.qa_drop_count = 7;
  r.queues = {1, 2, 3, 4};
  r.corpus_sizes = {{"seed", 1}, {"coverage", 5}, {"headroom", 2}};
  r.error = "";
  return r;
}

TEST(ReportJsonTest, RoundTrip) {
  const CampaignReport r = SampleReport();
  auto back = ReportFromJson(ReportToJson(r));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, r);
  EXPECT_EQ(ReportToJson(*back), ReportToJson(r));
}

TEST(ReportJsonTest, Malformed) {
  EXPECT_FALSE(ReportFromJson("[]").ok());
  EXPECT_FALSE(ReportFromJson(R"({"target": "x"})").ok());
}

TEST(TimelineTest, SingleFindingAtThreeSeconds) {
  CampaignReport r;
  r.budget_secs = 3;
  r.findings = {{Loc("a"), 3.0, "", "fuzzer"}};
  const std::vector<std::pair<int64_t, double>> want = {
      {0, 0}, {1, 0}, {2, 0}, {3, 1}};
  EXPECT_EQ(TimelineRows(r), want);
}

TEST(TimelineTest, AggregateAveragesRuns) {
  const fs::path root = TempDir("agg");
  std::vector<fs::path> runs;
  for (int n = 1; n <= 3; ++n) {
    const fs::path dir = root / ("run" + std::to_string(n));
    WriteFile(dir / "vulns_over_time.csv",
              "seconds,cumulative_sites\n0,0\n1," + std::to_string(n) + "\n");
    runs.push_back(dir);
  }
  ASSERT_TRUE(AggregateTimelines(runs, root / "mean.csv").ok());
  EXPECT_EQ(Slurp(root / "mean.csv"), "seconds,mean_sites\n0,0\n1,2\n");
  fs::remove_all(root);
}

TEST(TimelineTest, AggregateListsMissingRuns) {
  const fs::path root = TempDir("agg_missing");
  WriteFile(root / "ok" / "vulns_over_time.csv", "seconds,cumulative_sites\n0,1\n");
  absl::Status s = AggregateTimelines(
      {root / "ok", root / "gone1", root / "gone2"}, root / "mean.csv");
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.message().find("gone1"), absl::string_view::npos);
  EXPECT_NE(s.message().find("gone2"), absl::string_view::npos);
  fs::remove_all(root);
}

TEST(RunCampaignTest, UsageErrors) {
  CampaignConfig c;
  c.out_dir = TempDir("usage");
  c.target = "missing";
  EXPECT_EQ(RunCampaign(c).status().code(), absl::StatusCode::kInvalidArgument);
  c.target = "lenfield_copy";
  c.seed_file = c.out_dir / "no_such.seed";
  EXPECT_FALSE(RunCampaign(c).ok());
  fs::remove_all(c.out_dir);
}

TEST(RunCampaignTest, ZeroBudgetGivesEmptyValidReport) {
  CampaignConfig c;
  c.target = "lenfield_copy";
  c.out_dir = TempDir("zero");
  c.budget_secs = 0;
  auto r = RunCampaign(c);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_TRUE(r->findings.empty());
  EXPECT_TRUE(r->error.empty());
  auto parsed = ReportFromJson(Slurp(c.out_dir / "report.json"));
  ASSERT_TRUE(parsed.ok());
  EXPECT_TRUE(parsed->findings.empty());
  fs::remove_all(c.out_dir);
}

TEST(RunCampaignTest, WritesRunDirectoryAndSoundTriage) {
  const Target* t = FindTarget("packet_parser");
  CampaignConfig c;
  c.target = t->name;
  c.out_dir = TempDir("full");
  c.deterministic = true;
  c.exec_budget = 100000;
  c.budget_secs = 600;
  auto r = RunCampaign(c);
  ASSERT_TRUE(r.ok()) << r.status();
  for (const char* f : {"report.json", "stats.csv", "headroom.csv",
                        "vulns_over_time.csv", "corpus/manifest.json"}) {
    EXPECT_TRUE(fs::exists(c.out_dir / f)) << f;
  }
  ASSERT_FALSE(r->findings.empty());
  const std::regex name(R"(crashes/(\d+)_[0-9a-f]{16}\.bin)");
  for (const SiteFinding& f : r->findings) {
    std::smatch m;
    ASSERT_TRUE(std::regex_match(f.witness_file, m, name)) << f.witness_file;
    EXPECT_EQ(m[1].str(), ToString(f.site));
    const std::string bytes = Slurp(c.out_dir / f.witness_file);
    RunResult rr = RunTarget(*t, Bytes(bytes.begin(), bytes.end()),
                             ExecutionMode::kPlainDetect);
    ASSERT_EQ(rr.outcome, RunOutcome::kOverrun);
    EXPECT_EQ(rr.crash->store_idx, f.site);
  }
  auto corpus = CorpusTree::Load(c.out_dir / "corpus");
  ASSERT_TRUE(corpus.ok());
  const std::vector<LocationId> sites = r->sites();
  for (const TestInput& n : corpus->nodes()) {
    RunResult rr = RunTarget(*t, n.data, ExecutionMode::kPlainDetect);
    if (rr.outcome == RunOutcome::kOverrun) {
      EXPECT_NE(std::find(sites.begin(), sites.end(), rr.crash->store_idx),
                sites.end());
    }
  }
  EXPECT_EQ(r->corpus_sizes.at("seed"), 1u);
  fs::remove_all(c.out_dir);
}

TEST(RunCampaignTest, BaselineLeavesQueuesUntouched) {
  CampaignConfig c;
  c.target = "magic_header";
  c.out_dir = TempDir("baseline");
  c.mode = FuzzMode::kBaselineCoverageOnly;
  c.budget_secs = 1;
  auto r = RunCampaign(c);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->queues, QueueCounters{});
  EXPECT_EQ(r->headroom_execs, 0u);
  EXPECT_EQ(r->corpus_sizes.at("headroom"), 0u);
  fs::remove_all(c.out_dir);
}

TEST(RunCampaignTest, ThreeSeedAggregateIsMonotone) {
  const fs::path root = TempDir("mono");
  std::vector<fs::path> runs;
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    CampaignConfig c;
    c.target = "token_histogram";
    c.out_dir = root / ("seed" + std::to_string(seed));
    c.rng_seed = seed;
    c.budget_secs = 2;
    ASSERT_TRUE(RunCampaign(c).ok());
    runs.push_back(c.out_dir);
  }
  ASSERT_TRUE(AggregateTimelines(runs, root / "mean.csv").ok());
  std::ifstream in(root / "mean.csv");
  std::string line;
  std::getline(in, line);
  double prev = -1;
  int rows = 0;
  while (std::getline(in, line)) {
    const double v = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(v, prev);
    prev = v;
    ++rows;
  }
  EXPECT_GE(rows, 3);
  fs::remove_all(root);
}

}  // namespace
}  // namespace hfuzz

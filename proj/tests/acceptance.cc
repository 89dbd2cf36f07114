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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   acceptance                  all criteria
//   acceptance --criterion 5    a single criterion

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfuzz/benchmark_suite.h"
#include "hfuzz/campaign.h"
#include "hfuzz/corpus.h"
#include "hfuzz/fuzzer_core.h"
#include "hfuzz/headroom_driver.h"
#include "hfuzz/shadow_runtime.h"
#include "oracles.h"

namespace hfuzz {
namespace {

namespace fs = std::filesystem;
using Seconds = std::chrono::duration<double>;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double SecondsSince(std::chrono::steady_clock::time_point t0) {
  return Seconds(std::chrono::steady_clock::now() - t0).count();
}

fs::path ScratchDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() /
               ("hfuzz_accept_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// 1. Headroom walk vs. brute-force scan, all k <= 64 and i < k.
Verdict HeadroomOracle() {
  const auto t0 = std::chrono::steady_clock::now();
  int checked = 0;
  int mismatches = 0;
  for (int k = 1; k <= 64; ++k) {
    ShadowRuntime rt;
    auto h = rt.AllocBuffer(static_cast<size_t>(k) * rt.config().granule_bytes,
                            Loc("accept.buf"));
    if (!h.ok()) return {false, std::string(h.status().message())};
    for (int i = 0; i < k; ++i) {
      HeadroomProfile p;
      const int got =
          CalculateHeadroom(h->base_granule + i, Loc("accept.w"), rt.shadow(), p);
      mismatches += got != testing::BruteForceHeadroom(k, i);
      ++checked;
    }
  }
  const double secs = SecondsSince(t0);
  std::ostringstream d;
  d << checked << " positions, " << mismatches << " mismatches, " << secs << " s";
  return {mismatches == 0 && secs < 1.0, d.str()};
}

// 2. Randomized writes vs. an offset-vs-size bounds check.
Verdict OverrunExactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2026);
  int fp = 0, fn = 0, oob_total = 0;
  constexpr int kTrials = 10000;
  ShadowConfig cfg;
  for (int trial = 0; trial < kTrials; ++trial) {
    if (trial % 500 == 0) {
      cfg.granule_bytes = (trial / 500) % 2 ? 8 : 1;
      cfg.redzone_granules = 1 + (trial / 1000) % 3;
    }
    ShadowRuntime rt(cfg);
    // A few neighbours so far-away writes can land in someone else's buffer.
    std::vector<BufferHandle> live;
    const int n = 1 + static_cast<int>(gen() % 4);
    for (int b = 0; b < n; ++b) {
      live.push_back(*rt.AllocBuffer(1 + gen() % 80, Loc("accept.buf")));
    }
    const BufferHandle& h = live[gen() % live.size()];
    const auto size = static_cast<int64_t>(h.size_bytes);
    const int64_t off = static_cast<int64_t>(gen() % (3 * size + 64)) - size - 32;
    const auto len = static_cast<int64_t>(1 + gen() % 24);
    const bool oob = !testing::WriteInBounds(
        off, len, size, static_cast<int64_t>(cfg.granule_bytes));
    const bool reported = rt.CheckedWrite(h, off, static_cast<size_t>(len),
                                          Loc("accept.w"),
                                          ExecutionMode::kPlainDetect)
                              .overrun();
    oob_total += oob;
    fp += reported && !oob;
    fn += !reported && oob;
  }
  const double secs = SecondsSince(t0);
  std::ostringstream d;
  d << kTrials << " trials (" << oob_total << " out of bounds), " << fp
    << " false positives, " << fn << " false negatives, " << secs << " s";
  return {fp == 0 && fn == 0 && secs < 5.0, d.str()};
}

// Target whose headroom profile is chosen by the input: byte j (j < 4) is
// the desired scaled headroom at site j, 0 meaning "not visited".
constexpr int kProbeSites = 4;
constexpr int kProbeGranules = 128;

LocationId ProbeSite(int j) {
  static const LocationId kSites[kProbeSites] = {
      Loc("probe.s0"), Loc("probe.s1"), Loc("probe.s2"), Loc("probe.s3")};
  return kSites[j];
}

Target ProfileProbe() {
  return Target{
      .name = "profile_probe",
      .entry = [](ByteSpan in, ExecContext& ctx) {
        for (int j = 0; j < kProbeSites && j < static_cast<int>(in.size()); ++j) {
          const BufferHandle h = ctx.Alloc(kProbeGranules * 8, Loc("probe.buf"));
          if (in[j] == 0) continue;
          // With k = 128 the scaled headroom at granule i is 128 - i.
          ctx.Write(h, (kProbeGranules - in[j]) * 8, 1, ProbeSite(j));
        }
      }};
}

// 3. Driver loop vs. sequential strict-less simulation.
Verdict DriverSemantics() {
  const auto t0 = std::chrono::steady_clock::now();
  const Target probe = ProfileProbe();
  std::mt19937 gen(77);
  int mismatches = 0;
  int steps = 0;
  constexpr int kSequences = 1000;
  for (int seq = 0; seq < kSequences; ++seq) {
    CandidateQueue qa(1);
    RetainQueue qr(1);
    HeadroomDriver driver(probe, {}, &qa, &qr, Clock::now());
    const int len = 1 + static_cast<int>(gen() % 40);
    std::vector<Bytes> inputs;
    std::vector<testing::SiteProfile> profiles;
    for (int i = 0; i < len; ++i) {
      Bytes in(kProbeSites, 0);
      testing::SiteProfile p;
      for (int j = 0; j < kProbeSites; ++j) {
        if (gen() % 3 == 0) continue;
        // Small value range so ties are common.
        in[j] = static_cast<uint8_t>(1 + gen() % 128 / (1 + gen() % 16));
        p[ProbeSite(j).value] = in[j];
      }
      inputs.push_back(in);
      profiles.push_back(p);
    }
    const testing::RetentionTrace want = testing::SimulateRetention(profiles);
    // Feed the same sequence as batches of random size.
    size_t pos = 0;
    while (pos < inputs.size()) {
      const size_t n = std::min<size_t>(1 + gen() % 6, inputs.size() - pos);
      CandidateBatch batch{TestInput{}, {}};
      std::vector<Bytes> expect_fit;
      for (size_t i = pos; i < pos + n; ++i) {
        batch.samples.push_back(inputs[i]);
        if (want.retained[i]) expect_fit.push_back(inputs[i]);
      }
      const std::optional<RetainBatch> got = driver.ProcessBatch(batch);
      const std::vector<Bytes> got_fit = got ? got->fit : std::vector<Bytes>{};
      mismatches += got_fit != expect_fit;
      const testing::SiteProfile& min = want.running_min[pos + n - 1];
      for (int j = 0; j < kProbeSites; ++j) {
        mismatches += driver.min_profile().Get(ProbeSite(j)) !=
                      testing::ValueAt(min, ProbeSite(j).value);
      }
      pos += n;
      ++steps;
    }
  }
  const double secs = SecondsSince(t0);
  std::ostringstream d;
  d << kSequences << " sequences, " << steps << " batches, " << mismatches
    << " mismatches, " << secs << " s";
  return {mismatches == 0 && secs < 10.0, d.str()};
}

// 4. Alternating selection over synthetic trees; 5% sampling of 1000.
Verdict AlternationAndSampling() {
  std::mt19937 gen(404);
  int violations = 0;
  for (int tree = 0; tree < 1000; ++tree) {
    CorpusTree t(Bytes{'s'});
    const int nc = 1 + static_cast<int>(gen() % 6);
    const int nh = 1 + static_cast<int>(gen() % 6);
    std::vector<Origin> order;
    order.insert(order.end(), nc, Origin::kCoverageRetained);
    order.insert(order.end(), nh, Origin::kHeadroomRetained);
    std::shuffle(order.begin(), order.end(), gen);
    std::map<Origin, std::vector<InputId>> by_class;
    for (size_t i = 0; i < order.size(); ++i) {
      Bytes data{static_cast<uint8_t>(i), static_cast<uint8_t>(tree)};
      auto id = t.AddChild(static_cast<InputId>(gen() % t.size()), data, order[i]);
      by_class[order[i]].push_back(**id);
    }
    // Independent model: classes alternate starting with coverage, each
    // class walks its members in creation order.
    std::map<Origin, size_t> cursor;
    Origin want_class = Origin::kCoverageRetained;
    for (int k = 0; k < 4 * (nc + nh); ++k) {
      const auto& members = by_class[want_class];
      const InputId want = members[cursor[want_class]++ % members.size()];
      violations += t.SelectNextH().id != want;
      want_class = want_class == Origin::kCoverageRetained
                       ? Origin::kHeadroomRetained
                       : Origin::kCoverageRetained;
    }
  }
  Rng rng(5);
  const std::vector<bool> flags(1000, false);
  double total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    total += static_cast<double>(SampleInputs(flags, 5, rng).size());
  }
  const double mean = total / 100;
  std::ostringstream d;
  d << "1000 trees, " << violations << " alternation violations; mean extra "
    << "samples " << mean;
  return {violations == 0 && mean >= 40 && mean <= 60, d.str()};
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// 5. Suite-wide relative gain, 60 s per target, 3 seeds, both modes.
Verdict RelativeGain(double budget_secs) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = ScratchDir("gain");
  const auto& suite = BuiltinSuite();
  constexpr int kSeeds = 3;
  std::map<FuzzMode, std::vector<double>> per_seed;
  std::map<FuzzMode, std::set<LocationId>> found;
  std::ostringstream d;
  for (FuzzMode mode : {FuzzMode::kHdrFuzz, FuzzMode::kBaselineCoverageOnly}) {
    for (int seed = 1; seed <= kSeeds; ++seed) {
      double sum = 0;
      for (const Target& t : suite) {
        CampaignConfig c;
        c.target = t.name;
        c.mode = mode;
        c.rng_seed = static_cast<uint64_t>(seed);
        c.budget_secs = budget_secs;
        c.out_dir = root / (std::string(FuzzModeName(mode)) + "_" + t.name + "_" +
                            std::to_string(seed));
        auto r = RunCampaign(c);
        if (!r.ok()) return {false, std::string(r.status().message())};
        if (!r->error.empty()) return {false, r->error};
        sum += static_cast<double>(r->findings.size());
        for (LocationId s : r->sites()) found[mode].insert(s);
        std::cerr << "  " << FuzzModeName(mode) << " seed " << seed << " "
                  << t.name << ": " << r->findings.size() << " sites\n";
      }
      per_seed[mode].push_back(sum);
    }
  }
  fs::remove_all(root);
  const double hdr = Median(per_seed[FuzzMode::kHdrFuzz]);
  const double base = Median(per_seed[FuzzMode::kBaselineCoverageOnly]);
  const bool superset = std::includes(
      found[FuzzMode::kHdrFuzz].begin(), found[FuzzMode::kHdrFuzz].end(),
      found[FuzzMode::kBaselineCoverageOnly].begin(),
      found[FuzzMode::kBaselineCoverageOnly].end());
  const double secs = SecondsSince(t0);
  const double limit = 2.0 * static_cast<double>(suite.size()) * kSeeds * budget_secs;
  d << "median sites hdr " << hdr << " vs baseline " << base << " (need >= "
    << 1.3 * base << "); hdr covers baseline sites: " << (superset ? "yes" : "no")
    << "; " << secs << " s of " << limit << " s allowed";
  return {hdr >= 1.3 * base && superset && secs <= limit, d.str()};
}

// 6. Witness replay and full-corpus replay after real campaigns.
Verdict TriageSoundness() {
  const fs::path root = ScratchDir("triage");
  int reported = 0, bad_witness = 0, unreported = 0;
  for (const Target& t : BuiltinSuite()) {
    CampaignConfig c;
    c.target = t.name;
    c.out_dir = root / t.name;
    c.budget_secs = 3;
    auto r = RunCampaign(c);
    if (!r.ok()) return {false, std::string(r.status().message())};
    const std::vector<LocationId> sites = r->sites();
    Executor ex(t);
    for (const SiteFinding& f : r->findings) {
      ++reported;
      const std::string w = Slurp(c.out_dir / f.witness_file);
      const RunResult& rr =
          ex.Run(Bytes(w.begin(), w.end()), ExecutionMode::kPlainDetect);
      bad_witness += rr.outcome != RunOutcome::kOverrun ||
                     rr.crash->store_idx != f.site;
    }
    auto corpus = CorpusTree::Load(c.out_dir / "corpus");
    if (!corpus.ok()) return {false, std::string(corpus.status().message())};
    for (const TestInput& n : corpus->nodes()) {
      const RunResult& rr = ex.Run(n.data, ExecutionMode::kPlainDetect);
      if (rr.outcome == RunOutcome::kOverrun &&
          std::find(sites.begin(), sites.end(), rr.crash->store_idx) ==
              sites.end()) {
        ++unreported;
      }
    }
  }
  fs::remove_all(root);
  std::ostringstream d;
  d << reported << " reported sites, " << bad_witness
    << " witnesses failed to reproduce, " << unreported
    << " corpus overruns missing from reports";
  return {reported > 0 && bad_witness == 0 && unreported == 0, d.str()};
}

// 7. Deterministic mode gives byte-identical manifests.
Verdict Determinism() {
  const fs::path root = ScratchDir("determinism");
  const fs::path seed_file = root / "seed.bin";
  fs::create_directories(root);
  const Target* t = FindTarget("magic_header");
  std::ofstream(seed_file, std::ios::binary)
      .write(reinterpret_cast<const char*>(t->seed.data()),
             static_cast<std::streamsize>(t->seed.size()));
  std::string manifests[2];
  size_t nodes = 0;
  for (int run = 0; run < 2; ++run) {
    CampaignConfig c;
    c.target = t->name;
    c.seed_file = seed_file;
    c.out_dir = root / ("run" + std::to_string(run));
    c.rng_seed = 1234;
    c.deterministic = true;
    c.exec_budget = 200000;
    auto r = RunCampaign(c);
    if (!r.ok()) return {false, std::string(r.status().message())};
    manifests[run] = Slurp(c.out_dir / "corpus" / "manifest.json");
    nodes = r->corpus_sizes["coverage"] + r->corpus_sizes["headroom"] + 1;
  }
  fs::remove_all(root);
  std::ostringstream d;
  d << nodes << " corpus nodes; manifests "
    << (manifests[0] == manifests[1] ? "identical" : "differ");
  return {!manifests[0].empty() && manifests[0] == manifests[1] && nodes > 1,
          d.str()};
}

// 8. Stalled driver: the fuzzer keeps its pace and drops batches.
Verdict NonBlocking() {
  const fs::path root = ScratchDir("nonblocking");
  double rate[2] = {0, 0};
  uint64_t drops = 0;
  for (int i = 0; i < 2; ++i) {
    CampaignConfig c;
    c.target = "magic_header";
    c.out_dir = root / (i == 0 ? "baseline" : "stalled");
    c.mode = i == 0 ? FuzzMode::kBaselineCoverageOnly : FuzzMode::kHdrFuzz;
    c.stall_driver = i == 1;
    c.budget_secs = 10;
    auto r = RunCampaign(c);
    if (!r.ok()) return {false, std::string(r.status().message())};
    rate[i] = static_cast<double>(r->total_execs) / r->elapsed_secs;
    if (i == 1) drops = r->qa_drop_count;
  }
  fs::remove_all(root);
  const double drop = 1.0 - rate[1] / rate[0];
  std::ostringstream d;
  d << "exec rate baseline " << static_cast<uint64_t>(rate[0])
    << "/s, stalled-driver " << static_cast<uint64_t>(rate[1]) << "/s (drop "
    << 100 * drop << "%); qa drops " << drops;
  return {drop < 0.10 && drops > 0, d.str()};
}

}  // namespace
}  // namespace hfuzz

int main(int argc, char** argv) {
  CLI::App app{"hfuzz acceptance checks"};
  int only = 0;
  double gain_budget = 60;
  app.add_option("--criterion", only, "Run a single criterion (1-8)")
      ->check(CLI::Range(1, 8));
  app.add_option("--gain-budget-secs", gain_budget,
                 "Per-campaign budget for criterion 5")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  using hfuzz::Verdict;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"headroom oracle equivalence", hfuzz::HeadroomOracle},
      {"overrun exactness", hfuzz::OverrunExactness},
      {"driver retention semantics", hfuzz::DriverSemantics},
      {"alternation and sampling", hfuzz::AlternationAndSampling},
      {"relative end-to-end gain", [&] { return hfuzz::RelativeGain(gain_budget); }},
      {"triage soundness", hfuzz::TriageSoundness},
      {"determinism", hfuzz::Determinism},
      {"non-blocking fuzzer", hfuzz::NonBlocking},
  };
  bool all_pass = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    const Verdict v = criteria[i].second();
    all_pass &= v.pass;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first
              << "): " << (v.pass ? "PASS" : "FAIL") << " | " << v.detail
              << std::endl;
  }
  return all_pass ? 0 : 1;
}

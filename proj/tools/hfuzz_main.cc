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

// hfuzz: campaign front end.
//
//   hfuzz --target lenfield_copy --budget-secs 30 --rng-seed 1 --out-dir run1
//   hfuzz --mode baseline --target lenfield_copy --out-dir run2
//   hfuzz --aggregate run1 run2 run3 --out-dir summary
//   hfuzz --list-targets
//   hfuzz --export-seeds suite/
//
// Exit status: 0 on success, 1 when a worker failed (a partial report is
// still written), 2 on usage errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfuzz/benchmark_suite.h"
#include "hfuzz/campaign.h"

namespace {

constexpr int kExitWorkerFailure = 1;
constexpr int kExitUsage = 2;

int ListTargets() {
  for (const hfuzz::Target& t : hfuzz::BuiltinSuite()) {
    std::cout << t.name << "\n";
    for (const auto& [site, label] : t.site_labels) {
      std::cout << "  " << site.value << "  " << label << "\n";
    }
  }
  return EXIT_SUCCESS;
}

int ExportSeeds(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "hfuzz: cannot create " << dir << ": " << ec.message() << "\n";
    return kExitUsage;
  }
  for (const hfuzz::Target& t : hfuzz::BuiltinSuite()) {
    std::ofstream out(dir / (t.name + ".seed"), std::ios::binary);
    out.write(reinterpret_cast<const char*>(t.seed.data()),
              static_cast<std::streamsize>(t.seed.size()));
    if (!out) {
      std::cerr << "hfuzz: cannot write seed for " << t.name << "\n";
      return kExitUsage;
    }
  }
  return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfuzz: headroom-guided greybox fuzzer"};
  hfuzz::CampaignConfig config;
  std::string target;
  std::string seed_file;
  std::string out_dir = ".";
  std::string mutation_config;
  uint64_t exec_budget = 0;
  std::vector<std::string> aggregate;
  std::string export_dir;
  bool list_targets = false;

  const std::map<std::string, hfuzz::FuzzMode> modes{
      {"hdr", hfuzz::FuzzMode::kHdrFuzz},
      {"baseline", hfuzz::FuzzMode::kBaselineCoverageOnly}};

  app.add_option("--target", target, "Built-in target name");
  app.add_option("--seed-file", seed_file, "Seed input (default: built-in)");
  app.add_option("--out-dir", out_dir, "Run directory")->capture_default_str();
  app.add_option("--budget-secs", config.budget_secs, "Wall-clock budget")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--exec-budget", exec_budget, "Stop after this many fuzzer execs");
  app.add_option("--sample-pct", config.sample_pct,
                 "Share of non-retained offspring sent to the driver")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));
  app.add_option("--granule-bytes", config.granule_bytes)->capture_default_str();
  app.add_option("--redzone-granules", config.redzone_granules)
      ->capture_default_str();
  app.add_option("--queue-cap", config.queue_cap)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--rng-seed", config.rng_seed)->capture_default_str();
  app.add_option("--mode", config.mode, "hdr or baseline")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
      ->capture_default_str();
  app.add_option("--mutation-config", mutation_config,
                 "JSON file with per-operator weights");
  app.add_flag("--deterministic", config.deterministic,
               "Single thread, driver drained in-process");
  app.add_flag("--stall-driver", config.stall_driver,
               "Testing: the driver never dequeues");
  app.add_option("--aggregate", aggregate,
                 "Average vulns_over_time.csv over these run directories");
  app.add_flag("--list-targets", list_targets, "Print built-in targets");
  app.add_option("--export-seeds", export_dir,
                 "Write <target>.seed for every built-in target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (list_targets) return ListTargets();
  if (!export_dir.empty()) return ExportSeeds(export_dir);

  if (!aggregate.empty()) {
    std::vector<std::filesystem::path> runs(aggregate.begin(), aggregate.end());
    std::filesystem::create_directories(out_dir);
    const auto out_csv =
        std::filesystem::path(out_dir) / "vulns_over_time_mean.csv";
    if (absl::Status s = hfuzz::AggregateTimelines(runs, out_csv); !s.ok()) {
      std::cerr << "hfuzz: " << s.message() << "\n";
      return kExitUsage;
    }
    std::cout << out_csv.string() << "\n";
    return EXIT_SUCCESS;
  }

  if (target.empty()) {
    std::cerr << "hfuzz: --target is required\n" << app.help();
    return kExitUsage;
  }
  config.target = target;
  config.out_dir = out_dir;
  if (!seed_file.empty()) config.seed_file = seed_file;
  if (!mutation_config.empty()) config.mutation_config = mutation_config;
  if (exec_budget > 0) config.exec_budget = exec_budget;

  absl::StatusOr<hfuzz::CampaignReport> report = hfuzz::RunCampaign(config);
  if (!report.ok()) {
    std::cerr << "hfuzz: " << report.status().message() << "\n";
    return kExitUsage;
  }
  std::cout << "target=" << report->target
            << " mode=" << hfuzz::FuzzModeName(report->mode)
            << " sites=" << report->findings.size()
            << " execs=" << report->total_execs
            << " headroom_execs=" << report->headroom_execs
            << " qa_drops=" << report->qa_drop_count << "\n";
  if (!report->error.empty()) {
    std::cerr << "hfuzz: " << report->error << "\n";
    return kExitWorkerFailure;
  }
  return EXIT_SUCCESS;
}

// Copyright 2026 The mfa-fusion Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cli_runner.hpp"

namespace fs = std::filesystem;

namespace {

using clirun::configs;
using clirun::read_file;
using clirun::run;
using clirun::TempDir;

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run("").code, 2); }

TEST(Cli, CatalogListShowsFourteenRows) {
  const auto r = run("catalog list");
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string line;
  int rows = -1;
  bool vein = false;
  const std::regex vein_row(R"(^Vein recognition\s+BI\s+A/P\s+S\s*$)");
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    ++rows;
    vein = vein || std::regex_match(line, vein_row);
  }
  EXPECT_EQ(rows, 14);
  EXPECT_TRUE(vein) << r.out;
}

TEST(Cli, ExportThenValidate) {
  TempDir dir;
  const auto path = dir.path / "catalog.yaml";
  ASSERT_EQ(run("catalog export --out " + path.string()).code, 0);
  EXPECT_TRUE(fs::exists(path.string() + ".manifest.json"));
  EXPECT_EQ(run("catalog validate " + path.string()).code, 0);
  EXPECT_EQ(run("verify-manifest " + path.string() + ".manifest.json").code, 0);
}

TEST(Cli, ValidateRejectsOutOfRangeFar) {
  TempDir dir;
  const auto path = dir.path / "catalog.yaml";
  ASSERT_EQ(run("catalog export --out " + path.string()).code, 0);
  std::string text = read_file(path);
  text.replace(text.find("far: 0.0003"), 11, "far: 1.5");
  std::ofstream(path) << text;
  const auto r = run("catalog validate " + path.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("far"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST(Cli, DefaultSweep) {
  const auto r = run("sweep");
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "n,strategy,k,far,frr,log10_far,log10_frr");
  int rows = 0;
  std::string last_all;
  while (std::getline(is, line)) {
    ++rows;
    if (line.rfind("7,All,7,", 0) == 0)
      last_all = line;
  }
  EXPECT_EQ(rows, 21);
  ASSERT_FALSE(last_all.empty());
  const auto c1 = last_all.find(',', 8);
  const auto c2 = last_all.find(',', c1 + 1);
  const double frr = std::stod(last_all.substr(c1 + 1, c2 - c1 - 1));
  EXPECT_NEAR(frr / 0.13187446675328, 1.0, 1e-12);
}

TEST(Cli, SweepWritesManifest) {
  TempDir dir;
  const auto out = dir.path / "sweep.csv";
  ASSERT_EQ(run("sweep --n-max 5 --k 2 --out " + out.string()).code, 0);
  EXPECT_EQ(run("verify-manifest " + out.string() + ".manifest.json").code, 0);
  std::ofstream(out, std::ios::app) << "tampered\n";
  EXPECT_NE(run("verify-manifest " + out.string() + ".manifest.json").code, 0);
}

TEST(Cli, DecideWorkedExample) {
  const std::string base = "decide --catalog " + configs("three_factor_catalog.yaml") +
                           " --evidence " + configs("evidence.yaml");
  const auto granted = run(base + " --policy " + configs("weighted_policy.yaml"));
  EXPECT_EQ(granted.code, 0);
  EXPECT_NE(granted.out.find("score: 1.375\n"), std::string::npos) << granted.out;
  EXPECT_NE(granted.out.find("decision: granted"), std::string::npos);
  const auto tie = run(base + " --policy " + configs("tie_policy.yaml"));
  EXPECT_EQ(tie.code, 3);
  EXPECT_NE(tie.out.find("decision: denied"), std::string::npos);
}

TEST(Cli, DecideErrors) {
  TempDir dir;
  const auto policy = dir.path / "policy.yaml";
  const auto evidence = dir.path / "evidence.yaml";
  std::ofstream(policy) << "schema_version: 1\nstrategy: all\n";
  std::ofstream(evidence) << "schema_version: 1\nevidence:\n"
                             "  - {factor: retina_v2, decision: 1}\n";
  const std::string cmd =
      "decide --policy " + policy.string() + " --evidence " + evidence.string();
  EXPECT_EQ(run(cmd).code, 2);

  std::ofstream(evidence) << "schema_version: 1\nevidence:\n"
                             "  - {factor: token, decision: 0}\n"
                             "  - {factor: pin_code, decision: 0}\n";
  EXPECT_EQ(run(cmd).code, 3);
  std::ofstream(evidence) << "schema_version: 1\nevidence: []\n";
  EXPECT_EQ(run(cmd).code, 2);
  EXPECT_EQ(run("decide --policy " + policy.string() + " --evidence /nonexistent.yaml").code,
            1);
}

TEST(Cli, SimulateMissingScenarioIsIoError) {
  EXPECT_EQ(run("simulate --scenario /nonexistent/scenario.yaml --seed 1").code, 1);
}

TEST(Cli, SimulateInvalidTrialsIsConfigError) {
  EXPECT_EQ(run("simulate --scenario " + configs("car_entry.yaml") + " --trials 0 --seed 1")
                .code,
            2);
}

TEST(Cli, SimulateIsByteIdenticalAcrossRunsAndThreads) {
  TempDir a;
  TempDir b;
  TempDir c;
  const std::string base =
      "simulate --scenario " + configs("car_entry.yaml") + " --trials 150000 --seed 7";
  ASSERT_EQ(run(base + " --threads 1 --out " + a.path.string()).code, 0);
  ASSERT_EQ(run(base + " --threads 1 --out " + b.path.string()).code, 0);
  ASSERT_EQ(run(base + " --threads 4 --out " + c.path.string()).code, 0);
  for (const auto &entry : fs::directory_iterator(a.path)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(read_file(a.path / name), read_file(b.path / name)) << name;
    EXPECT_EQ(read_file(a.path / name), read_file(c.path / name)) << name;
  }
  EXPECT_EQ(run("verify-manifest " + (a.path / "manifest.json").string()).code, 0);
}

TEST(Cli, TimeToGrant) {
  const auto r = run("time-to-grant --scenario " + configs("car_entry.yaml") +
                     " --trials 2000 --seed 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(r.out.empty());
}

} // namespace

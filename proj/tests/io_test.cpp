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

#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "cli_runner.hpp"
#include "mfa/config_io.hpp"
#include "mfa/manifest.hpp"

namespace {

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(mfa::Sha256::of(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(mfa::Sha256::of("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, SealVerifyAndTamper) {
  clirun::TempDir dir;
  std::ofstream(dir.path / "a.csv") << "x,y\n1,2\n";
  std::ofstream(dir.path / "b.txt") << "hello\n";
  mfa::RunManifest m;
  m.command = "simulate --trials 10";
  m.config_paths = {"scenario.yaml"};
  m.seed = 42;
  m.seal(dir.path, {"a.csv", "b.txt"});
  EXPECT_TRUE(m.verify(dir.path));
  m.write(dir.path / "manifest.json");

  const auto back = mfa::RunManifest::read(dir.path / "manifest.json");
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_TRUE(back.verify(dir.path));

  std::ofstream(dir.path / "b.txt") << "hellO\n";
  EXPECT_FALSE(back.verify(dir.path));
}

TEST(Manifest, MalformedJsonIsConfigError) {
  clirun::TempDir dir;
  std::ofstream(dir.path / "m.json") << "{\"command\": 1}";
  EXPECT_THROW(mfa::RunManifest::read(dir.path / "m.json"), mfa::ConfigError);
  EXPECT_THROW(mfa::RunManifest::read(dir.path / "missing.json"), mfa::IoError);
}

TEST(PolicyFile, BalancedResolvesToMajority) {
  const auto c = mfa::default_catalog();
  const auto p = mfa::load_policy(
      "schema_version: 1\nstrategy: balanced\n"
      "weights: {pin_code: 1, token: 1, facial: 1, voice: 1, fingerprint: 1}\n",
      c);
  EXPECT_EQ(p.strategy, mfa::Strategy::kofn(3));
}

TEST(PolicyFile, Rejections) {
  const auto c = mfa::default_catalog();
  EXPECT_THROW(mfa::load_policy("schema_version: 1\nstrategy: majority\n", c),
               mfa::ConfigError);
  EXPECT_THROW(
      mfa::load_policy("schema_version: 1\nstrategy: all\ncorrelated: true\n", c),
      mfa::ConfigError);
  EXPECT_THROW(mfa::load_policy("schema_version: 1\nstrategy: all\nthreshold: 1\n", c),
               mfa::ConfigError);
  try {
    mfa::load_policy("schema_version: 1\nstrategy: kofn\nk: 3\nweights: {token: 1}\n", c);
    FAIL();
  } catch (const mfa::ConfigError &e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("outside [1, 1]"), std::string::npos) << e.what();
  }
}

TEST(EvidenceFile, SourceClassMapsToTrust) {
  const auto r = mfa::load_evidence("schema_version: 1\nevidence:\n"
                                    "  - {factor: facial, decision: 1, source_class: Stranger}\n"
                                    "  - {factor: token, decision: 0, likelihood: 0.25}\n");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].trust, 0.3);
  EXPECT_EQ(r[1].trust, 1.0);
  EXPECT_EQ(r[1].likelihood, 0.25);
  EXPECT_THROW(mfa::load_evidence("schema_version: 1\nevidence:\n"
                                  "  - {factor: facial, decision: 2}\n"),
               mfa::ConfigError);
  EXPECT_THROW(mfa::load_evidence("schema_version: 1\nevidence:\n"
                                  "  - {factor: facial, decision: 1, trust: 0.5, "
                                  "source_class: Owned}\n"),
               mfa::ConfigError);
}

TEST(Files, MissingFileIsIoError) {
  EXPECT_THROW(mfa::read_text_file("/nonexistent/file.yaml"), mfa::IoError);
  EXPECT_THROW(mfa::load_scenario_file("/nonexistent/file.yaml"), mfa::IoError);
}

TEST(Files, DemoConfigsLoad) {
  for (const char *name : {"car_entry.yaml", "seven_all.yaml", "seven_balanced_adversary.yaml"})
    EXPECT_NO_THROW(mfa::load_scenario_file(clirun::configs(name))) << name;
  EXPECT_EQ(mfa::load_catalog_file(clirun::configs("three_factor_catalog.yaml")).size(), 3u);
}

} // namespace

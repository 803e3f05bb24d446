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

#include <random>

#include <gtest/gtest.h>

#include "mfa/session.hpp"
#include "session_property.hpp"

namespace {

using mfa::EvidenceArrival;
using mfa::GrantTier;
using mfa::PhaseTimeout;
using mfa::SessionPhase;
using mfa::SessionState;
using mfa::Terminal;
using mfa::Tick;

mfa::SessionModel wearable_model() {
  const auto m = mfa::ContextModel::defaults();
  const mfa::Policy p{mfa::Strategy::weighted(1.5),
                      {{"ecg", 1.0}, {"token", 1.0}, {"pin_code", 1.0}},
                      false};
  return mfa::SessionModel(mfa::default_catalog(), p, m.nominal(), {}, m);
}

EvidenceArrival ev(const char *id, bool pass, double at) {
  return {{id, pass, std::nullopt, 1.0, at}};
}

SessionState run(const mfa::SessionModel &model, std::vector<mfa::SessionEvent> events) {
  SessionState s;
  for (const auto &e : events)
    s = mfa::step(s, e, model);
  return s;
}

TEST(Session, EmptySessionTickChangesNothing) {
  const auto model = wearable_model();
  const auto s = mfa::step(SessionState{}, Tick{5.0}, model);
  EXPECT_EQ(s.phase, SessionPhase::PreAuthentication);
  EXPECT_EQ(s.tier, GrantTier::None);
  EXPECT_EQ(s.terminal, Terminal::None);
  EXPECT_EQ(s.elapsed, 5.0);
}

TEST(Session, PassiveWearableGrantsBasicDuringPreAuthentication) {
  const auto model = wearable_model();
  EXPECT_EQ(model.basic_threshold(), 0.75);
  const auto s = run(model, {ev("ecg", true, 30.0)});
  EXPECT_EQ(s.phase, SessionPhase::PreAuthentication);
  EXPECT_EQ(s.tier, GrantTier::Basic);
  EXPECT_EQ(s.basic_at, 30.0);
  EXPECT_EQ(s.score, 1.0);
}

TEST(Session, ActiveEvidenceDuringPreAuthenticationIsFlaggedNotScored) {
  const auto model = wearable_model();
  const auto s = run(model, {ev("pin_code", true, 1.0)});
  ASSERT_EQ(s.evidence.size(), 1u);
  EXPECT_FALSE(s.evidence[0].scored);
  EXPECT_EQ(s.score, 0.0);
  EXPECT_EQ(s.tier, GrantTier::None);
}

TEST(Session, FullGrantThenRevocation) {
  const auto model = wearable_model();
  auto s = run(model, {ev("ecg", true, 30.0), PhaseTimeout{40.0}, ev("pin_code", true, 41.0),
                       PhaseTimeout{42.0}});
  EXPECT_EQ(s.tier, GrantTier::Full);
  EXPECT_EQ(s.phase, SessionPhase::ContinuousMonitoring);
  EXPECT_EQ(s.full_at, 42.0);
  ASSERT_TRUE(s.active_decision);
  EXPECT_EQ(*s.active_decision->score, 2.0);

  s = mfa::step(s, ev("behavior_patterns", false, 100.0), model);
  s = mfa::step(s, Tick{150.0}, model);
  EXPECT_EQ(s.terminal, Terminal::None) << "check not yet due";
  s = mfa::step(s, Tick{192.0}, model);
  EXPECT_EQ(s.terminal, Terminal::Revoked);
  EXPECT_EQ(s.tier, GrantTier::None);
  EXPECT_EQ(s.revoked_at, 192.0);

  const auto after = mfa::step(s, ev("pin_code", true, 200.0), model);
  EXPECT_EQ(after.terminal, Terminal::Revoked);
  EXPECT_EQ(after.tier, GrantTier::None);
}

TEST(Session, PassingMonitoringEndsGranted) {
  const auto model = wearable_model();
  const auto s = run(model, {ev("ecg", true, 30.0), PhaseTimeout{40.0},
                             ev("pin_code", true, 41.0), PhaseTimeout{42.0},
                             ev("behavior_patterns", true, 100.0), Tick{192.0},
                             PhaseTimeout{300.0}});
  EXPECT_EQ(s.terminal, Terminal::Granted);
  EXPECT_EQ(s.tier, GrantTier::Full);
}

TEST(Session, FailedActiveDecisionDenies) {
  const auto model = wearable_model();
  const auto s = run(model, {PhaseTimeout{0.0}, ev("pin_code", true, 1.0),
                             ev("token", false, 1.0), PhaseTimeout{2.0}});
  EXPECT_EQ(s.terminal, Terminal::Denied);
  EXPECT_NE(s.tier, GrantTier::Full);
}

TEST(Session, StalePreAuthenticationEvidenceIsDropped) {
  const auto model = wearable_model();
  const auto s = run(model, {ev("ecg", true, 0.0), PhaseTimeout{400.0},
                             ev("pin_code", true, 401.0), PhaseTimeout{402.0}});
  EXPECT_EQ(s.terminal, Terminal::Denied);
  ASSERT_TRUE(s.active_decision);
  EXPECT_EQ(*s.active_decision->score, 1.0);
}

TEST(Session, OutOfOrderEventThrows) {
  const auto model = wearable_model();
  const auto s = mfa::step(SessionState{}, Tick{10.0}, model);
  EXPECT_THROW(mfa::step(s, Tick{9.0}, model), mfa::EvaluationError);
}

TEST(Session, UnknownFactorIsAConfigError) {
  const auto model = wearable_model();
  EXPECT_THROW(mfa::step(SessionState{}, ev("retina_v2", true, 1.0), model), mfa::ConfigError);
}

TEST(Session, CountingThresholds) {
  const auto m = mfa::ContextModel::defaults();
  const std::map<std::string, double> w{{"token", 1}, {"pin_code", 1}, {"facial", 1}};
  auto model = [&](mfa::Strategy s) {
    return mfa::SessionModel(mfa::default_catalog(), {s, w, false}, m.nominal(), {}, m);
  };
  EXPECT_EQ(model(mfa::Strategy::all()).threshold(), 2.5);
  EXPECT_EQ(model(mfa::Strategy::any()).threshold(), 0.5);
  EXPECT_EQ(model(mfa::Strategy::kofn(2)).threshold(), 1.5);
}

TEST(SessionProperty, MonotoneOverRandomTraces) {
  std::mt19937_64 rng(77);
  const auto r = proptest::check_session_traces(rng, 10000);
  EXPECT_EQ(r.cases, 10000);
  EXPECT_EQ(r.failures, 0) << r.first_failure;
}

TEST(SessionProperty, StepIsPure) {
  std::mt19937_64 rng(78);
  const auto catalog = mfa::default_catalog();
  for (int i = 0; i < 500; ++i) {
    const auto model = proptest::random_model(rng, catalog);
    const auto trace = proptest::random_trace(rng, catalog);
    SessionState a;
    SessionState b;
    for (const auto &e : trace) {
      a = mfa::step(a, e, model);
      b = mfa::step(b, e, model);
    }
    ASSERT_EQ(a, b);
  }
}

} // namespace

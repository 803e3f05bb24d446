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

#pragma once

// Random event traces for the session state machine and the monotonicity
// checks run over them.

#include <random>
#include <string>
#include <vector>

#include "mfa/session.hpp"
#include "property.hpp"

namespace proptest {

inline int phase_rank(mfa::SessionPhase p) { return static_cast<int>(p); }
inline int tier_rank(mfa::GrantTier t) { return static_cast<int>(t); }

inline std::vector<mfa::SessionEvent> random_trace(std::mt19937_64 &rng,
                                                   const mfa::Catalog &catalog) {
  std::uniform_real_distribution<double> gap(0.0, 60.0);
  std::vector<mfa::SessionEvent> out;
  const int len = 1 + static_cast<int>(rng() % 40);
  double t = 0.0;
  for (int i = 0; i < len; ++i) {
    if (rng() % 3 != 0)
      t += gap(rng);
    switch (rng() % 6) {
    case 0: out.emplace_back(mfa::Tick{t}); break;
    case 1: out.emplace_back(mfa::PhaseTimeout{t}); break;
    default: {
      const auto &f = catalog.factors()[rng() % catalog.size()];
      out.emplace_back(mfa::EvidenceArrival{
          {f.id, rng() % 4 != 0, std::nullopt, rng() % 2 ? 1.0 : 0.6, t}});
    }
    }
  }
  return out;
}

inline mfa::SessionModel random_model(std::mt19937_64 &rng, const mfa::Catalog &catalog) {
  Case c = random_case(rng, catalog);
  const auto m = mfa::ContextModel::defaults();
  auto ctx = m.nominal();
  if (rng() % 4 == 0)
    ctx.conditions["gloves_worn"] = "true";
  mfa::SessionConfig cfg;
  cfg.monitor.check_interval = 30.0 + static_cast<double>(rng() % 200);
  return mfa::SessionModel(catalog, c.policy, ctx, cfg, m);
}

/// Phase never moves backwards, elapsed never decreases, tier only climbs
/// until a revocation drops it to None, terminal states absorb, and Full is
/// only ever reached through a granting active decision.
inline Outcome check_session_traces(std::mt19937_64 &rng, int traces) {
  const auto catalog = mfa::default_catalog();
  Outcome out;
  for (int i = 0; i < traces; ++i) {
    const auto model = random_model(rng, catalog);
    const auto trace = random_trace(rng, catalog);
    mfa::SessionState s;
    ++out.cases;
    for (std::size_t e = 0; e < trace.size(); ++e) {
      const mfa::SessionState next = mfa::step(s, trace[e], model);
      const std::string where = "trace " + std::to_string(i) + " event " + std::to_string(e);
      if (phase_rank(next.phase) < phase_rank(s.phase))
        out.fail(where + ": phase moved backwards");
      if (next.elapsed < s.elapsed)
        out.fail(where + ": clock moved backwards");
      if (s.terminal != mfa::Terminal::None &&
          (next.terminal != s.terminal || next.tier != s.tier))
        out.fail(where + ": terminal state not absorbing");
      const bool revoked_now =
          s.terminal == mfa::Terminal::None && next.terminal == mfa::Terminal::Revoked;
      if (revoked_now && next.tier != mfa::GrantTier::None)
        out.fail(where + ": revoked session kept its tier");
      if (!revoked_now && tier_rank(next.tier) < tier_rank(s.tier))
        out.fail(where + ": tier regressed");
      if (next.tier == mfa::GrantTier::Full &&
          !(next.active_decision && next.active_decision->granted))
        out.fail(where + ": Full without a granting active decision");
      if (next.tier == mfa::GrantTier::Basic && !next.basic_at)
        out.fail(where + ": Basic outside pre-authentication");
      s = next;
    }
  }
  return out;
}

} // namespace proptest

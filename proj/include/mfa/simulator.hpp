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

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "mfa/context.hpp"
#include "mfa/error.hpp"
#include "mfa/factor_catalog.hpp"
#include "mfa/fusion.hpp"
#include "mfa/numeric.hpp"
#include "mfa/parallel.hpp"
#include "mfa/session.hpp"
#include "mfa/trust_context.hpp"

namespace mfa {

struct PopulationMix {
  /// Share of sessions started by an adversary.
  double adversary_fraction = 0.0;
  /// Share of legitimately granted sessions taken over by an impostor right
  /// after the Full grant.
  double takeover_fraction = 0.0;
  bool operator==(const PopulationMix &) const = default;
};

/// Conditions that change at time \c at (seconds since session start).
struct ContextChange {
  double at = 0.0;
  std::map<std::string, std::string> conditions;
  bool operator==(const ContextChange &) const = default;
};

struct Scenario {
  std::string name = "scenario";
  Catalog catalog = default_catalog();
  Policy policy;
  ContextModel context_model = ContextModel::defaults();
  std::vector<ContextChange> context_timeline;
  PopulationMix population;
  /// Length of the approach phase; 0 starts directly in active authentication.
  double pre_auth_seconds = 0.0;
  SessionConfig session;
  bool monitoring = true;
  int monitor_windows = 1;
  /// Factor whose evidence carries the continuous validations.
  std::string monitor_factor = "behavior_patterns";
  std::map<std::string, SourceClass> sources; ///< default Owned
  TrustConfig trust;
  /// Median active-phase time above this is flagged as a usability problem.
  double usability_budget = 2.0;

  /// Nominal context with every change up to \p t applied.
  ContextState context_at(double t, SessionPhase phase) const {
    ContextState ctx = context_model.nominal(phase);
    for (const auto &c : context_timeline)
      if (c.at <= t)
        for (const auto &[k, v] : c.conditions)
          ctx.conditions[k] = v;
    return ctx;
  }
};

/// Collect every problem before anything runs; throws one ConfigError
/// listing all of them.
inline void validate_scenario(const Scenario &sc, std::uint64_t trials) {
  std::vector<std::string> problems;
  auto check = [&](auto &&fn) {
    try {
      fn();
    } catch (const ConfigError &e) {
      problems.emplace_back(e.what());
    }
  };
  if (trials < 1)
    problems.emplace_back("trials must be >= 1");
  check([&] { validate_policy(sc.policy, sc.catalog); });
  check([&] { sc.context_model.validate_rules(); });
  check([&] { sc.session.validate(); });
  check([&] { sc.trust.validate(); });
  const auto frac_ok = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!frac_ok(sc.population.adversary_fraction))
    problems.emplace_back("population: field 'adversary_fraction' must lie in [0,1]");
  if (!frac_ok(sc.population.takeover_fraction))
    problems.emplace_back("population: field 'takeover_fraction' must lie in [0,1]");
  if (!(sc.pre_auth_seconds >= 0.0))
    problems.emplace_back("field 'pre_auth_seconds' must be >= 0");
  if (sc.monitor_windows < 1)
    problems.emplace_back("monitor: field 'windows' must be >= 1");
  if (!(sc.usability_budget > 0.0))
    problems.emplace_back("field 'usability_budget' must be > 0");
  if (sc.monitoring) {
    const Factor *mf = sc.catalog.find(sc.monitor_factor);
    if (!mf)
      problems.emplace_back("monitor: factor '" + sc.monitor_factor + "' is not in the catalog");
    else if (!mf->phases.contains(SessionPhase::ContinuousMonitoring))
      problems.emplace_back("monitor: factor '" + sc.monitor_factor +
                            "' cannot fire during ContinuousMonitoring");
  }
  for (const auto &[id, _] : sc.sources)
    if (!sc.catalog.find(id))
      problems.emplace_back("sources: unknown factor id '" + id + "'");
  for (std::size_t i = 0; i < sc.context_timeline.size(); ++i) {
    const auto &c = sc.context_timeline[i];
    if (!(c.at >= 0.0))
      problems.emplace_back("context[" + std::to_string(i) + "]: field 'at' must be >= 0");
    for (const auto &[k, _] : c.conditions) {
      const bool known = std::any_of(sc.context_model.declared.begin(),
                                     sc.context_model.declared.end(),
                                     [&](const auto &d) { return d.first == k; });
      if (!known)
        problems.emplace_back("context[" + std::to_string(i) + "]: condition '" + k +
                              "' is not declared");
    }
  }
  if (!problems.empty()) {
    std::string msg = "scenario '" + sc.name + "' is invalid:";
    for (const auto &p : problems)
      msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

struct SimulationReport {
  std::uint64_t sessions_run = 0;
  std::uint64_t legitimate_sessions = 0;
  std::uint64_t adversary_sessions = 0;
  std::uint64_t false_grants = 0;  ///< adversary reached Full
  std::uint64_t false_denials = 0; ///< legitimate user denied
  std::uint64_t legitimate_full_grants = 0;
  std::uint64_t legitimate_basic_grants = 0;
  std::uint64_t adversary_basic_grants = 0;
  std::uint64_t takeovers = 0;
  std::uint64_t takeovers_revoked = 0;
  std::uint64_t takeovers_revoked_within_window = 0;
  std::uint64_t adversary_revocations = 0;
  std::uint64_t false_revocations = 0; ///< legitimate user, no takeover, revoked
  /// Time of the Full grant since session start -> sessions.
  std::map<double, std::uint64_t> full_grant_times;
  /// Length of the active phase for Full grants -> sessions.
  std::map<double, std::uint64_t> active_phase_times;
  std::map<double, std::uint64_t> basic_grant_times;
  /// Seconds from Full grant to revocation -> sessions.
  std::map<double, std::uint64_t> revocation_latency;
  /// factor id -> firings in {pre, active, continuous}.
  std::map<std::string, std::array<std::uint64_t, 3>> factor_firings;

  bool operator==(const SimulationReport &) const = default;

  void merge(const SimulationReport &o) {
    sessions_run += o.sessions_run;
    legitimate_sessions += o.legitimate_sessions;
    adversary_sessions += o.adversary_sessions;
    false_grants += o.false_grants;
    false_denials += o.false_denials;
    legitimate_full_grants += o.legitimate_full_grants;
    legitimate_basic_grants += o.legitimate_basic_grants;
    adversary_basic_grants += o.adversary_basic_grants;
    takeovers += o.takeovers;
    takeovers_revoked += o.takeovers_revoked;
    takeovers_revoked_within_window += o.takeovers_revoked_within_window;
    adversary_revocations += o.adversary_revocations;
    false_revocations += o.false_revocations;
    auto add = [](std::map<double, std::uint64_t> &dst,
                  const std::map<double, std::uint64_t> &src) {
      for (const auto &[k, v] : src)
        dst[k] += v;
    };
    add(full_grant_times, o.full_grant_times);
    add(active_phase_times, o.active_phase_times);
    add(basic_grant_times, o.basic_grant_times);
    add(revocation_latency, o.revocation_latency);
    for (const auto &[id, c] : o.factor_firings) {
      auto &d = factor_firings[id];
      for (std::size_t i = 0; i < 3; ++i)
        d[i] += c[i];
    }
  }

  static double mean(const std::map<double, std::uint64_t> &h) {
    std::uint64_t n = 0;
    CompensatedSum s;
    for (const auto &[k, v] : h) {
      n += v;
      s.add(k * static_cast<double>(v));
    }
    return n == 0 ? 0.0 : s.value() / static_cast<double>(n);
  }

  /// Smallest value whose cumulative share reaches \p q (0 < q <= 1).
  static double quantile(const std::map<double, std::uint64_t> &h, double q) {
    std::uint64_t n = 0;
    for (const auto &[k, v] : h)
      n += v;
    if (n == 0)
      return 0.0;
    const double target = q * static_cast<double>(n);
    std::uint64_t cum = 0;
    for (const auto &[k, v] : h) {
      cum += v;
      if (static_cast<double>(cum) >= target)
        return k;
    }
    return h.rbegin()->first;
  }

  double mean_time_to_full_grant() const { return mean(full_grant_times); }
  double false_denial_rate() const {
    return legitimate_sessions ? static_cast<double>(false_denials) /
                                     static_cast<double>(legitimate_sessions)
                               : 0.0;
  }
  double false_grant_rate() const {
    return adversary_sessions ? static_cast<double>(false_grants) /
                                    static_cast<double>(adversary_sessions)
                              : 0.0;
  }
  double revoked_within_window_rate() const {
    return takeovers ? static_cast<double>(takeovers_revoked_within_window) /
                           static_cast<double>(takeovers)
                     : 0.0;
  }
};

namespace detail {

struct PlannedFiring {
  const Factor *factor = nullptr;
  SessionPhase phase = SessionPhase::ActiveAuthentication;
  double trust = 1.0;
};

/// Which policy factors fire in which phase. Depends only on the scenario,
/// so it is computed once per run. Factors fire in parallel within a phase.
inline std::vector<PlannedFiring> plan_firings(const Scenario &sc) {
  const ContextState pre = sc.context_at(0.0, SessionPhase::PreAuthentication);
  const ContextState active =
      sc.context_at(sc.pre_auth_seconds, SessionPhase::ActiveAuthentication);
  std::vector<PlannedFiring> plan;
  for (const Factor &f : sc.catalog) {
    if (!sc.policy.weights.contains(f.id))
      continue;
    const auto src = sc.sources.find(f.id);
    const double tau =
        assign_trust(f.id, src == sc.sources.end() ? SourceClass::Owned : src->second, 0,
                     sc.trust)
            .level;
    if (sc.pre_auth_seconds > 0.0 && f.action != ActionMode::Active &&
        f.duration.seconds <= sc.pre_auth_seconds &&
        assess(f, pre, sc.context_model) != Availability::Unavailable) {
      plan.push_back({&f, SessionPhase::PreAuthentication, tau});
    } else if (assess(f, active, sc.context_model) != Availability::Unavailable) {
      plan.push_back({&f, SessionPhase::ActiveAuthentication, tau});
    }
  }
  return plan;
}

inline std::size_t phase_index(SessionPhase p) { return static_cast<std::size_t>(p); }

} // namespace detail

/// Drive \p trials sessions through the state machine. Each session draws a
/// user type, samples every planned factor from its FAR (adversary) or FRR
/// (legitimate user), delivers the evidence at the factor's representative
/// duration, and, after a Full grant, runs the monitoring windows.
/// Deterministic for a given seed, independent of \p threads.
inline SimulationReport run_simulation(const Scenario &sc, std::uint64_t trials,
                                       std::uint64_t seed, unsigned threads = 1) {
  validate_scenario(sc, trials);
  const auto plan = detail::plan_firings(sc);
  const SessionModel model(sc.catalog, sc.policy,
                           sc.context_at(sc.pre_auth_seconds,
                                         SessionPhase::ActiveAuthentication),
                           sc.session, sc.context_model);
  const MonitorConfig &mon = sc.session.monitor;

  double active_end = sc.pre_auth_seconds;
  for (const auto &p : plan)
    if (p.phase == SessionPhase::ActiveAuthentication)
      active_end = std::max(active_end, sc.pre_auth_seconds + p.factor->duration.seconds);

  auto run_one = [&](Rng &rng, SimulationReport &rep) {
    const bool adversary = rng.uniform() < sc.population.adversary_fraction;
    ++rep.sessions_run;
    ++(adversary ? rep.adversary_sessions : rep.legitimate_sessions);

    std::vector<SessionEvent> pre_events;
    std::vector<SessionEvent> active_events;
    for (const auto &p : plan) {
      const double u = rng.uniform();
      const bool pass = adversary ? u < p.factor->far : u >= p.factor->frr;
      EvidenceRecord r;
      r.factor_id = p.factor->id;
      r.decision = pass;
      r.trust = p.trust;
      if (p.phase == SessionPhase::PreAuthentication) {
        r.observed_at = p.factor->duration.seconds;
        pre_events.emplace_back(EvidenceArrival{std::move(r)});
      } else {
        r.observed_at = sc.pre_auth_seconds + p.factor->duration.seconds;
        active_events.emplace_back(EvidenceArrival{std::move(r)});
      }
      ++rep.factor_firings[p.factor->id][detail::phase_index(p.phase)];
    }
    auto by_time = [](const SessionEvent &a, const SessionEvent &b) {
      return event_time(a) < event_time(b);
    };
    std::stable_sort(pre_events.begin(), pre_events.end(), by_time);
    std::stable_sort(active_events.begin(), active_events.end(), by_time);

    SessionState s;
    for (const auto &e : pre_events)
      s = step(s, e, model);
    s = step(s, PhaseTimeout{sc.pre_auth_seconds}, model);
    for (const auto &e : active_events)
      s = step(s, e, model);
    s = step(s, PhaseTimeout{active_end}, model);

    if (s.basic_at) {
      ++(adversary ? rep.adversary_basic_grants : rep.legitimate_basic_grants);
      ++rep.basic_grant_times[*s.basic_at];
    }
    if (s.tier != GrantTier::Full) {
      if (!adversary)
        ++rep.false_denials;
      return;
    }
    if (adversary)
      ++rep.false_grants;
    else
      ++rep.legitimate_full_grants;
    ++rep.full_grant_times[*s.full_at];
    ++rep.active_phase_times[*s.full_at - sc.pre_auth_seconds];

    if (!sc.monitoring)
      return;
    const bool takeover = !adversary && rng.uniform() < sc.population.takeover_fraction;
    const bool impostor = adversary || takeover;
    if (takeover)
      ++rep.takeovers;

    const double t0 = *s.full_at;
    const double horizon = t0 + mon.window * sc.monitor_windows;
    int window = 1;
    int check = 1;
    while (s.terminal == Terminal::None) {
      const double t_valid = t0 + mon.window * window;
      const double t_check = t0 + mon.check_interval * check;
      if (window <= sc.monitor_windows && t_valid <= t_check) {
        const double u = rng.uniform();
        const bool failed = impostor ? u < mon.detection_accuracy : u < mon.false_alarm;
        EvidenceRecord r;
        r.factor_id = sc.monitor_factor;
        r.decision = !failed;
        r.observed_at = t_valid;
        s = step(s, EvidenceArrival{std::move(r)}, model);
        ++rep.factor_firings[sc.monitor_factor]
                            [detail::phase_index(SessionPhase::ContinuousMonitoring)];
        ++window;
      } else if (t_check <= horizon) {
        s = step(s, Tick{t_check}, model);
        ++check;
      } else {
        s = step(s, PhaseTimeout{std::max(horizon, s.elapsed)}, model);
      }
    }
    if (s.terminal == Terminal::Revoked) {
      const double latency = *s.revoked_at - t0;
      ++rep.revocation_latency[latency];
      if (takeover) {
        ++rep.takeovers_revoked;
        if (latency <= mon.window)
          ++rep.takeovers_revoked_within_window;
      } else if (adversary) {
        ++rep.adversary_revocations;
      } else {
        ++rep.false_revocations;
      }
    }
  };

  const auto shards = run_shards<SimulationReport>(
      shard_count(trials), threads, [&](std::uint64_t shard) {
        SimulationReport rep;
        Rng rng(derive_seed(seed, 3, shard));
        const std::uint64_t begin = shard * kShardTrials;
        const std::uint64_t count = std::min(kShardTrials, trials - begin);
        for (std::uint64_t t = 0; t < count; ++t)
          run_one(rng, rep);
        return rep;
      });
  SimulationReport total;
  for (const auto &r : shards)
    total.merge(r);
  for (const auto &[id, _] : sc.policy.weights)
    total.factor_firings.try_emplace(id);
  return total;
}

struct GrantTimeSummary {
  std::uint64_t sessions = 0;
  std::uint64_t basic_grants = 0;
  std::uint64_t full_grants = 0;
  double median_basic = 0.0;
  double median_full = 0.0;         ///< since session start
  double median_active_phase = 0.0; ///< since the active phase opened
  double p90_active_phase = 0.0;
  bool usability_exceeded = false; ///< median active phase above the budget
  bool degenerate = false;         ///< the policy can never grant
};

/// Grant latency of legitimate users under \p sc.
inline GrantTimeSummary time_to_grant(Scenario sc, std::uint64_t trials = 1000,
                                      std::uint64_t seed = 1, unsigned threads = 1) {
  sc.population = {};
  sc.monitoring = false;
  const SimulationReport rep = run_simulation(sc, trials, seed, threads);
  GrantTimeSummary g;
  g.sessions = rep.sessions_run;
  g.basic_grants = rep.legitimate_basic_grants;
  g.full_grants = rep.legitimate_full_grants;
  g.median_basic = SimulationReport::quantile(rep.basic_grant_times, 0.5);
  g.median_full = SimulationReport::quantile(rep.full_grant_times, 0.5);
  g.median_active_phase = SimulationReport::quantile(rep.active_phase_times, 0.5);
  g.p90_active_phase = SimulationReport::quantile(rep.active_phase_times, 0.9);
  g.degenerate = sc.policy.weights.empty() || g.full_grants == 0;
  g.usability_exceeded = !g.degenerate && g.median_active_phase > sc.usability_budget;
  return g;
}

// ---------------------------------------------------------------------------
// Export

inline void write_summary_csv(std::ostream &os, const SimulationReport &r) {
  os << "metric,value\n";
  auto row = [&](const char *name, auto v) {
    os << name << ',';
    if constexpr (std::is_floating_point_v<decltype(v)>)
      os << format_g17(v);
    else
      os << v;
    os << '\n';
  };
  row("sessions_run", r.sessions_run);
  row("legitimate_sessions", r.legitimate_sessions);
  row("adversary_sessions", r.adversary_sessions);
  row("false_grants", r.false_grants);
  row("false_denials", r.false_denials);
  row("false_grant_rate", r.false_grant_rate());
  row("false_denial_rate", r.false_denial_rate());
  row("legitimate_full_grants", r.legitimate_full_grants);
  row("legitimate_basic_grants", r.legitimate_basic_grants);
  row("adversary_basic_grants", r.adversary_basic_grants);
  row("mean_time_to_full_grant", r.mean_time_to_full_grant());
  row("mean_active_phase_time", SimulationReport::mean(r.active_phase_times));
  row("takeovers", r.takeovers);
  row("takeovers_revoked", r.takeovers_revoked);
  row("takeovers_revoked_within_window", r.takeovers_revoked_within_window);
  row("revoked_within_window_rate", r.revoked_within_window_rate());
  row("adversary_revocations", r.adversary_revocations);
  row("false_revocations", r.false_revocations);
}

inline void write_histogram_csv(std::ostream &os, const char *key,
                                const std::map<double, std::uint64_t> &h) {
  os << key << ",count\n";
  for (const auto &[k, v] : h)
    os << format_g17(k) << ',' << v << '\n';
}

inline void write_firings_csv(std::ostream &os, const SimulationReport &r) {
  os << "factor_id,pre_authentication,active_authentication,continuous_monitoring\n";
  for (const auto &[id, c] : r.factor_firings)
    os << id << ',' << c[0] << ',' << c[1] << ',' << c[2] << '\n';
}

inline void write_human_summary(std::ostream &os, const SimulationReport &r) {
  os << "sessions:            " << r.sessions_run << " (" << r.legitimate_sessions
     << " legitimate, " << r.adversary_sessions << " adversary)\n"
     << "false grants:        " << r.false_grants << " (rate "
     << format_g17(r.false_grant_rate()) << ")\n"
     << "false denials:       " << r.false_denials << " (rate "
     << format_g17(r.false_denial_rate()) << ")\n"
     << "basic grants:        " << r.legitimate_basic_grants << " legitimate, "
     << r.adversary_basic_grants << " adversary\n"
     << "mean time to full:   " << format_g17(r.mean_time_to_full_grant()) << " s\n"
     << "takeovers:           " << r.takeovers << ", revoked within one window "
     << r.takeovers_revoked_within_window << " (rate "
     << format_g17(r.revoked_within_window_rate()) << ")\n"
     << "false revocations:   " << r.false_revocations << '\n';
}

} // namespace mfa

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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mfa/context.hpp"
#include "mfa/error.hpp"
#include "mfa/factor_catalog.hpp"
#include "mfa/fusion.hpp"
#include "mfa/trust_context.hpp"

namespace mfa {

enum class GrantTier : std::uint8_t { None, Basic, Full };
enum class Terminal : std::uint8_t { None, Granted, Denied, Revoked };

inline std::string_view to_string(GrantTier t) {
  switch (t) {
  case GrantTier::None: return "None";
  case GrantTier::Basic: return "Basic";
  case GrantTier::Full: return "Full";
  }
  return "?";
}
inline std::string_view to_string(Terminal t) {
  switch (t) {
  case Terminal::None: return "None";
  case Terminal::Granted: return "Granted";
  case Terminal::Denied: return "Denied";
  case Terminal::Revoked: return "Revoked";
  }
  return "?";
}

/// Post-grant behaviour validation. One Bernoulli validation per window:
/// an impostor fails it with probability detection_accuracy, the legitimate
/// user with probability false_alarm.
struct MonitorConfig {
  double window = 150.0;
  double detection_accuracy = 0.95;
  double false_alarm = 0.01;
  double check_interval = 150.0;

  void validate() const {
    if (!(window > 0.0))
      throw ConfigError("monitor: field 'window' must be > 0");
    if (!(detection_accuracy > 0.0 && detection_accuracy < 1.0))
      throw ConfigError("monitor: field 'detection_accuracy' must lie in (0,1)");
    if (!(false_alarm >= 0.0 && false_alarm < 1.0))
      throw ConfigError("monitor: field 'false_alarm' must lie in [0,1)");
    if (!(check_interval > 0.0))
      throw ConfigError("monitor: field 'check_interval' must be > 0");
  }
  bool operator==(const MonitorConfig &) const = default;
};

struct SessionConfig {
  /// Score needed for the Basic tier during pre-authentication; half of the
  /// Full threshold when unset.
  std::optional<double> basic_threshold;
  /// Pre-authentication evidence older than this is dropped before the
  /// active decision.
  double staleness_horizon = 300.0;
  MonitorConfig monitor;

  void validate() const {
    if (basic_threshold && !(*basic_threshold >= 0.0))
      throw ConfigError("session: field 'basic_threshold' must be >= 0");
    if (!(staleness_horizon > 0.0))
      throw ConfigError("session: field 'staleness_horizon' must be > 0");
    monitor.validate();
  }
  bool operator==(const SessionConfig &) const = default;
};

/// Everything the transition function needs besides the state itself:
/// catalog, policy with context-adapted weights, thresholds.
///
/// For counting strategies the running score is the number of passing
/// factors and the Full threshold is the equivalent weighted one, k - 0.5
/// (n - 0.5 for All, 0.5 for Any).
class SessionModel {
public:
  SessionModel(Catalog catalog, Policy policy, const ContextState &ctx,
               SessionConfig config = {},
               const ContextModel &context_model = ContextModel::defaults())
      : catalog_(std::move(catalog)), policy_(std::move(policy)), config_(config) {
    config_.validate();
    validate_policy(policy_, catalog_);
    ContextState decision_ctx = ctx;
    decision_ctx.phase = SessionPhase::ActiveAuthentication;
    try {
      policy_.weights = effective_weights(policy_, catalog_, decision_ctx, context_model);
    } catch (const NoUsableFactorsError &) {
      no_usable_factors_ = true;
      for (auto &[id, w] : policy_.weights)
        w = 0.0;
    }
    const int n = static_cast<int>(policy_.weights.size());
    switch (policy_.strategy.kind) {
    case StrategyKind::All: threshold_ = n - 0.5; break;
    case StrategyKind::Any: threshold_ = 0.5; break;
    case StrategyKind::KofN: threshold_ = policy_.strategy.k - 0.5; break;
    case StrategyKind::WeightedThreshold: threshold_ = policy_.strategy.threshold; break;
    }
    basic_threshold_ = config_.basic_threshold.value_or(threshold_ / 2.0);
  }

  const Catalog &catalog() const noexcept { return catalog_; }
  const Policy &policy() const noexcept { return policy_; }
  const SessionConfig &config() const noexcept { return config_; }
  double threshold() const noexcept { return threshold_; }
  double basic_threshold() const noexcept { return basic_threshold_; }
  /// The policy names no factor, or context removed all of them.
  bool degenerate() const noexcept { return policy_.weights.empty() || no_usable_factors_; }
  bool in_policy(const std::string &id) const { return policy_.weights.contains(id); }

  /// Contribution of one record to the running score.
  double contribution(const EvidenceRecord &r) const {
    if (policy_.strategy.kind != StrategyKind::WeightedThreshold)
      return r.decision ? 1.0 : 0.0;
    const double delta =
        (policy_.use_likelihood && r.likelihood) ? *r.likelihood : (r.decision ? 1.0 : 0.0);
    return delta * catalog_.at(r.factor_id).vendor_accuracy * r.trust *
           policy_.weights.at(r.factor_id);
  }

private:
  Catalog catalog_;
  Policy policy_;
  SessionConfig config_;
  double threshold_ = 0.0;
  double basic_threshold_ = 0.0;
  bool no_usable_factors_ = false;
};

struct SessionEvidence {
  EvidenceRecord record;
  SessionPhase phase = SessionPhase::PreAuthentication;
  /// False for evidence that was recorded but not allowed to count, e.g. an
  /// active-mode factor during pre-authentication.
  bool scored = true;
  bool operator==(const SessionEvidence &) const = default;
};

struct SessionState {
  SessionPhase phase = SessionPhase::PreAuthentication;
  double score = 0.0;
  GrantTier tier = GrantTier::None;
  double elapsed = 0.0;
  std::vector<SessionEvidence> evidence;
  Terminal terminal = Terminal::None;

  std::optional<double> basic_at;
  std::optional<double> active_started_at;
  std::optional<double> full_at;
  std::optional<double> revoked_at;
  double last_check = 0.0;
  std::optional<Decision> active_decision;

  bool operator==(const SessionState &) const = default;
};

struct EvidenceArrival {
  EvidenceRecord record;
};
/// Clock advance; in ContinuousMonitoring runs a validation check when one
/// is due.
struct Tick {
  double at = 0.0;
};
/// End of the current phase.
struct PhaseTimeout {
  double at = 0.0;
};
using SessionEvent = std::variant<EvidenceArrival, Tick, PhaseTimeout>;

inline double event_time(const SessionEvent &e) {
  return std::visit(
      [](const auto &ev) {
        if constexpr (std::is_same_v<std::decay_t<decltype(ev)>, EvidenceArrival>)
          return ev.record.observed_at;
        else
          return ev.at;
      },
      e);
}

namespace detail {

/// Latest scored record per factor among phases Pre/Active, optionally
/// dropping records older than \p not_before.
inline std::vector<EvidenceRecord> decision_records(const SessionState &s,
                                                    double not_before) {
  std::map<std::string, const EvidenceRecord *> latest;
  for (const auto &e : s.evidence) {
    if (!e.scored || e.phase == SessionPhase::ContinuousMonitoring)
      continue;
    if (e.phase == SessionPhase::PreAuthentication && e.record.observed_at < not_before)
      continue;
    latest[e.record.factor_id] = &e.record;
  }
  std::vector<EvidenceRecord> out;
  out.reserve(latest.size());
  for (const auto &e : s.evidence) {
    const auto it = latest.find(e.record.factor_id);
    if (it != latest.end() && it->second == &e.record)
      out.push_back(e.record);
  }
  return out;
}

inline double running_score(const SessionState &s, const SessionModel &m) {
  double score = 0.0;
  for (const auto &r : decision_records(s, -std::numeric_limits<double>::infinity()))
    score += m.contribution(r);
  return score;
}

inline void end_session(SessionState &s, Terminal how) {
  s.terminal = how;
  if (how == Terminal::Revoked)
    s.tier = GrantTier::None;
}

} // namespace detail

/// Pure transition function of the three-phase session.
///
/// PreAuthentication scores only passive-capable evidence and grants Basic
/// once the running score exceeds the basic threshold. Its PhaseTimeout
/// opens ActiveAuthentication, whose PhaseTimeout runs decide() over the
/// freshest evidence per factor: a grant gives Full and starts monitoring, a
/// deny (or nothing to decide on) ends the session. In ContinuousMonitoring
/// a due Tick checks the validations received since the previous check and
/// revokes on any failure; PhaseTimeout ends the session as Granted.
/// Revoked drops the tier to None; terminal states absorb events.
///
/// Throws EvaluationError for events older than the state's clock and
/// ConfigError for evidence naming a factor the catalog does not know.
inline SessionState step(const SessionState &state, const SessionEvent &event,
                         const SessionModel &model) {
  const double at = event_time(event);
  if (at < state.elapsed)
    throw EvaluationError("session: event at " + format_shortest(at) +
                          " precedes the session clock " + format_shortest(state.elapsed));
  SessionState s = state;
  s.elapsed = at;
  if (s.terminal != Terminal::None)
    return s;

  if (const auto *arrival = std::get_if<EvidenceArrival>(&event)) {
    const EvidenceRecord &r = arrival->record;
    const Factor &f = model.catalog().at(r.factor_id);
    SessionEvidence e{r, s.phase, true};
    switch (s.phase) {
    case SessionPhase::PreAuthentication:
      e.scored = f.action != ActionMode::Active && model.in_policy(r.factor_id);
      break;
    case SessionPhase::ActiveAuthentication:
      e.scored = model.in_policy(r.factor_id);
      break;
    case SessionPhase::ContinuousMonitoring:
      e.scored = f.phases.contains(SessionPhase::ContinuousMonitoring);
      break;
    }
    s.evidence.push_back(std::move(e));
    if (s.phase != SessionPhase::ContinuousMonitoring && s.evidence.back().scored) {
      s.score = detail::running_score(s, model);
      if (s.phase == SessionPhase::PreAuthentication && s.tier == GrantTier::None &&
          s.score > model.basic_threshold()) {
        s.tier = GrantTier::Basic;
        s.basic_at = at;
      }
    }
    return s;
  }

  if (std::holds_alternative<Tick>(event)) {
    if (s.phase != SessionPhase::ContinuousMonitoring ||
        at - s.last_check < model.config().monitor.check_interval)
      return s;
    const double since = s.last_check;
    s.last_check = at;
    for (const auto &e : s.evidence) {
      if (e.phase == SessionPhase::ContinuousMonitoring && e.scored &&
          e.record.observed_at > since && e.record.observed_at <= at && !e.record.decision) {
        detail::end_session(s, Terminal::Revoked);
        s.revoked_at = at;
        break;
      }
    }
    return s;
  }

  // PhaseTimeout
  switch (s.phase) {
  case SessionPhase::PreAuthentication:
    s.phase = SessionPhase::ActiveAuthentication;
    s.active_started_at = at;
    break;
  case SessionPhase::ActiveAuthentication: {
    const auto records =
        detail::decision_records(s, at - model.config().staleness_horizon);
    if (records.empty() || model.degenerate()) {
      detail::end_session(s, Terminal::Denied);
      break;
    }
    Decision d = decide(records, model.policy(), model.catalog());
    s.active_decision = d;
    if (d.granted) {
      s.tier = GrantTier::Full;
      s.full_at = at;
      s.phase = SessionPhase::ContinuousMonitoring;
      s.last_check = at;
    } else {
      detail::end_session(s, Terminal::Denied);
    }
    break;
  }
  case SessionPhase::ContinuousMonitoring:
    detail::end_session(s, Terminal::Granted);
    break;
  }
  return s;
}

} // namespace mfa

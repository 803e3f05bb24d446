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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfa/error.hpp"
#include "mfa/factor.hpp"

namespace mfa {

/// Snapshot of environmental conditions plus the session phase being gated.
struct ContextState {
  std::map<std::string, std::string> conditions;
  SessionPhase phase = SessionPhase::ActiveAuthentication;

  bool operator==(const ContextState &) const = default;
};

enum class Availability : std::uint8_t { Available, Partial, Unavailable };

inline std::string_view to_string(Availability a) {
  switch (a) {
  case Availability::Available: return "available";
  case Availability::Partial: return "partial";
  case Availability::Unavailable: return "unavailable";
  }
  return "?";
}

/// When \c condition equals \c value, factors selected by modality or id are
/// affected. With \c requires set, the outcome follows that capability flag
/// (yes: unaffected, partial: Partial, no: Unavailable); otherwise \c effect
/// applies directly.
struct ContextRule {
  std::string condition;
  std::string value;
  std::vector<std::string> modalities;
  std::vector<std::string> factor_ids;
  std::optional<Capability> requires_capability;
  Availability effect = Availability::Unavailable;

  bool operator==(const ContextRule &) const = default;
};

struct ContextModel {
  /// Declared conditions with their nominal values.
  std::vector<std::pair<std::string, std::string>> declared;
  std::vector<ContextRule> rules;
  /// Weight multiplier applied to factors gated as Partial.
  double partial_penalty = 0.5;

  bool operator==(const ContextModel &) const = default;

  static ContextModel defaults() {
    ContextModel m;
    m.declared = {{"gloves_worn", "false"},  {"darkness", "false"},
                  {"precipitation", "false"}, {"noise_level", "low"},
                  {"location", "indoor"},     {"time_of_day", "day"}};
    m.rules = {
        {"gloves_worn", "true", {"contact"}, {}, std::nullopt, Availability::Unavailable},
        {"darkness", "true", {"visual"}, {}, Capability::EnvironmentalRobustness,
         Availability::Unavailable},
        {"precipitation", "true", {"visual"}, {}, Capability::EnvironmentalRobustness,
         Availability::Unavailable},
        {"noise_level", "high", {"audio"}, {}, std::nullopt, Availability::Partial},
    };
    return m;
  }

  /// Every declared condition at its nominal value.
  ContextState nominal(SessionPhase phase = SessionPhase::ActiveAuthentication) const {
    ContextState ctx;
    ctx.phase = phase;
    for (const auto &[name, value] : declared)
      ctx.conditions[name] = value;
    return ctx;
  }

  /// A context must set every declared condition and nothing else.
  void validate(const ContextState &ctx) const {
    for (const auto &[name, _] : declared)
      if (!ctx.conditions.contains(name))
        throw ConfigError("context: declared condition '" + name + "' is missing");
    for (const auto &[name, _] : ctx.conditions) {
      const bool known = std::any_of(declared.begin(), declared.end(),
                                     [&](const auto &d) { return d.first == name; });
      if (!known)
        throw ConfigError("context: condition '" + name + "' is not declared");
    }
  }

  void validate_rules() const {
    if (!(partial_penalty >= 0.0 && partial_penalty <= 1.0))
      throw ConfigError("context: field 'partial_penalty' must lie in [0,1]");
    for (const auto &r : rules) {
      const bool known = std::any_of(declared.begin(), declared.end(),
                                     [&](const auto &d) { return d.first == r.condition; });
      if (!known)
        throw ConfigError("context rule: condition '" + r.condition + "' is not declared");
      if (r.modalities.empty() && r.factor_ids.empty())
        throw ConfigError("context rule on '" + r.condition +
                          "': needs 'modalities' or 'factors'");
    }
  }

  /// Context with one or more conditions overridden.
  ContextState with(std::initializer_list<std::pair<std::string, std::string>> overrides,
                    SessionPhase phase = SessionPhase::ActiveAuthentication) const {
    ContextState ctx = nominal(phase);
    for (const auto &[k, v] : overrides)
      ctx.conditions[k] = v;
    return ctx;
  }
};

inline Availability worst(Availability a, Availability b) {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

/// Gate one factor against a context. Pure.
inline Availability assess(const Factor &f, const ContextState &ctx,
                           const ContextModel &model) {
  if (!f.phases.contains(ctx.phase))
    return Availability::Unavailable;
  Availability result = Availability::Available;
  for (const auto &rule : model.rules) {
    const auto it = ctx.conditions.find(rule.condition);
    if (it == ctx.conditions.end() || it->second != rule.value)
      continue;
    const bool selected =
        std::any_of(rule.modalities.begin(), rule.modalities.end(),
                    [&](const std::string &m) { return f.has_modality(m); }) ||
        std::find(rule.factor_ids.begin(), rule.factor_ids.end(), f.id) !=
            rule.factor_ids.end();
    if (!selected)
      continue;
    Availability outcome = rule.effect;
    if (rule.requires_capability) {
      switch (f.capabilities.get(*rule.requires_capability)) {
      case Tristate::Yes: outcome = Availability::Available; break;
      case Tristate::Partial: outcome = Availability::Partial; break;
      case Tristate::No: outcome = Availability::Unavailable; break;
      }
    }
    result = worst(result, outcome);
  }
  return result;
}

} // namespace mfa

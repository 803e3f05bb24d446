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

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mfa/context.hpp"
#include "mfa/error.hpp"
#include "mfa/factor_catalog.hpp"
#include "mfa/fusion.hpp"
#include "mfa/numeric.hpp"

namespace mfa {

/// Relationship between the user and the device that produced evidence,
/// from most to least trusted.
enum class SourceClass : std::uint8_t { Owned, Familiar, SocialFriend, Stranger };

inline constexpr std::array kAllSourceClasses{SourceClass::Owned, SourceClass::Familiar,
                                              SourceClass::SocialFriend,
                                              SourceClass::Stranger};

inline std::string_view to_string(SourceClass c) {
  switch (c) {
  case SourceClass::Owned: return "Owned";
  case SourceClass::Familiar: return "Familiar";
  case SourceClass::SocialFriend: return "SocialFriend";
  case SourceClass::Stranger: return "Stranger";
  }
  return "?";
}

inline std::optional<SourceClass> parse_source_class(std::string_view s) {
  return detail::parse_enum(s, kAllSourceClasses);
}

struct TrustConfig {
  /// tau per class, indexed by SourceClass.
  std::array<double, 4> levels{1.0, 0.8, 0.6, 0.3};
  /// Distinct successful sessions after which a Stranger counts as Familiar.
  std::uint64_t promotion_threshold = 10;

  double level(SourceClass c) const { return levels[static_cast<std::size_t>(c)]; }

  void validate() const {
    for (SourceClass c : kAllSourceClasses) {
      const double t = level(c);
      if (!(t >= 0.0 && t <= 1.0))
        throw ConfigError("trust: level for " + std::string(to_string(c)) +
                          " must lie in [0,1]");
    }
    if (promotion_threshold < 1)
      throw ConfigError("trust: field 'promotion_threshold' must be >= 1");
  }

  bool operator==(const TrustConfig &) const = default;
};

struct TrustAssignment {
  std::string source_id;
  SourceClass source_class = SourceClass::Stranger; ///< after promotion
  double level = 0.0;                               ///< tau
  std::uint64_t interactions_seen = 0;

  bool operator==(const TrustAssignment &) const = default;
};

/// tau for a source given its declared class and how many distinct
/// successful sessions it has taken part in.
inline TrustAssignment assign_trust(std::string source_id, SourceClass declared,
                                    std::uint64_t successful_sessions,
                                    const TrustConfig &config = {}) {
  TrustAssignment a;
  a.source_id = std::move(source_id);
  a.source_class = declared;
  if (declared == SourceClass::Stranger && successful_sessions >= config.promotion_threshold)
    a.source_class = SourceClass::Familiar;
  a.level = config.level(a.source_class);
  a.interactions_seen = successful_sessions;
  return a;
}

/// Single-writer store of per-source history, kept as an append-only event
/// log that can be compacted into a snapshot.
///
/// Log line:      <timestamp> TAB <source_id> TAB declare|success TAB <arg>
/// Snapshot line: <source_id> TAB <class> TAB <session_id>[,<session_id>...]
class TrustStore {
public:
  struct Event {
    double timestamp = 0.0;
    std::string source_id;
    std::string kind; ///< "declare" (arg = class) or "success" (arg = session id)
    std::string arg;
    bool operator==(const Event &) const = default;
  };

  explicit TrustStore(TrustConfig config = {}) : config_(config) { config_.validate(); }

  void declare(const std::string &source_id, SourceClass c, double timestamp) {
    append({timestamp, source_id, "declare", std::string(to_string(c))});
  }

  void record_success(const std::string &source_id, const std::string &session_id,
                      double timestamp) {
    append({timestamp, source_id, "success", session_id});
  }

  /// Unknown sources are Strangers with no history.
  TrustAssignment assignment(const std::string &source_id) const {
    const auto it = sources_.find(source_id);
    if (it == sources_.end())
      return assign_trust(source_id, SourceClass::Stranger, 0, config_);
    return assign_trust(source_id, it->second.declared, it->second.sessions.size(), config_);
  }

  const std::vector<Event> &pending_log() const noexcept { return log_; }

  void write_log(std::ostream &os) const {
    for (const auto &e : log_)
      os << format_shortest(e.timestamp) << '\t' << e.source_id << '\t' << e.kind << '\t'
         << e.arg << '\n';
  }

  /// Apply every event of a log written by write_log().
  void replay(std::istream &is) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty())
        continue;
      const auto fields = split_tabs(line);
      if (fields.size() != 4)
        throw ConfigError("trust log: expected 4 tab-separated fields", lineno);
      double ts = 0.0;
      try {
        ts = std::stod(fields[0]);
      } catch (const std::exception &) {
        throw ConfigError("trust log: bad timestamp '" + fields[0] + "'", lineno);
      }
      try {
        append({ts, fields[1], fields[2], fields[3]});
      } catch (const ConfigError &e) {
        throw ConfigError(e.what(), lineno);
      }
    }
  }

  /// Current state as a snapshot; clears the pending log.
  std::string compact() {
    std::ostringstream os;
    for (const auto &[id, s] : sources_) {
      os << id << '\t' << to_string(s.declared) << '\t';
      bool first = true;
      for (const auto &session : s.sessions) {
        if (!first)
          os << ',';
        os << session;
        first = false;
      }
      os << '\n';
    }
    log_.clear();
    return os.str();
  }

  static TrustStore from_snapshot(std::istream &is, TrustConfig config = {}) {
    TrustStore store(config);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty())
        continue;
      const auto fields = split_tabs(line);
      if (fields.size() != 3)
        throw ConfigError("trust snapshot: expected 3 tab-separated fields", lineno);
      const auto c = parse_source_class(fields[1]);
      if (!c)
        throw ConfigError("trust snapshot: unknown class '" + fields[1] + "'", lineno);
      auto &s = store.sources_[fields[0]];
      s.declared = *c;
      std::stringstream ss(fields[2]);
      std::string session;
      while (std::getline(ss, session, ','))
        if (!session.empty())
          s.sessions.insert(session);
    }
    return store;
  }

  bool same_state(const TrustStore &o) const { return sources_ == o.sources_; }

private:
  struct SourceState {
    SourceClass declared = SourceClass::Stranger;
    std::set<std::string> sessions;
    bool operator==(const SourceState &) const = default;
  };

  void append(Event e) {
    if (e.source_id.empty() || e.source_id.find('\t') != std::string::npos)
      throw ConfigError("trust store: invalid source id");
    if (e.arg.find_first_of("\t\n,") != std::string::npos)
      throw ConfigError("trust store: argument may not contain tab, newline or comma");
    if (e.kind == "declare") {
      const auto c = parse_source_class(e.arg);
      if (!c)
        throw ConfigError("trust store: unknown source class '" + e.arg + "'");
      sources_[e.source_id].declared = *c;
    } else if (e.kind == "success") {
      sources_[e.source_id].sessions.insert(e.arg);
    } else {
      throw ConfigError("trust store: unknown event '" + e.kind + "'");
    }
    log_.push_back(std::move(e));
  }

  static std::vector<std::string> split_tabs(const std::string &line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      out.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos)
        break;
      start = tab + 1;
    }
    return out;
  }

  TrustConfig config_;
  std::map<std::string, SourceState> sources_;
  std::vector<Event> log_;
};

/// Context-adapted weights for the factors a policy uses.
///
/// Unavailable factors get 0, Partial ones are multiplied by the model's
/// penalty, and the survivors are rescaled so the total equals the configured
/// total. The threshold T therefore keeps its meaning.
inline std::map<std::string, double>
effective_weights(const Policy &policy, const Catalog &catalog, const ContextState &ctx,
                  const ContextModel &model = ContextModel::defaults()) {
  model.validate(ctx);
  std::map<std::string, double> out;
  if (policy.weights.empty())
    return out;

  double configured = 0.0;
  double surviving = 0.0;
  bool any_usable = false;
  for (const auto &[id, phi] : policy.weights) {
    configured += phi;
    double w = 0.0;
    switch (assess(catalog.at(id), ctx, model)) {
    case Availability::Available:
      w = phi;
      any_usable = true;
      break;
    case Availability::Partial:
      w = phi * model.partial_penalty;
      any_usable = true;
      break;
    case Availability::Unavailable:
      break;
    }
    out[id] = w;
    surviving += w;
  }
  if (!any_usable)
    throw NoUsableFactorsError("effective_weights: no usable factors in this context");
  if (configured == 0.0)
    return out;
  if (!(surviving > 0.0))
    throw NoUsableFactorsError("effective_weights: every usable factor has zero weight");
  const double scale = configured / surviving;
  for (auto &[id, w] : out)
    w *= scale;
  return out;
}

} // namespace mfa

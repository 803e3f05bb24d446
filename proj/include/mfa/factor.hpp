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
#include <cmath>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <utility>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfa/error.hpp"

namespace mfa {

enum class SessionPhase : std::uint8_t {
  PreAuthentication,
  ActiveAuthentication,
  ContinuousMonitoring,
};

inline constexpr std::array kAllPhases{SessionPhase::PreAuthentication,
                                       SessionPhase::ActiveAuthentication,
                                       SessionPhase::ContinuousMonitoring};

enum class Category : std::uint8_t {
  Knowledge = 1,
  Ownership = 2,
  Biometric = 4,
  Behavior = 8,
};

inline constexpr std::array kAllCategories{Category::Knowledge, Category::Ownership,
                                           Category::Biometric, Category::Behavior};

enum class ActionMode : std::uint8_t { Active, Passive, Either };

/// Short (<1 s), Medium (1-15 s), Long (>15 s).
enum class DurationClass : std::uint8_t { Short, Medium, Long };

enum class Tristate : std::uint8_t { No, Partial, Yes };

enum class Capability : std::uint8_t {
  NonTextInput,
  ShortContactTime,
  StringentUsability,
  EnvironmentalRobustness,
  HighSecurityLevel,
};

inline constexpr std::array kAllCapabilities{
    Capability::NonTextInput, Capability::ShortContactTime,
    Capability::StringentUsability, Capability::EnvironmentalRobustness,
    Capability::HighSecurityLevel};

/// Small bitset over an enum whose values are < 8.
template <typename Enum> class EnumSet {
public:
  constexpr EnumSet() = default;
  constexpr EnumSet(std::initializer_list<Enum> values) {
    for (Enum v : values)
      insert(v);
  }

  constexpr void insert(Enum v) noexcept { bits_ |= mask(v); }
  constexpr bool contains(Enum v) const noexcept { return (bits_ & mask(v)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::uint8_t bits() const noexcept { return bits_; }
  constexpr bool operator==(const EnumSet &) const = default;

private:
  static constexpr std::uint8_t mask(Enum v) noexcept {
    if constexpr (std::is_same_v<Enum, Category>)
      return static_cast<std::uint8_t>(v);
    else
      return static_cast<std::uint8_t>(1u << static_cast<unsigned>(v));
  }
  std::uint8_t bits_ = 0;
};

using CategorySet = EnumSet<Category>;
using PhaseSet = EnumSet<SessionPhase>;

struct Duration {
  /// Governing (slowest) class; for ranges such as "S/M" this is
  /// the upper end.
  DurationClass cls = DurationClass::Short;
  /// Fastest class in the range; equal to \c cls for single-class entries.
  DurationClass fastest = DurationClass::Short;
  /// Representative wall-clock time in seconds, used by the simulator clock.
  double seconds = 0.5;

  bool operator==(const Duration &) const = default;
};

struct CapabilityFlags {
  Tristate non_text_input = Tristate::No;
  Tristate short_contact_time = Tristate::No;
  Tristate stringent_usability = Tristate::No;
  Tristate environmental_robustness = Tristate::No;
  Tristate high_security_level = Tristate::No;

  Tristate get(Capability c) const noexcept {
    switch (c) {
    case Capability::NonTextInput: return non_text_input;
    case Capability::ShortContactTime: return short_contact_time;
    case Capability::StringentUsability: return stringent_usability;
    case Capability::EnvironmentalRobustness: return environmental_robustness;
    case Capability::HighSecurityLevel: return high_security_level;
    }
    return Tristate::No;
  }

  bool operator==(const CapabilityFlags &) const = default;
};

/// One authentication method, modelled statistically by its error rates.
struct Factor {
  std::string id;
  std::string name;
  CategorySet category;
  ActionMode action = ActionMode::Active;
  Duration duration;
  double far = 0.0;             ///< P(adversary accepted)
  double frr = 0.0;             ///< P(legitimate user rejected)
  double vendor_accuracy = 1.0; ///< mu, multiplies the decision in weighted fusion
  CapabilityFlags capabilities;
  /// Sensing channels (e.g. "visual", "contact"); matched by context rules.
  std::vector<std::string> modalities;
  PhaseSet phases;

  bool has_modality(std::string_view m) const {
    return std::find(modalities.begin(), modalities.end(), m) != modalities.end();
  }
  bool operator==(const Factor &) const = default;
};

// ---------------------------------------------------------------------------
// Names. The long form is used in config files, the short form mirrors the
// compact notation of the factor table (K/O/BI/BE, A/P, S/M/L).

inline std::string_view to_string(SessionPhase p) {
  switch (p) {
  case SessionPhase::PreAuthentication: return "PreAuthentication";
  case SessionPhase::ActiveAuthentication: return "ActiveAuthentication";
  case SessionPhase::ContinuousMonitoring: return "ContinuousMonitoring";
  }
  return "?";
}
inline std::string_view to_string(Category c) {
  switch (c) {
  case Category::Knowledge: return "Knowledge";
  case Category::Ownership: return "Ownership";
  case Category::Biometric: return "Biometric";
  case Category::Behavior: return "Behavior";
  }
  return "?";
}
inline std::string_view to_string(ActionMode a) {
  switch (a) {
  case ActionMode::Active: return "Active";
  case ActionMode::Passive: return "Passive";
  case ActionMode::Either: return "Either";
  }
  return "?";
}
inline std::string_view to_string(DurationClass d) {
  switch (d) {
  case DurationClass::Short: return "Short";
  case DurationClass::Medium: return "Medium";
  case DurationClass::Long: return "Long";
  }
  return "?";
}
inline std::string_view to_string(Tristate t) {
  switch (t) {
  case Tristate::No: return "no";
  case Tristate::Partial: return "partial";
  case Tristate::Yes: return "yes";
  }
  return "?";
}
inline std::string_view to_string(Capability c) {
  switch (c) {
  case Capability::NonTextInput: return "non_text_input";
  case Capability::ShortContactTime: return "short_contact_time";
  case Capability::StringentUsability: return "stringent_usability";
  case Capability::EnvironmentalRobustness: return "environmental_robustness";
  case Capability::HighSecurityLevel: return "high_security_level";
  }
  return "?";
}

namespace detail {
template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view text, const std::array<Enum, N> &values) {
  for (Enum v : values)
    if (to_string(v) == text)
      return v;
  return std::nullopt;
}
} // namespace detail

inline std::optional<SessionPhase> parse_phase(std::string_view s) {
  return detail::parse_enum(s, kAllPhases);
}
inline std::optional<Category> parse_category(std::string_view s) {
  return detail::parse_enum(s, kAllCategories);
}
inline std::optional<ActionMode> parse_action(std::string_view s) {
  return detail::parse_enum(
      s, std::array{ActionMode::Active, ActionMode::Passive, ActionMode::Either});
}
inline std::optional<DurationClass> parse_duration_class(std::string_view s) {
  return detail::parse_enum(
      s, std::array{DurationClass::Short, DurationClass::Medium, DurationClass::Long});
}
inline std::optional<Tristate> parse_tristate(std::string_view s) {
  return detail::parse_enum(s, std::array{Tristate::No, Tristate::Partial, Tristate::Yes});
}
inline std::optional<Capability> parse_capability(std::string_view s) {
  return detail::parse_enum(s, kAllCapabilities);
}

inline std::string table_notation(CategorySet set) {
  std::string out;
  for (Category c : kAllCategories) {
    if (!set.contains(c))
      continue;
    if (!out.empty())
      out += '/';
    switch (c) {
    case Category::Knowledge: out += "K"; break;
    case Category::Ownership: out += "O"; break;
    case Category::Biometric: out += "BI"; break;
    case Category::Behavior: out += "BE"; break;
    }
  }
  return out;
}

inline std::string table_notation(ActionMode a) {
  switch (a) {
  case ActionMode::Active: return "A";
  case ActionMode::Passive: return "P";
  case ActionMode::Either: return "A/P";
  }
  return "?";
}

inline std::string table_notation(const Duration &d) {
  auto letter = [](DurationClass c) {
    return std::string(1, to_string(c).front());
  };
  if (d.fastest == d.cls)
    return letter(d.cls);
  const int gap = static_cast<int>(d.cls) - static_cast<int>(d.fastest);
  return letter(d.fastest) + (gap == 1 ? "/" : "-") + letter(d.cls);
}

// ---------------------------------------------------------------------------

/// Half-open bounds [lo, hi) of a duration class in seconds (Medium is closed).
inline std::pair<double, double> duration_bounds(DurationClass c) {
  switch (c) {
  case DurationClass::Short: return {0.0, 1.0};
  case DurationClass::Medium: return {1.0, 15.0};
  case DurationClass::Long: return {15.0, std::numeric_limits<double>::infinity()};
  }
  return {0.0, 0.0};
}

inline bool duration_in_class(double seconds, DurationClass c) {
  switch (c) {
  case DurationClass::Short: return seconds > 0.0 && seconds < 1.0;
  case DurationClass::Medium: return seconds >= 1.0 && seconds <= 15.0;
  case DurationClass::Long: return seconds > 15.0 && std::isfinite(seconds);
  }
  return false;
}

/// Throws ConfigError naming the first violated field.
inline void validate_factor(const Factor &f) {
  auto fail = [&](const std::string &field, const std::string &why) {
    throw ConfigError("factor '" + f.id + "': field '" + field + "' " + why);
  };
  if (f.id.empty())
    throw ConfigError("factor: field 'id' must be non-empty");
  if (f.name.empty())
    fail("name", "must be non-empty");
  if (f.category.empty())
    fail("category", "must contain at least one category");
  if (!(f.far >= 0.0 && f.far <= 1.0))
    fail("far", "must lie in [0,1]");
  if (!(f.frr >= 0.0 && f.frr <= 1.0))
    fail("frr", "must lie in [0,1]");
  if (!(f.vendor_accuracy > 0.0 && f.vendor_accuracy <= 1.0))
    fail("vendor_accuracy", "must lie in (0,1]");
  if (static_cast<int>(f.duration.fastest) > static_cast<int>(f.duration.cls))
    fail("duration.fastest", "must not be slower than duration.class");
  if (!duration_in_class(f.duration.seconds, f.duration.cls))
    fail("duration.seconds", "must lie inside the interval of class " +
                                 std::string(to_string(f.duration.cls)));
  if (f.phases.empty())
    fail("phases", "must name at least one session phase");
  if (f.action == ActionMode::Passive &&
      !f.phases.contains(SessionPhase::PreAuthentication) &&
      !f.phases.contains(SessionPhase::ContinuousMonitoring))
    fail("phases", "of a passive factor must include PreAuthentication or "
                   "ContinuousMonitoring");
}

} // namespace mfa

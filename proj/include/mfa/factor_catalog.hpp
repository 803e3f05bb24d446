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

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mfa/context.hpp"
#include "mfa/error.hpp"
#include "mfa/factor.hpp"

namespace mfa {

/// Immutable, validated collection of factors with id lookup.
class Catalog {
public:
  Catalog() = default;

  explicit Catalog(std::vector<Factor> factors) : factors_(std::move(factors)) {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      validate_factor(factors_[i]);
      if (!index_.emplace(factors_[i].id, i).second)
        throw ConfigError("duplicate factor id '" + factors_[i].id + "'");
    }
  }

  const std::vector<Factor> &factors() const noexcept { return factors_; }
  std::size_t size() const noexcept { return factors_.size(); }
  bool empty() const noexcept { return factors_.empty(); }
  auto begin() const noexcept { return factors_.begin(); }
  auto end() const noexcept { return factors_.end(); }

  const Factor *find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &factors_[it->second];
  }

  const Factor &at(std::string_view id) const {
    if (const Factor *f = find(id))
      return *f;
    throw ConfigError("unknown factor id '" + std::string(id) + "'");
  }

  bool operator==(const Catalog &other) const { return factors_ == other.factors_; }

private:
  std::vector<Factor> factors_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline CapabilityFlags caps(Tristate a, Tristate b, Tristate c, Tristate d, Tristate e) {
  return {a, b, c, d, e};
}

} // namespace detail

/// The fourteen factors of the reference factor table. Every factor carries
/// FAR = 0.03 % and FRR = 2 % and vendor accuracy 1; override per deployment.
inline Catalog default_catalog() {
  using enum Tristate;
  using C = Category;
  using D = DurationClass;
  const PhaseSet active_only{SessionPhase::ActiveAuthentication};
  const PhaseSet anywhere{SessionPhase::PreAuthentication,
                          SessionPhase::ActiveAuthentication,
                          SessionPhase::ContinuousMonitoring};

  // Capability rows of the method comparison table, keyed by method family.
  const auto knowledge = detail::caps(No, Yes, No, Yes, No);
  const auto token = detail::caps(Yes, Yes, No, Yes, No);
  const auto scanner = detail::caps(Yes, Yes, Partial, No, Yes);
  const auto face = detail::caps(Yes, No, Yes, No, Yes);
  const auto voice = detail::caps(Yes, No, Partial, Yes, Partial);
  const auto wearable = detail::caps(Yes, Yes, No, No, Yes);
  const auto behavior = detail::caps(Yes, No, Yes, No, Yes);

  const Duration s{D::Short, D::Short, 0.5};
  const Duration m{D::Medium, D::Medium, 8.0};
  const Duration sm{D::Medium, D::Short, 8.0};
  const Duration l{D::Long, D::Long, 60.0};
  const Duration sl{D::Long, D::Short, 30.0};

  auto make = [](std::string id, std::string name, CategorySet cat, ActionMode act,
                 Duration dur, CapabilityFlags cf, std::vector<std::string> modalities,
                 PhaseSet phases) {
    Factor f;
    f.id = std::move(id);
    f.name = std::move(name);
    f.category = cat;
    f.action = act;
    f.duration = dur;
    f.far = 0.0003;
    f.frr = 0.02;
    f.vendor_accuracy = 1.0;
    f.capabilities = cf;
    f.modalities = std::move(modalities);
    f.phases = phases;
    return f;
  };
  using A = ActionMode;

  return Catalog({
      make("pin_code", "PIN code", {C::Knowledge}, A::Active, s, knowledge, {"keypad"},
           active_only),
      make("password", "Password", {C::Knowledge}, A::Active, m, knowledge, {"keypad"},
           active_only),
      make("token", "Token", {C::Ownership}, A::Passive, s, token, {"radio"}, anywhere),
      make("voice", "Voice", {C::Biometric, C::Behavior}, A::Either, sm, voice, {"audio"},
           anywhere),
      make("facial", "Facial", {C::Biometric}, A::Either, sm, face, {"visual"}, anywhere),
      make("ocular", "Ocular-based", {C::Biometric}, A::Active, sm, scanner, {"visual"},
           active_only),
      make("fingerprint", "Fingerprint", {C::Biometric}, A::Either, s, scanner,
           {"contact"}, anywhere),
      make("hand_geometry", "Hand geometry", {C::Biometric}, A::Either, s, scanner,
           {"contact"}, anywhere),
      make("geo_location", "Geographical location", {C::Behavior}, A::Passive, l,
           wearable, {"wearable"}, anywhere),
      make("vein", "Vein recognition", {C::Biometric}, A::Either, s, scanner, {"contact"},
           anywhere),
      make("thermal_image", "Thermal image", {C::Biometric, C::Behavior}, A::Passive, sm,
           face, {"thermal"}, anywhere),
      make("behavior_patterns", "Behavior patterns", {C::Behavior}, A::Passive, l,
           behavior, {"behavioral"}, anywhere),
      make("weight", "Weight", {C::Biometric}, A::Passive, s, scanner, {"pressure"},
           anywhere),
      make("ecg", "Electrocardiographic (ECG) recognition", {C::Biometric, C::Behavior},
           A::Passive, sl, wearable, {"wearable"}, anywhere),
  });
}

struct FactorAvailability {
  std::string factor_id;
  Availability availability = Availability::Available;
};

/// Gate every factor of \p catalog against \p ctx, preserving catalog order.
inline std::vector<FactorAvailability>
assess_availability(const Catalog &catalog, const ContextState &ctx,
                    const ContextModel &model = ContextModel::defaults()) {
  model.validate(ctx);
  std::vector<FactorAvailability> out;
  out.reserve(catalog.size());
  for (const Factor &f : catalog)
    out.push_back({f.id, assess(f, ctx, model)});
  return out;
}

/// Factors usable under \p ctx (Available or Partial), in catalog order.
inline std::vector<Factor> available_factors(const Catalog &catalog, const ContextState &ctx,
                                             const ContextModel &model =
                                                 ContextModel::defaults()) {
  model.validate(ctx);
  std::vector<Factor> out;
  for (const Factor &f : catalog)
    if (assess(f, ctx, model) != Availability::Unavailable)
      out.push_back(f);
  return out;
}

} // namespace mfa

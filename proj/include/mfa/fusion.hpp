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

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mfa/error.hpp"
#include "mfa/factor_catalog.hpp"

namespace mfa {

/// One factor's outcome within a session.
struct EvidenceRecord {
  std::string factor_id;
  bool decision = false;            ///< delta
  std::optional<double> likelihood; ///< raw matcher output, when the vendor exposes it
  double trust = 1.0;               ///< tau of the source that produced it
  double observed_at = 0.0;         ///< seconds since session start

  bool operator==(const EvidenceRecord &) const = default;
};

enum class StrategyKind : std::uint8_t { All, Any, KofN, WeightedThreshold };

inline std::string_view to_string(StrategyKind k) {
  switch (k) {
  case StrategyKind::All: return "All";
  case StrategyKind::Any: return "Any";
  case StrategyKind::KofN: return "KofN";
  case StrategyKind::WeightedThreshold: return "WeightedThreshold";
  }
  return "?";
}

struct Strategy {
  StrategyKind kind = StrategyKind::All;
  int k = 0;              ///< KofN only
  double threshold = 0.0; ///< WeightedThreshold only

  static Strategy all() { return {StrategyKind::All, 0, 0.0}; }
  static Strategy any() { return {StrategyKind::Any, 0, 0.0}; }
  static Strategy kofn(int k) { return {StrategyKind::KofN, k, 0.0}; }
  static Strategy weighted(double t) { return {StrategyKind::WeightedThreshold, 0, t}; }

  bool operator==(const Strategy &) const = default;
};

/// Strict majority, the "pass most of the checks" rule.
inline int majority(int n) { return n / 2 + 1; }

struct Policy {
  Strategy strategy;
  /// phi per factor. The key set is the set of factors the policy uses.
  std::map<std::string, double> weights;
  /// Replace delta by the likelihood when a record carries one.
  bool use_likelihood = false;

  bool operator==(const Policy &) const = default;
};

/// Static checks against a catalog. Throws ConfigError.
inline void validate_policy(const Policy &policy, const Catalog &catalog) {
  for (const auto &[id, w] : policy.weights) {
    if (!catalog.find(id))
      throw ConfigError("policy: weights: unknown factor id '" + id + "'");
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ConfigError("policy: weights." + id + " must be a finite value >= 0");
  }
  const auto &s = policy.strategy;
  if (s.kind == StrategyKind::KofN) {
    const auto n = static_cast<int>(policy.weights.empty() ? catalog.size()
                                                           : policy.weights.size());
    if (s.k < 1 || s.k > n)
      throw ConfigError("policy: field 'k' must lie in [1, " + std::to_string(n) + "]");
  }
  if (s.kind == StrategyKind::WeightedThreshold &&
      (!(s.threshold >= 0.0) || !std::isfinite(s.threshold)))
    throw ConfigError("policy: field 'threshold' must be a finite value >= 0");
}

struct Decision {
  bool granted = false;
  std::optional<double> score; ///< WeightedThreshold only
  int passed_count = 0;
  /// delta*mu*tau*phi for weighted policies, delta otherwise; in record order.
  std::vector<std::pair<std::string, double>> contributing;

  bool operator==(const Decision &) const = default;
};

/// Fuse per-factor outcomes into one grant/deny decision.
///
/// Counting strategies look only at the decision bits. WeightedThreshold
/// grants iff sum(delta_i * mu_i * tau_i * phi_i) > T; a tie denies. The sum
/// is accumulated left to right in record order, which keeps it monotone in
/// every term. Factors without a record simply contribute nothing.
///
/// Throws EvaluationError for an empty or duplicated record set and
/// ConfigError for ids unknown to the catalog (or to the weights map, for
/// weighted policies) and malformed records.
inline Decision decide(std::span<const EvidenceRecord> records, const Policy &policy,
                       const Catalog &catalog) {
  if (records.empty())
    throw EvaluationError("decide: no evidence records");

  const auto &strategy = policy.strategy;
  const bool weighted = strategy.kind == StrategyKind::WeightedThreshold;

  Decision out;
  out.contributing.reserve(records.size());
  std::unordered_set<std::string_view> seen;
  double score = 0.0;
  for (const auto &r : records) {
    const Factor &f = catalog.at(r.factor_id);
    if (!seen.insert(r.factor_id).second)
      throw EvaluationError("decide: duplicate evidence for factor '" + r.factor_id + "'");
    if (!(r.trust >= 0.0 && r.trust <= 1.0))
      throw ConfigError("evidence '" + r.factor_id + "': field 'trust' must lie in [0,1]");
    if (r.likelihood && !(*r.likelihood >= 0.0 && *r.likelihood <= 1.0))
      throw ConfigError("evidence '" + r.factor_id +
                        "': field 'likelihood' must lie in [0,1]");
    if (r.decision)
      ++out.passed_count;

    if (weighted) {
      const auto w = policy.weights.find(r.factor_id);
      if (w == policy.weights.end())
        throw ConfigError("policy: no weight configured for factor '" + r.factor_id + "'");
      const double delta = (policy.use_likelihood && r.likelihood)
                               ? *r.likelihood
                               : (r.decision ? 1.0 : 0.0);
      const double term = delta * f.vendor_accuracy * r.trust * w->second;
      score += term;
      out.contributing.emplace_back(r.factor_id, term);
    } else {
      out.contributing.emplace_back(r.factor_id, r.decision ? 1.0 : 0.0);
    }
  }

  const int n = static_cast<int>(records.size());
  switch (strategy.kind) {
  case StrategyKind::All:
    out.granted = out.passed_count == n;
    break;
  case StrategyKind::Any:
    out.granted = out.passed_count >= 1;
    break;
  case StrategyKind::KofN:
    if (strategy.k < 1)
      throw ConfigError("policy: field 'k' must be >= 1");
    // Fewer records than k (factors gated out) cannot reach k: deny.
    out.granted = out.passed_count >= strategy.k;
    break;
  case StrategyKind::WeightedThreshold:
    if (!(strategy.threshold >= 0.0))
      throw ConfigError("policy: field 'threshold' must be >= 0");
    out.score = score;
    out.granted = score > strategy.threshold;
    break;
  }
  return out;
}

/// Smallest k with k * p > threshold, when every per-factor product
/// p = mu*tau*phi is the same (relative tolerance 1e-12) and such a k <= n
/// exists. The weighted rule then decides exactly like k-of-n.
inline std::optional<int> equivalent_kofn(std::span<const double> products,
                                          double threshold) {
  if (products.empty() || threshold < 0.0)
    return std::nullopt;
  const double p = products.front();
  for (double q : products)
    if (std::abs(q - p) > 1e-12 * std::max(std::abs(p), std::abs(q)))
      return std::nullopt;
  if (!(p > 0.0))
    return std::nullopt;
  // Accumulate the way decide() does, so the equivalence holds bit for bit.
  const auto n = static_cast<int>(products.size());
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    sum += p;
    if (sum > threshold)
      return k;
  }
  return std::nullopt;
}

} // namespace mfa

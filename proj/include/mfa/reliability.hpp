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
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mfa/error.hpp"
#include "mfa/fusion.hpp"
#include "mfa/numeric.hpp"
#include "mfa/parallel.hpp"

namespace mfa {

/// Operating point of one factor. Factors are assumed independent.
struct FactorRates {
  double far = 0.0;
  double frr = 0.0;
  bool operator==(const FactorRates &) const = default;
};

/// Rates of a fused system. Values below kUnderflowFloor are reported as 0 and
/// flagged; use the log-space routines when those magnitudes matter.
struct CompositeRates {
  double far = 0.0;
  double frr = 0.0;
  bool far_underflow = false;
  bool frr_underflow = false;
  bool operator==(const CompositeRates &) const = default;
};

inline constexpr double kUnderflowFloor = 1e-300;

enum class Population : std::uint8_t { Legitimate, Adversary };

/// probs[j] = P(exactly j factors pass) under one hypothesis.
struct PassCountDistribution {
  std::vector<double> probs;
  Population population = Population::Legitimate;
};

namespace detail {

inline void check_rates(std::span<const FactorRates> factors, const char *op) {
  if (factors.empty())
    throw EvaluationError(std::string(op) + ": empty factor list");
  for (const auto &f : factors)
    if (!(f.far >= 0.0 && f.far <= 1.0 && f.frr >= 0.0 && f.frr <= 1.0))
      throw ConfigError(std::string(op) + ": factor rates must lie in [0,1]");
}

/// Probability that a factor passes, and fails, under a hypothesis. Both are
/// taken from the given rate directly so that neither is a rounded 1 - x.
inline std::pair<double, double> pass_fail(const FactorRates &f, Population pop) {
  return pop == Population::Adversary ? std::pair{f.far, 1.0 - f.far}
                                      : std::pair{1.0 - f.frr, f.frr};
}

/// Product of the given probabilities (every event happens).
template <typename Fn>
double product_of(std::span<const FactorRates> factors, Fn prob) {
  double p = 1.0;
  for (const auto &f : factors)
    p *= prob(f);
  return p;
}

/// 1 - prod(1 - x_i) via log1p/expm1, accurate for tiny x_i.
template <typename Fn>
double at_least_one(std::span<const FactorRates> factors, Fn prob) {
  if (factors.size() == 1)
    return prob(factors.front());
  double log_none = 0.0;
  for (const auto &f : factors) {
    const double x = prob(f);
    if (x >= 1.0)
      return 1.0;
    log_none += std::log1p(-x);
  }
  return -std::expm1(log_none);
}

inline double flush(double x, bool &flag) {
  if (x > 0.0 && x < kUnderflowFloor) {
    flag = true;
    return 0.0;
  }
  return x;
}

/// Flag a result that is exactly zero only because the product underflowed.
inline CompositeRates finish(double far, double frr, bool far_nonzero, bool frr_nonzero) {
  CompositeRates r;
  r.far = flush(far, r.far_underflow);
  r.frr = flush(frr, r.frr_underflow);
  if (far == 0.0 && far_nonzero)
    r.far_underflow = true;
  if (frr == 0.0 && frr_nonzero)
    r.frr_underflow = true;
  return r;
}

inline bool all_positive(std::span<const FactorRates> factors, double FactorRates::*m) {
  for (const auto &f : factors)
    if (!(f.*m > 0.0))
      return false;
  return true;
}

} // namespace detail

/// Distribution of the number of passing factors (Poisson-binomial), by
/// convolving one Bernoulli factor at a time.
inline PassCountDistribution pass_count_distribution(std::span<const FactorRates> factors,
                                                     Population population) {
  detail::check_rates(factors, "pass_count_distribution");
  PassCountDistribution d;
  d.population = population;
  d.probs.assign(factors.size() + 1, 0.0);
  d.probs[0] = 1.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto [pass, fail] = detail::pass_fail(factors[i], population);
    for (std::size_t j = i + 1; j > 0; --j)
      d.probs[j] = d.probs[j] * fail + d.probs[j - 1] * pass;
    d.probs[0] *= fail;
  }
  return d;
}

/// Natural-log version of pass_count_distribution; entries may be -inf.
inline std::vector<double> log_pass_count_distribution(std::span<const FactorRates> factors,
                                                       Population population) {
  detail::check_rates(factors, "log_pass_count_distribution");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  auto safe_log = [](double x) { return x > 0.0 ? std::log(x) : neg_inf; };
  std::vector<double> lp(factors.size() + 1, neg_inf);
  lp[0] = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto [pass, fail] = detail::pass_fail(factors[i], population);
    const double lpass = safe_log(pass);
    const double lfail = safe_log(fail);
    for (std::size_t j = i + 1; j > 0; --j)
      lp[j] = log_add(lp[j] + lfail, lp[j - 1] + lpass);
    lp[0] += lfail;
  }
  return lp;
}

/// Every factor must pass: an adversary has to fool all checks, a legitimate
/// user is rejected if any check fails.
inline CompositeRates compose_all(std::span<const FactorRates> factors) {
  detail::check_rates(factors, "compose_all");
  const double far = detail::product_of(factors, [](const auto &f) { return f.far; });
  const double frr = detail::at_least_one(factors, [](const auto &f) { return f.frr; });
  return detail::finish(far, frr, detail::all_positive(factors, &FactorRates::far), false);
}

/// Any single factor suffices.
inline CompositeRates compose_any(std::span<const FactorRates> factors) {
  detail::check_rates(factors, "compose_any");
  const double far = detail::at_least_one(factors, [](const auto &f) { return f.far; });
  const double frr = detail::product_of(factors, [](const auto &f) { return f.frr; });
  return detail::finish(far, frr, false, detail::all_positive(factors, &FactorRates::frr));
}

/// At least k of n factors must pass.
///
/// far = P(pass count >= k | adversary), frr = P(pass count < k | legitimate).
/// Tails consisting of a single extreme count (all pass / none pass) and
/// their complements use the closed forms above; every other tail is summed
/// from the Poisson-binomial distribution with compensation.
inline CompositeRates compose_kofn(std::span<const FactorRates> factors, int k) {
  detail::check_rates(factors, "compose_kofn");
  const int n = static_cast<int>(factors.size());
  if (k < 1 || k > n)
    throw ConfigError("compose_kofn: k=" + std::to_string(k) + " outside [1, " +
                      std::to_string(n) + "]");

  auto pass_of = [](Population pop) {
    return [pop](const FactorRates &f) { return detail::pass_fail(f, pop).first; };
  };
  auto fail_of = [](Population pop) {
    return [pop](const FactorRates &f) { return detail::pass_fail(f, pop).second; };
  };
  auto tail_sum = [&](Population pop, int lo, int hi) {
    const auto d = pass_count_distribution(factors, pop);
    CompensatedSum s;
    for (int j = lo; j < hi; ++j)
      s.add(d.probs[static_cast<std::size_t>(j)]);
    return s.value();
  };

  // P(count >= k | adversary)
  double far = 0.0;
  if (k == n)
    far = detail::product_of(factors, pass_of(Population::Adversary));
  else if (k == 1)
    far = detail::at_least_one(factors, pass_of(Population::Adversary));
  else
    far = tail_sum(Population::Adversary, k, n + 1);

  // P(count < k | legitimate)
  double frr = 0.0;
  if (k == 1)
    frr = detail::product_of(factors, fail_of(Population::Legitimate));
  else if (k == n)
    frr = detail::at_least_one(factors, fail_of(Population::Legitimate));
  else
    frr = tail_sum(Population::Legitimate, 0, k);

  // Distinguish a true zero from an underflowed product via log space.
  bool far_nonzero = false;
  bool frr_nonzero = false;
  if (far < kUnderflowFloor) {
    const auto la = log_pass_count_distribution(factors, Population::Adversary);
    far_nonzero = std::any_of(la.begin() + k, la.end(),
                              [](double x) { return std::isfinite(x); });
  }
  if (frr < kUnderflowFloor) {
    const auto ll = log_pass_count_distribution(factors, Population::Legitimate);
    frr_nonzero = std::any_of(ll.begin(), ll.begin() + k,
                              [](double x) { return std::isfinite(x); });
  }
  return detail::finish(far, frr, far_nonzero, frr_nonzero);
}

/// log10 of the k-of-n tails, computed entirely in log space.
struct LogRates {
  double log10_far = 0.0;
  double log10_frr = 0.0;
};

inline LogRates log_compose_kofn(std::span<const FactorRates> factors, int k) {
  const int n = static_cast<int>(factors.size());
  if (k < 1 || k > n)
    throw ConfigError("log_compose_kofn: k outside [1, n]");
  const auto la = log_pass_count_distribution(factors, Population::Adversary);
  const auto ll = log_pass_count_distribution(factors, Population::Legitimate);
  double far = -std::numeric_limits<double>::infinity();
  double frr = -std::numeric_limits<double>::infinity();
  for (int j = k; j <= n; ++j)
    far = log_add(far, la[static_cast<std::size_t>(j)]);
  for (int j = 0; j < k; ++j)
    frr = log_add(frr, ll[static_cast<std::size_t>(j)]);
  return {far / std::log(10.0), frr / std::log(10.0)};
}

// ---------------------------------------------------------------------------
// Weighted threshold

/// A factor as seen by the weighted rule: rates plus mu, tau and phi.
struct WeightedFactor {
  double far = 0.0;
  double frr = 0.0;
  double mu = 1.0;
  double tau = 1.0;
  double phi = 1.0;

  double product() const noexcept { return mu * tau * phi; }
};

inline constexpr int kMaxExactWeightedFactors = 25;

/// Exact composite rates of "sum(delta_i mu_i tau_i phi_i) > T" by enumerating
/// all 2^n decision vectors. n is capped at kMaxExactWeightedFactors; larger
/// systems go through weighted_monte_carlo().
inline CompositeRates compose_weighted(std::span<const WeightedFactor> factors,
                                       double threshold) {
  const int n = static_cast<int>(factors.size());
  if (n == 0)
    throw EvaluationError("compose_weighted: empty factor list");
  if (n > kMaxExactWeightedFactors)
    throw CapacityError("compose_weighted: " + std::to_string(n) +
                        " factors exceed the exact limit of " +
                        std::to_string(kMaxExactWeightedFactors) +
                        "; use the Monte Carlo mode");
  for (const auto &f : factors)
    if (!(f.far >= 0.0 && f.far <= 1.0 && f.frr >= 0.0 && f.frr <= 1.0))
      throw ConfigError("compose_weighted: factor rates must lie in [0,1]");

  std::vector<double> products(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i)
    products[i] = factors[i].product();

  CompensatedSum far;
  CompensatedSum frr;
  bool far_nonzero = false;
  bool frr_nonzero = false;
  // Depth-first over decision vectors; the score is accumulated in index
  // order exactly as decide() does for records in catalog order.
  auto visit = [&](auto &&self, int i, double score, double p_adv, double p_legit) -> void {
    if (i == n) {
      if (score > threshold) {
        far.add(p_adv);
        far_nonzero = far_nonzero || p_adv > 0.0;
      } else {
        frr.add(p_legit);
        frr_nonzero = frr_nonzero || p_legit > 0.0;
      }
      return;
    }
    const auto &f = factors[static_cast<std::size_t>(i)];
    self(self, i + 1, score + 0.0, p_adv * (1.0 - f.far), p_legit * f.frr);
    self(self, i + 1, score + products[static_cast<std::size_t>(i)], p_adv * f.far,
         p_legit * (1.0 - f.frr));
  };
  visit(visit, 0, 0.0, 1.0, 1.0);
  return detail::finish(far.value(), frr.value(), far_nonzero, frr_nonzero);
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

/// Binomial proportion estimate with a 99% confidence half-width. The
/// variance is floored at that of a single observed event; with no events
/// (or all events) the half-width is the one-sided 99% bound -ln(0.01)/N.
struct ProportionEstimate {
  std::uint64_t events = 0;
  std::uint64_t trials = 0;
  double value = 0.0;
  double half_width = 0.0;
  bool one_sided = false;

  double standard_error() const {
    if (trials == 0)
      return 0.0;
    return std::sqrt(value * (1.0 - value) / static_cast<double>(trials));
  }
};

inline ProportionEstimate estimate_proportion(std::uint64_t events, std::uint64_t trials) {
  ProportionEstimate e;
  e.events = events;
  e.trials = trials;
  if (trials == 0)
    return e;
  const double n = static_cast<double>(trials);
  e.value = static_cast<double>(events) / n;
  if (events == 0 || events == trials) {
    e.one_sided = true;
    e.half_width = -std::log(0.01) / n;
    return e;
  }
  const double floor_p = 1.0 / n;
  const double var = std::max(e.value * (1.0 - e.value), floor_p * (1.0 - floor_p));
  e.half_width = kZ99 * std::sqrt(var / n);
  return e;
}

struct RateEstimate {
  ProportionEstimate far;
  ProportionEstimate frr;
  std::uint64_t seed = 0;
  bool operator==(const RateEstimate &o) const {
    return far.events == o.far.events && frr.events == o.frr.events &&
           far.trials == o.far.trials && frr.trials == o.frr.trials &&
           far.value == o.far.value && frr.value == o.frr.value &&
           far.half_width == o.far.half_width && frr.half_width == o.frr.half_width;
  }
};

namespace detail {

inline bool rule_grants(const Strategy &s, std::span<const double> products,
                        std::span<const std::uint8_t> delta) {
  int passed = 0;
  double score = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    passed += delta[i];
    if (delta[i])
      score += products[i];
  }
  const int n = static_cast<int>(delta.size());
  switch (s.kind) {
  case StrategyKind::All: return passed == n;
  case StrategyKind::Any: return passed >= 1;
  case StrategyKind::KofN: return passed >= s.k;
  case StrategyKind::WeightedThreshold: return score > s.threshold;
  }
  return false;
}

} // namespace detail

/// Simulate \p trials adversary attempts and \p trials legitimate attempts
/// against \p strategy. Deterministic for a given seed regardless of
/// \p threads (0 = hardware concurrency).
inline RateEstimate monte_carlo_rates(std::span<const WeightedFactor> factors,
                                      const Strategy &strategy, std::uint64_t trials,
                                      std::uint64_t seed, unsigned threads = 1) {
  if (factors.empty())
    throw EvaluationError("monte_carlo_rates: empty factor list");
  if (trials < 1)
    throw ConfigError("monte_carlo_rates: trials must be >= 1");
  const int n = static_cast<int>(factors.size());
  if (strategy.kind == StrategyKind::KofN && (strategy.k < 1 || strategy.k > n))
    throw ConfigError("monte_carlo_rates: k outside [1, n]");

  std::vector<double> products(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i)
    products[i] = factors[i].product();

  struct Counts {
    std::uint64_t accepted_adversaries = 0;
    std::uint64_t rejected_legitimate = 0;
  };
  const std::uint64_t shards = shard_count(trials);
  const auto per_shard = run_shards<Counts>(shards, threads, [&](std::uint64_t shard) {
    const std::uint64_t begin = shard * kShardTrials;
    const std::uint64_t count = std::min(kShardTrials, trials - begin);
    Rng adv(derive_seed(seed, 1, shard));
    Rng legit(derive_seed(seed, 2, shard));
    std::vector<std::uint8_t> delta(factors.size());
    Counts c;
    for (std::uint64_t t = 0; t < count; ++t) {
      for (std::size_t i = 0; i < factors.size(); ++i)
        delta[i] = adv.uniform() < factors[i].far;
      c.accepted_adversaries += detail::rule_grants(strategy, products, delta);
      for (std::size_t i = 0; i < factors.size(); ++i)
        delta[i] = legit.uniform() >= factors[i].frr;
      c.rejected_legitimate += !detail::rule_grants(strategy, products, delta);
    }
    return c;
  });

  Counts total;
  for (const auto &c : per_shard) {
    total.accepted_adversaries += c.accepted_adversaries;
    total.rejected_legitimate += c.rejected_legitimate;
  }
  RateEstimate r;
  r.seed = seed;
  r.far = estimate_proportion(total.accepted_adversaries, trials);
  r.frr = estimate_proportion(total.rejected_legitimate, trials);
  return r;
}

inline RateEstimate monte_carlo_rates(std::span<const FactorRates> factors,
                                      const Strategy &strategy, std::uint64_t trials,
                                      std::uint64_t seed, unsigned threads = 1) {
  std::vector<WeightedFactor> wf;
  wf.reserve(factors.size());
  for (const auto &f : factors)
    wf.push_back({f.far, f.frr, 1.0, 1.0, 1.0});
  return monte_carlo_rates(wf, strategy, trials, seed, threads);
}

/// Monte Carlo mode of compose_weighted, for any n.
inline RateEstimate weighted_monte_carlo(std::span<const WeightedFactor> factors,
                                         double threshold, std::uint64_t trials,
                                         std::uint64_t seed, unsigned threads = 1) {
  return monte_carlo_rates(factors, Strategy::weighted(threshold), trials, seed, threads);
}

// ---------------------------------------------------------------------------
// Sweep

enum class SweepStrategy : std::uint8_t { All, Any, Balanced };

inline std::string_view to_string(SweepStrategy s) {
  switch (s) {
  case SweepStrategy::All: return "All";
  case SweepStrategy::Any: return "Any";
  case SweepStrategy::Balanced: return "Balanced";
  }
  return "?";
}

/// k for the Balanced rows: strict majority, or a fixed k (rows with n < k
/// are omitted).
struct KRule {
  std::optional<int> fixed_k;
  static KRule majority() { return {}; }
  static KRule fixed(int k) { return {k}; }
};

struct SweepRow {
  int n = 0;
  SweepStrategy strategy = SweepStrategy::All;
  int k = 0;
  CompositeRates rates;
  LogRates log_rates;
};

/// Composite rates for every n in [n_min, n_max] and every strategy, using
/// the first n factors of \p pool. Rows are ordered by n, then strategy in
/// All, Any, Balanced order.
inline std::vector<SweepRow> sweep(std::span<const FactorRates> pool,
                                   std::span<const SweepStrategy> strategies, int n_min,
                                   int n_max, KRule k_rule = KRule::majority()) {
  if (n_min < 1 || n_max < n_min)
    throw ConfigError("sweep: n range must satisfy 1 <= n_min <= n_max");
  if (static_cast<std::size_t>(n_max) > pool.size())
    throw ConfigError("sweep: n_max exceeds the number of available factors");
  if (k_rule.fixed_k && *k_rule.fixed_k < 1)
    throw ConfigError("sweep: fixed k must be >= 1");
  detail::check_rates(pool.first(static_cast<std::size_t>(n_max)), "sweep");

  std::vector<SweepStrategy> order(strategies.begin(), strategies.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  std::vector<SweepRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    const auto factors = pool.first(static_cast<std::size_t>(n));
    for (SweepStrategy s : order) {
      SweepRow row;
      row.n = n;
      row.strategy = s;
      switch (s) {
      case SweepStrategy::All:
        row.k = n;
        row.rates = compose_all(factors);
        break;
      case SweepStrategy::Any:
        row.k = 1;
        row.rates = compose_any(factors);
        break;
      case SweepStrategy::Balanced:
        row.k = k_rule.fixed_k ? *k_rule.fixed_k : majority(n);
        if (row.k > n)
          continue;
        row.rates = compose_kofn(factors, row.k);
        break;
      }
      row.log_rates = log_compose_kofn(factors, row.k);
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::vector<SweepRow> sweep_homogeneous(FactorRates rates,
                                               std::span<const SweepStrategy> strategies,
                                               int n_min, int n_max,
                                               KRule k_rule = KRule::majority()) {
  if (n_max < 1)
    throw ConfigError("sweep: n range must satisfy 1 <= n_min <= n_max");
  const std::vector<FactorRates> pool(static_cast<std::size_t>(n_max), rates);
  return sweep(pool, strategies, n_min, n_max, k_rule);
}

inline constexpr const char *kSweepCsvHeader = "n,strategy,k,far,frr,log10_far,log10_frr";

inline void write_sweep_csv(std::ostream &os, std::span<const SweepRow> rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto &r : rows) {
    os << r.n << ',' << to_string(r.strategy) << ',' << r.k << ',' << format_g17(r.rates.far)
       << ',' << format_g17(r.rates.frr) << ',' << format_g17(r.log_rates.log10_far) << ','
       << format_g17(r.log_rates.log10_frr) << '\n';
  }
}

} // namespace mfa

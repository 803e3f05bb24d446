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

// Hand-rolled generators and property checks for the decision function,
// shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mfa/factor_catalog.hpp"
#include "mfa/fusion.hpp"

namespace proptest {

struct Case {
  mfa::Catalog catalog;
  mfa::Policy policy;
  std::vector<mfa::EvidenceRecord> records;
};

struct Outcome {
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  void fail(const std::string &why) {
    if (failures++ == 0)
      first_failure = why;
  }
};

inline Case three_factor_example() {
  auto fs = mfa::default_catalog().factors();
  std::vector<mfa::Factor> picked;
  const std::vector<std::pair<std::string, double>> mu{
      {"facial", 0.9}, {"voice", 0.8}, {"fingerprint", 0.95}};
  for (const auto &[id, m] : mu)
    for (auto f : fs)
      if (f.id == id) {
        f.vendor_accuracy = m;
        picked.push_back(f);
      }
  Case c{mfa::Catalog(picked), {}, {}};
  c.policy.strategy = mfa::Strategy::weighted(1.0);
  c.policy.weights = {{"facial", 1.0}, {"voice", 1.0}, {"fingerprint", 0.5}};
  c.records = {{"facial", true, std::nullopt, 1.0, 0.0},
               {"voice", false, std::nullopt, 0.5, 0.0},
               {"fingerprint", true, std::nullopt, 1.0, 0.0}};
  return c;
}

/// One record per factor in the first n catalog entries; bit i = decision i.
inline std::vector<mfa::EvidenceRecord> records_for_mask(const mfa::Catalog &c, int n,
                                                         std::uint32_t mask) {
  std::vector<mfa::EvidenceRecord> out;
  for (int i = 0; i < n; ++i)
    out.push_back({c.factors()[static_cast<std::size_t>(i)].id, ((mask >> i) & 1u) != 0,
                   std::nullopt, 1.0, 0.0});
  return out;
}

/// Random catalog subset with random mu, random evidence and a random
/// policy. With weighted_only, the strategy is always WeightedThreshold.
inline Case random_case(std::mt19937_64 &rng, const mfa::Catalog &base,
                        bool weighted_only = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto fs = base.factors();
  std::shuffle(fs.begin(), fs.end(), rng);
  const std::size_t n = 1 + rng() % std::min<std::size_t>(fs.size(), 10);
  fs.resize(n);
  for (auto &f : fs)
    f.vendor_accuracy = 0.5 + 0.5 * unit(rng);

  Case c{mfa::Catalog(fs), {}, {}};
  double total = 0.0;
  for (const auto &f : fs) {
    const double phi = rng() % 8 == 0 ? 0.0 : 2.0 * unit(rng);
    c.policy.weights[f.id] = phi;
    total += phi;
    mfa::EvidenceRecord r{f.id, rng() % 2 == 0, std::nullopt, unit(rng), 0.0};
    if (rng() % 3 == 0)
      r.likelihood = unit(rng);
    c.records.push_back(r);
  }
  c.policy.use_likelihood = rng() % 2 == 0;
  const int kind = weighted_only ? 3 : static_cast<int>(rng() % 4);
  switch (kind) {
  case 0: c.policy.strategy = mfa::Strategy::all(); break;
  case 1: c.policy.strategy = mfa::Strategy::any(); break;
  case 2: c.policy.strategy = mfa::Strategy::kofn(1 + static_cast<int>(rng() % n)); break;
  default: c.policy.strategy = mfa::Strategy::weighted(total * unit(rng)); break;
  }
  return c;
}

inline std::string describe(const Case &c) {
  std::ostringstream os;
  os << "strategy=" << mfa::to_string(c.policy.strategy.kind) << " k=" << c.policy.strategy.k
     << " T=" << c.policy.strategy.threshold << " n=" << c.records.size();
  return os.str();
}

/// granted is unchanged when every phi and T are multiplied by the same
/// positive constant. Powers of two scale every partial sum exactly; other
/// constants are checked away from the rounding band around T.
inline Outcome check_scaling(std::mt19937_64 &rng, int cases) {
  const auto base = mfa::default_catalog();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Outcome out;
  for (int i = 0; i < cases; ++i) {
    const Case c = random_case(rng, base, true);
    const auto before = mfa::decide(c.records, c.policy, c.catalog);
    const bool pow2 = i % 2 == 0;
    const double scale = pow2 ? std::ldexp(1.0, static_cast<int>(rng() % 41) - 20)
                              : std::exp(10.0 * unit(rng) - 5.0);
    Case s = c;
    for (auto &[id, w] : s.policy.weights)
      w *= scale;
    s.policy.strategy.threshold *= scale;
    const auto after = mfa::decide(s.records, s.policy, s.catalog);
    ++out.cases;
    const double gap = std::abs(*before.score - c.policy.strategy.threshold);
    if (!pow2 && gap <= 1e-12 * std::max(1.0, c.policy.strategy.threshold))
      continue;
    if (before.granted != after.granted)
      out.fail(describe(c) + " scale=" + std::to_string(scale));
  }
  return out;
}

/// Flipping one decision from 0 to 1 never turns a grant into a deny.
inline Outcome check_monotonicity(std::mt19937_64 &rng, int cases) {
  const auto base = mfa::default_catalog();
  Outcome out;
  for (int i = 0; i < cases; ++i) {
    Case c = random_case(rng, base);
    std::vector<std::size_t> zeros;
    for (std::size_t j = 0; j < c.records.size(); ++j)
      if (!c.records[j].decision)
        zeros.push_back(j);
    if (zeros.empty())
      c.records[0].decision = false, zeros.push_back(0);
    const auto before = mfa::decide(c.records, c.policy, c.catalog);
    c.records[zeros[rng() % zeros.size()]].decision = true;
    const auto after = mfa::decide(c.records, c.policy, c.catalog);
    ++out.cases;
    if (before.granted && !after.granted)
      out.fail(describe(c));
  }
  return out;
}

/// score == T denies; T just below score grants. The tie is built two ways:
/// from decide's own score, and from dyadic weights whose sum is exact.
inline Outcome check_ties(std::mt19937_64 &rng, int cases) {
  const auto base = mfa::default_catalog();
  Outcome out;
  for (int i = 0; i < cases; ++i) {
    Case c = random_case(rng, base, true);
    if (i % 2 == 1) {
      c.policy.use_likelihood = false;
      std::vector<mfa::Factor> fs = c.catalog.factors();
      for (auto &f : fs)
        f.vendor_accuracy = 1.0;
      c.catalog = mfa::Catalog(fs);
      double exact = 0.0;
      for (auto &r : c.records) {
        r.trust = 1.0;
        const double phi = static_cast<double>(1 + rng() % 16) / 8.0;
        c.policy.weights[r.factor_id] = phi;
        if (r.decision)
          exact += phi;
      }
      c.policy.strategy.threshold = exact;
    } else {
      c.policy.strategy.threshold = 0.0;
      c.policy.strategy.threshold = *mfa::decide(c.records, c.policy, c.catalog).score;
    }
    ++out.cases;
    const auto tie = mfa::decide(c.records, c.policy, c.catalog);
    if (tie.granted || *tie.score != c.policy.strategy.threshold) {
      out.fail("tie granted: " + describe(c));
      continue;
    }
    if (*tie.score > 0.0) {
      Case below = c;
      below.policy.strategy.threshold = std::nextafter(*tie.score, 0.0);
      if (!mfa::decide(below.records, below.policy, below.catalog).granted)
        out.fail("just below the score denied: " + describe(c));
    }
  }
  return out;
}

} // namespace proptest

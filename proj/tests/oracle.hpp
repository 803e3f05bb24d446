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

// Test-only brute-force reference: enumerate every outcome vector of n
// independent factors and add up exact probability weights. Shares no code
// with the library's composition routines.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

struct Rates {
  double far;
  double frr;
};

struct Result {
  double far;
  double frr;
};

/// grants(mask) decides one outcome vector; bit i set = factor i passed.
inline Result enumerate(const std::vector<Rates> &f,
                        const std::function<bool(std::uint32_t)> &grants) {
  const std::size_t n = f.size();
  long double far = 0.0L;
  long double frr = 0.0L;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    long double p_adv = 1.0L;
    long double p_legit = 1.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pass = (mask >> i) & 1u;
      p_adv *= pass ? f[i].far : 1.0L - f[i].far;
      p_legit *= pass ? 1.0L - f[i].frr : f[i].frr;
    }
    if (grants(mask))
      far += p_adv;
    else
      frr += p_legit;
  }
  return {static_cast<double>(far), static_cast<double>(frr)};
}

inline Result kofn(const std::vector<Rates> &f, int k) {
  return enumerate(f, [k](std::uint32_t mask) { return __builtin_popcount(mask) >= k; });
}

inline Result weighted(const std::vector<Rates> &f, const std::vector<double> &products,
                       double threshold) {
  return enumerate(f, [&](std::uint32_t mask) {
    double score = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if ((mask >> i) & 1u)
        score += products[i];
    return score > threshold;
  });
}

/// Random heterogeneous rates: half uniform in (0, 0.5), half log-uniform
/// down to 1e-6.
inline std::vector<Rates> random_rates(std::mt19937_64 &rng, std::size_t n) {
  std::uniform_real_distribution<double> uni(1e-4, 0.5);
  std::uniform_real_distribution<double> expo(-6.0, -0.3);
  std::bernoulli_distribution coin(0.5);
  std::vector<Rates> out(n);
  for (auto &r : out) {
    r.far = coin(rng) ? uni(rng) : std::pow(10.0, expo(rng));
    r.frr = coin(rng) ? uni(rng) : std::pow(10.0, expo(rng));
  }
  return out;
}

inline double rel_err(double got, double want) {
  if (want == 0.0)
    return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

} // namespace oracle

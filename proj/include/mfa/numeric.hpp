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
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace mfa {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Fixed 17-significant-digit rendering used by every CSV writer.
inline std::string format_g17(double x) {
  if (std::isinf(x))
    return x < 0 ? "-inf" : "inf";
  if (std::isnan(x))
    return "nan";
  std::array<char, 64> buf{};
  const int len = std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

/// Shortest decimal text that parses back to exactly \p x.
inline std::string format_shortest(double x) {
  std::array<char, 64> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general);
  return std::string(buf.data(), res.ptr);
}

/// log10 of a probability; -inf for zero.
inline double log10_prob(double p) {
  return p > 0.0 ? std::log10(p) : -std::numeric_limits<double>::infinity();
}

/// Stable log(exp(a) + exp(b)).
inline double log_add(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity())
    return b;
  if (b == -std::numeric_limits<double>::infinity())
    return a;
  if (a < b)
    std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

} // namespace mfa

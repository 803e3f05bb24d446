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
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace mfa {

/// SplitMix64 finalizer; used to derive independent per-shard seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for shard \p shard of stream \p stream. Independent of thread count.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t shard) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ shard);
}

/// Bit-stable generator: mt19937_64 is fully specified by the standard, and the
/// uniform mapping below avoids the implementation-defined std distributions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) noexcept { return uniform() < p; }
  std::uint64_t next() noexcept { return engine_(); }

private:
  std::mt19937_64 engine_;
};

/// Trials per shard. Fixed so results do not depend on the worker count.
inline constexpr std::uint64_t kShardTrials = 1u << 16;

inline std::uint64_t shard_count(std::uint64_t trials) noexcept {
  return (trials + kShardTrials - 1) / kShardTrials;
}

inline unsigned resolve_threads(unsigned requested) noexcept {
  if (requested != 0)
    return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Run body(shard) for every shard in [0, shards) on up to \p threads workers
/// and return the per-shard results in shard order. The first exception
/// thrown by any body is rethrown.
template <typename Result, typename Body>
std::vector<Result> run_shards(std::uint64_t shards, unsigned threads, Body body) {
  std::vector<Result> results(shards);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), shards));
  if (workers <= 1) {
    for (std::uint64_t s = 0; s < shards; ++s)
      results[s] = body(s);
    return results;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t s = next++; s < shards; s = next++) {
          try {
            results[s] = body(s);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error)
              error = std::current_exception();
          }
        }
      });
    }
  }
  if (error)
    std::rethrow_exception(error);
  return results;
}

} // namespace mfa

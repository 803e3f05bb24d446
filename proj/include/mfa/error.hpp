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

#include <optional>
#include <stdexcept>
#include <string>

namespace mfa {

/// Invalid configuration: schema violations, out-of-range values, unknown ids.
/// Carries the source line (1-based) when the error came from a config file.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string &what,
                       std::optional<int> line = std::nullopt)
      : std::runtime_error(line ? "line " + std::to_string(*line) + ": " + what
                                : what),
        line_(line) {}

  std::optional<int> line() const noexcept { return line_; }

private:
  std::optional<int> line_;
};

/// A decision could not be evaluated (e.g. no evidence). Never means "deny".
class EvaluationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every factor was gated out by context. Distinct from a deny.
class NoUsableFactorsError : public EvaluationError {
  using EvaluationError::EvaluationError;
};

/// Exact computation requested beyond its supported size.
class CapacityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace mfa

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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "mfa/config_io.hpp"
#include "mfa/error.hpp"

namespace mfa {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Incremental SHA-256, hex encoded.
class Sha256 {
public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("sha256: initialisation failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256 &) = delete;
  Sha256 &operator=(const Sha256 &) = delete;

  void update(std::string_view bytes) {
    if (EVP_DigestUpdate(ctx_, bytes.data(), bytes.size()) != 1)
      throw std::runtime_error("sha256: update failed");
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, md.data(), &len) != 1)
      throw std::runtime_error("sha256: finalisation failed");
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 0xF];
    }
    return out;
  }

  static std::string of(std::string_view bytes) {
    Sha256 h;
    h.update(bytes);
    return h.hex();
  }

private:
  EVP_MD_CTX *ctx_;
};

/// Provenance record written next to every output file.
///
/// The digest is SHA-256 over the outputs' bytes concatenated in listed
/// order; each output also carries its own hash. Paths are stored relative
/// to the manifest's directory.
struct RunManifest {
  struct Output {
    std::string path;
    std::string sha256;
  };

  std::string command;
  std::vector<std::string> config_paths;
  std::optional<std::uint64_t> seed;
  std::string tool_version = std::string(kToolVersion);
  std::vector<Output> outputs;
  std::string digest;

  /// Hash the listed files (relative to \p dir) and fill outputs/digest.
  void seal(const std::filesystem::path &dir, const std::vector<std::string> &files) {
    outputs.clear();
    Sha256 all;
    for (const auto &f : files) {
      const std::string bytes = read_text_file(dir / f);
      outputs.push_back({f, Sha256::of(bytes)});
      all.update(bytes);
    }
    digest = all.hex();
  }

  /// Recompute the digest from the files on disk.
  bool verify(const std::filesystem::path &dir) const {
    Sha256 all;
    for (const auto &o : outputs) {
      const std::string bytes = read_text_file(dir / o.path);
      if (Sha256::of(bytes) != o.sha256)
        return false;
      all.update(bytes);
    }
    return all.hex() == digest;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config_paths"] = config_paths;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    j["tool_version"] = tool_version;
    auto outs = nlohmann::ordered_json::array();
    for (const auto &o : outputs)
      outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    j["outputs"] = outs;
    j["digest"] = digest;
    return j;
  }

  static RunManifest from_json(const nlohmann::json &j) {
    RunManifest m;
    try {
      m.command = j.at("command").get<std::string>();
      m.config_paths = j.at("config_paths").get<std::vector<std::string>>();
      if (!j.at("seed").is_null())
        m.seed = j.at("seed").get<std::uint64_t>();
      m.tool_version = j.at("tool_version").get<std::string>();
      for (const auto &o : j.at("outputs"))
        m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
      m.digest = j.at("digest").get<std::string>();
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError(std::string("manifest: ") + e.what());
    }
    return m;
  }

  void write(const std::filesystem::path &file) const {
    write_text_file(file, to_json().dump(2) + "\n");
  }

  static RunManifest read(const std::filesystem::path &file) {
    const std::string text = read_text_file(file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
      throw ConfigError(file.string() + ": " + e.what());
    }
    return from_json(j);
  }
};

} // namespace mfa

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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "mfa/error.hpp"
#include "mfa/factor_catalog.hpp"
#include "mfa/fusion.hpp"
#include "mfa/numeric.hpp"
#include "mfa/simulator.hpp"
#include "mfa/trust_context.hpp"

namespace mfa {

inline constexpr int kSchemaVersion = 1;

namespace yaml {

inline int line_of(const YAML::Node &n) {
  const auto m = n.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}

[[noreturn]] inline void fail(const YAML::Node &at, const std::string &path,
                              const std::string &what) {
  const int line = line_of(at);
  throw ConfigError(path + ": " + what, line > 0 ? std::optional<int>(line) : std::nullopt);
}

inline YAML::Node parse_document(std::string_view text, const char *what) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException &e) {
    throw ConfigError(std::string(what) + ": " + e.msg, e.mark.line + 1);
  }
  if (!root || root.IsNull())
    throw ConfigError(std::string(what) + ": empty document");
  if (!root.IsMap())
    throw ConfigError(std::string(what) + ": top level must be a mapping", line_of(root));
  return root;
}

inline void only_keys(const YAML::Node &map, const std::string &path,
                      std::initializer_list<std::string_view> allowed) {
  if (!map.IsMap())
    fail(map, path, "expected a mapping");
  for (const auto &kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(kv.first, path.empty() ? key : path + "." + key, "unknown field");
  }
}

inline std::string join(const std::string &path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline YAML::Node require(const YAML::Node &map, const std::string &path,
                          std::string_view key) {
  const YAML::Node n = map[std::string(key)];
  if (!n)
    fail(map, join(path, key), "required field is missing");
  return n;
}

inline std::string as_string(const YAML::Node &n, const std::string &path) {
  if (!n.IsScalar())
    fail(n, path, "expected a scalar");
  return n.as<std::string>();
}

inline double as_double(const YAML::Node &n, const std::string &path) {
  if (!n.IsScalar())
    fail(n, path, "expected a number");
  const std::string s = n.Scalar();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
      throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    fail(n, path, "expected a number, got '" + s + "'");
  }
}

inline long long as_int(const YAML::Node &n, const std::string &path) {
  if (!n.IsScalar())
    fail(n, path, "expected an integer");
  const std::string s = n.Scalar();
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size())
      throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    fail(n, path, "expected an integer, got '" + s + "'");
  }
}

inline bool as_bool(const YAML::Node &n, const std::string &path) {
  const std::string s = as_string(n, path);
  if (s == "true" || s == "yes")
    return true;
  if (s == "false" || s == "no")
    return false;
  fail(n, path, "expected true or false, got '" + s + "'");
}

inline std::vector<std::string> as_string_list(const YAML::Node &n, const std::string &path) {
  if (!n.IsSequence())
    fail(n, path, "expected a list");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n.size(); ++i)
    out.push_back(as_string(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

/// A number constrained to [lo, hi]; names the field on failure.
inline double as_ranged(const YAML::Node &n, const std::string &path, double lo, double hi) {
  const double v = as_double(n, path);
  if (!(v >= lo && v <= hi))
    fail(n, path,
         "value " + format_shortest(v) + " outside [" + format_shortest(lo) + ", " +
             format_shortest(hi) + "]");
  return v;
}

inline void check_version(const YAML::Node &root, const char *what) {
  const YAML::Node v = require(root, "", "schema_version");
  if (as_int(v, "schema_version") != kSchemaVersion)
    fail(v, "schema_version",
         std::string(what) + " schema version " + std::to_string(kSchemaVersion) +
             " is the only one supported");
}

template <typename T, typename Parse>
T as_enum(const YAML::Node &n, const std::string &path, Parse parse, const char *expected) {
  const std::string s = as_string(n, path);
  const auto v = parse(s);
  if (!v)
    fail(n, path, "'" + s + "' is not one of " + expected);
  return *v;
}

/// Scalar emitted verbatim; floats are written in shortest round-trip form.
inline std::string num(double x) { return format_shortest(x); }

} // namespace yaml

// ---------------------------------------------------------------------------
// Catalog

inline Factor parse_factor(const YAML::Node &n, const std::string &path) {
  using namespace yaml;
  only_keys(n, path,
            {"id", "name", "category", "action", "duration", "far", "frr", "vendor_accuracy",
             "capabilities", "modalities", "phases"});
  Factor f;
  f.id = as_string(require(n, path, "id"), path + ".id");
  if (f.id.empty())
    fail(n, path + ".id", "must be non-empty");
  f.name = as_string(require(n, path, "name"), path + ".name");

  const auto cat = require(n, path, "category");
  for (const auto &c : as_string_list(cat, path + ".category")) {
    const auto v = parse_category(c);
    if (!v)
      fail(cat, path + ".category",
           "'" + c + "' is not one of Knowledge, Ownership, Biometric, Behavior");
    f.category.insert(*v);
  }
  if (f.category.empty())
    fail(cat, path + ".category", "must contain at least one category");

  f.action = as_enum<ActionMode>(require(n, path, "action"), path + ".action", parse_action,
                                 "Active, Passive, Either");

  const auto dur = require(n, path, "duration");
  const std::string dpath = path + ".duration";
  only_keys(dur, dpath, {"class", "fastest", "seconds"});
  f.duration.cls = as_enum<DurationClass>(require(dur, dpath, "class"), dpath + ".class",
                                          parse_duration_class, "Short, Medium, Long");
  f.duration.fastest = dur["fastest"]
                           ? as_enum<DurationClass>(dur["fastest"], dpath + ".fastest",
                                                    parse_duration_class,
                                                    "Short, Medium, Long")
                           : f.duration.cls;
  f.duration.seconds = as_double(require(dur, dpath, "seconds"), dpath + ".seconds");
  if (!duration_in_class(f.duration.seconds, f.duration.cls))
    fail(dur["seconds"], dpath + ".seconds",
         "value " + num(f.duration.seconds) + " outside the interval of class " +
             std::string(to_string(f.duration.cls)));
  if (static_cast<int>(f.duration.fastest) > static_cast<int>(f.duration.cls))
    fail(dur, dpath + ".fastest", "must not be slower than duration.class");

  f.far = as_ranged(require(n, path, "far"), path + ".far", 0.0, 1.0);
  f.frr = as_ranged(require(n, path, "frr"), path + ".frr", 0.0, 1.0);
  f.vendor_accuracy = n["vendor_accuracy"]
                          ? as_double(n["vendor_accuracy"], path + ".vendor_accuracy")
                          : 1.0;
  if (!(f.vendor_accuracy > 0.0 && f.vendor_accuracy <= 1.0))
    fail(n["vendor_accuracy"], path + ".vendor_accuracy",
         "value " + num(f.vendor_accuracy) + " outside (0, 1]");

  const auto caps = require(n, path, "capabilities");
  const std::string cpath = path + ".capabilities";
  only_keys(caps, cpath,
            {"non_text_input", "short_contact_time", "stringent_usability",
             "environmental_robustness", "high_security_level"});
  auto tri = [&](const char *key) {
    return as_enum<Tristate>(require(caps, cpath, key), cpath + "." + key, parse_tristate,
                             "yes, no, partial");
  };
  f.capabilities = {tri("non_text_input"), tri("short_contact_time"),
                    tri("stringent_usability"), tri("environmental_robustness"),
                    tri("high_security_level")};

  if (n["modalities"])
    f.modalities = as_string_list(n["modalities"], path + ".modalities");

  const auto phases = require(n, path, "phases");
  for (const auto &p : as_string_list(phases, path + ".phases")) {
    const auto v = parse_phase(p);
    if (!v)
      fail(phases, path + ".phases",
           "'" + p +
               "' is not one of PreAuthentication, ActiveAuthentication, "
               "ContinuousMonitoring");
    f.phases.insert(*v);
  }
  try {
    validate_factor(f);
  } catch (const ConfigError &e) {
    fail(n, path, e.what());
  }
  return f;
}

/// Parse a catalog document. Nothing is returned unless the whole document
/// is valid.
inline Catalog load_catalog(std::string_view text) {
  using namespace yaml;
  const YAML::Node root = parse_document(text, "catalog");
  only_keys(root, "", {"schema_version", "factors"});
  check_version(root, "catalog");
  const YAML::Node list = require(root, "", "factors");
  if (!list.IsSequence())
    fail(list, "factors", "expected a list");
  std::vector<Factor> factors;
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "factors[" + std::to_string(i) + "]";
    Factor f = parse_factor(list[i], path);
    if (!seen.emplace(f.id, line_of(list[i])).second)
      fail(list[i], path + ".id", "duplicate factor id '" + f.id + "'");
    factors.push_back(std::move(f));
  }
  return Catalog(std::move(factors));
}

inline std::string serialize_catalog(const Catalog &catalog) {
  YAML::Emitter out;
  out << YAML::BeginMap << YAML::Key << "schema_version" << YAML::Value << kSchemaVersion;
  out << YAML::Key << "factors" << YAML::Value << YAML::BeginSeq;
  for (const Factor &f : catalog) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << f.id;
    out << YAML::Key << "name" << YAML::Value << f.name;
    out << YAML::Key << "category" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Category c : kAllCategories)
      if (f.category.contains(c))
        out << std::string(to_string(c));
    out << YAML::EndSeq;
    out << YAML::Key << "action" << YAML::Value << std::string(to_string(f.action));
    out << YAML::Key << "duration" << YAML::Value << YAML::Flow << YAML::BeginMap
        << YAML::Key << "class" << YAML::Value << std::string(to_string(f.duration.cls))
        << YAML::Key << "fastest" << YAML::Value
        << std::string(to_string(f.duration.fastest)) << YAML::Key << "seconds"
        << YAML::Value << yaml::num(f.duration.seconds) << YAML::EndMap;
    out << YAML::Key << "far" << YAML::Value << yaml::num(f.far);
    out << YAML::Key << "frr" << YAML::Value << yaml::num(f.frr);
    out << YAML::Key << "vendor_accuracy" << YAML::Value << yaml::num(f.vendor_accuracy);
    out << YAML::Key << "capabilities" << YAML::Value << YAML::BeginMap;
    for (Capability c : kAllCapabilities)
      out << YAML::Key << std::string(to_string(c)) << YAML::Value
          << std::string(to_string(f.capabilities.get(c)));
    out << YAML::EndMap;
    out << YAML::Key << "modalities" << YAML::Value << YAML::Flow << f.modalities;
    out << YAML::Key << "phases" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (SessionPhase p : kAllPhases)
      if (f.phases.contains(p))
        out << std::string(to_string(p));
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Policy

/// Parse a policy mapping. "balanced" resolves to a strict-majority k over
/// the weighted factors.
inline Policy parse_policy(const YAML::Node &n, const std::string &path,
                           const Catalog &catalog) {
  using namespace yaml;
  only_keys(n, path,
            {"schema_version", "strategy", "k", "threshold", "weights", "use_likelihood",
             "correlated"});
  Policy p;
  if (n["weights"]) {
    const auto w = n["weights"];
    if (!w.IsMap())
      fail(w, join(path, "weights"), "expected a mapping of factor id to weight");
    for (const auto &kv : w) {
      const auto id = kv.first.as<std::string>();
      const std::string wpath = join(path, "weights." + id);
      if (!catalog.find(id))
        fail(kv.first, wpath, "unknown factor id '" + id + "'");
      const double v = as_double(kv.second, wpath);
      if (!(v >= 0.0) || !std::isfinite(v))
        fail(kv.second, wpath, "weight must be a finite value >= 0");
      p.weights[id] = v;
    }
  }
  if (n["correlated"] && as_bool(n["correlated"], join(path, "correlated")))
    fail(n["correlated"], join(path, "correlated"),
         "correlated factors are not supported; composition assumes independence");
  if (n["use_likelihood"])
    p.use_likelihood = as_bool(n["use_likelihood"], join(path, "use_likelihood"));

  const auto sn = require(n, path, "strategy");
  const std::string s = as_string(sn, join(path, "strategy"));
  const int n_factors = static_cast<int>(p.weights.size());
  if (s == "all") {
    p.strategy = Strategy::all();
  } else if (s == "any") {
    p.strategy = Strategy::any();
  } else if (s == "balanced") {
    p.strategy = Strategy::kofn(majority(n_factors));
  } else if (s == "kofn") {
    const auto kn = require(n, path, "k");
    const long long k = as_int(kn, join(path, "k"));
    if (k < 1 || k > n_factors)
      fail(kn, join(path, "k"),
           "value " + std::to_string(k) + " outside [1, " + std::to_string(n_factors) + "]");
    p.strategy = Strategy::kofn(static_cast<int>(k));
  } else if (s == "weighted") {
    const auto tn = require(n, path, "threshold");
    const double t = as_double(tn, join(path, "threshold"));
    if (!(t >= 0.0) || !std::isfinite(t))
      fail(tn, join(path, "threshold"), "threshold must be a finite value >= 0");
    p.strategy = Strategy::weighted(t);
  } else {
    fail(sn, join(path, "strategy"),
         "'" + s + "' is not one of all, any, balanced, kofn, weighted");
  }
  if (p.strategy.kind != StrategyKind::KofN && n["k"])
    fail(n["k"], join(path, "k"), "only valid with strategy kofn");
  if (p.strategy.kind != StrategyKind::WeightedThreshold && n["threshold"])
    fail(n["threshold"], join(path, "threshold"), "only valid with strategy weighted");
  return p;
}

inline Policy load_policy(std::string_view text, const Catalog &catalog) {
  const YAML::Node root = yaml::parse_document(text, "policy");
  yaml::check_version(root, "policy");
  return parse_policy(root, "", catalog);
}

// ---------------------------------------------------------------------------
// Evidence

inline std::vector<EvidenceRecord> load_evidence(std::string_view text,
                                                 const TrustConfig &trust = {}) {
  using namespace yaml;
  const YAML::Node root = parse_document(text, "evidence");
  only_keys(root, "", {"schema_version", "evidence"});
  check_version(root, "evidence");
  const auto list = require(root, "", "evidence");
  if (!list.IsSequence())
    fail(list, "evidence", "expected a list");
  std::vector<EvidenceRecord> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto &n = list[i];
    const std::string path = "evidence[" + std::to_string(i) + "]";
    only_keys(n, path,
              {"factor", "decision", "likelihood", "trust", "source_class", "observed_at"});
    EvidenceRecord r;
    r.factor_id = as_string(require(n, path, "factor"), path + ".factor");
    const auto dn = require(n, path, "decision");
    const long long d = as_int(dn, path + ".decision");
    if (d != 0 && d != 1)
      fail(dn, path + ".decision", "must be 0 or 1");
    r.decision = d == 1;
    if (n["likelihood"])
      r.likelihood = as_ranged(n["likelihood"], path + ".likelihood", 0.0, 1.0);
    if (n["trust"] && n["source_class"])
      fail(n, path, "give either 'trust' or 'source_class', not both");
    if (n["trust"])
      r.trust = as_ranged(n["trust"], path + ".trust", 0.0, 1.0);
    else if (n["source_class"])
      r.trust = trust.level(as_enum<SourceClass>(n["source_class"], path + ".source_class",
                                                 parse_source_class,
                                                 "Owned, Familiar, SocialFriend, Stranger"));
    if (n["observed_at"]) {
      r.observed_at = as_double(n["observed_at"], path + ".observed_at");
      if (!(r.observed_at >= 0.0))
        fail(n["observed_at"], path + ".observed_at", "must be >= 0");
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
    throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

inline void write_text_file(const std::filesystem::path &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw IoError("error while writing '" + path.string() + "'");
}

/// Prefix ConfigErrors raised while parsing \p file with its name.
template <typename Fn> auto with_file_context(const std::filesystem::path &file, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError &e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

inline Catalog load_catalog_file(const std::filesystem::path &path) {
  const std::string text = read_text_file(path);
  return with_file_context(path, [&] { return load_catalog(text); });
}

// ---------------------------------------------------------------------------
// Scenario

/// Parse a scenario document. Relative catalog/policy paths resolve against
/// \p base_dir.
inline Scenario load_scenario(std::string_view text,
                              const std::filesystem::path &base_dir = ".") {
  using namespace yaml;
  const YAML::Node root = parse_document(text, "scenario");
  only_keys(root, "",
            {"schema_version", "name", "catalog", "policy", "policy_file", "population",
             "pre_auth_seconds", "usability_budget", "session", "monitor", "context",
             "sources", "trust"});
  check_version(root, "scenario");
  Scenario sc;
  if (root["name"])
    sc.name = as_string(root["name"], "name");

  if (root["catalog"]) {
    const std::string c = as_string(root["catalog"], "catalog");
    if (c != "default") {
      sc.catalog = load_catalog_file(base_dir / c);
    }
  }

  if (root["policy"] && root["policy_file"])
    fail(root, "policy", "give either 'policy' or 'policy_file', not both");
  if (root["policy"]) {
    sc.policy = parse_policy(root["policy"], "policy", sc.catalog);
  } else if (root["policy_file"]) {
    const auto file = base_dir / as_string(root["policy_file"], "policy_file");
    const std::string ptext = read_text_file(file);
    sc.policy = with_file_context(file, [&] { return load_policy(ptext, sc.catalog); });
  } else {
    fail(root, "policy", "required field is missing (policy or policy_file)");
  }

  if (const auto pop = root["population"]) {
    only_keys(pop, "population", {"adversary_fraction", "takeover_fraction"});
    if (pop["adversary_fraction"])
      sc.population.adversary_fraction =
          as_ranged(pop["adversary_fraction"], "population.adversary_fraction", 0.0, 1.0);
    if (pop["takeover_fraction"])
      sc.population.takeover_fraction =
          as_ranged(pop["takeover_fraction"], "population.takeover_fraction", 0.0, 1.0);
  }
  if (root["pre_auth_seconds"]) {
    sc.pre_auth_seconds = as_double(root["pre_auth_seconds"], "pre_auth_seconds");
    if (!(sc.pre_auth_seconds >= 0.0))
      fail(root["pre_auth_seconds"], "pre_auth_seconds", "must be >= 0");
  }
  if (root["usability_budget"])
    sc.usability_budget = as_double(root["usability_budget"], "usability_budget");

  if (const auto s = root["session"]) {
    only_keys(s, "session", {"basic_threshold", "staleness_horizon"});
    if (s["basic_threshold"])
      sc.session.basic_threshold = as_double(s["basic_threshold"], "session.basic_threshold");
    if (s["staleness_horizon"])
      sc.session.staleness_horizon =
          as_double(s["staleness_horizon"], "session.staleness_horizon");
  }

  if (const auto m = root["monitor"]) {
    only_keys(m, "monitor",
              {"enabled", "window", "detection_accuracy", "false_alarm", "check_interval",
               "windows", "factor"});
    auto &mc = sc.session.monitor;
    if (m["enabled"])
      sc.monitoring = as_bool(m["enabled"], "monitor.enabled");
    if (m["window"])
      mc.window = as_double(m["window"], "monitor.window");
    mc.check_interval = mc.window;
    if (m["detection_accuracy"])
      mc.detection_accuracy = as_double(m["detection_accuracy"], "monitor.detection_accuracy");
    if (m["false_alarm"])
      mc.false_alarm = as_double(m["false_alarm"], "monitor.false_alarm");
    if (m["check_interval"])
      mc.check_interval = as_double(m["check_interval"], "monitor.check_interval");
    if (m["windows"])
      sc.monitor_windows = static_cast<int>(as_int(m["windows"], "monitor.windows"));
    if (m["factor"])
      sc.monitor_factor = as_string(m["factor"], "monitor.factor");
    try {
      mc.validate();
    } catch (const ConfigError &e) {
      fail(m, "monitor", e.what());
    }
  }

  if (const auto c = root["context"]) {
    only_keys(c, "context",
              {"declare", "rules", "replace_default_rules", "partial_penalty", "timeline"});
    auto &cm = sc.context_model;
    if (c["declare"]) {
      const auto d = c["declare"];
      if (!d.IsMap())
        fail(d, "context.declare", "expected a mapping of condition to nominal value");
      for (const auto &kv : d) {
        const auto name = kv.first.as<std::string>();
        const auto value = as_string(kv.second, "context.declare." + name);
        auto it = std::find_if(cm.declared.begin(), cm.declared.end(),
                               [&](const auto &e) { return e.first == name; });
        if (it == cm.declared.end())
          cm.declared.emplace_back(name, value);
        else
          it->second = value;
      }
    }
    if (c["replace_default_rules"] &&
        as_bool(c["replace_default_rules"], "context.replace_default_rules"))
      cm.rules.clear();
    if (c["rules"]) {
      const auto rules = c["rules"];
      if (!rules.IsSequence())
        fail(rules, "context.rules", "expected a list");
      for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto &rn = rules[i];
        const std::string rp = "context.rules[" + std::to_string(i) + "]";
        only_keys(rn, rp, {"when", "modalities", "factors", "requires", "effect"});
        ContextRule r;
        const auto when = require(rn, rp, "when");
        if (!when.IsMap() || when.size() != 1)
          fail(when, rp + ".when", "expected exactly one 'condition: value' pair");
        for (const auto &kv : when) {
          r.condition = kv.first.as<std::string>();
          r.value = as_string(kv.second, rp + ".when." + r.condition);
        }
        if (rn["modalities"])
          r.modalities = as_string_list(rn["modalities"], rp + ".modalities");
        if (rn["factors"])
          r.factor_ids = as_string_list(rn["factors"], rp + ".factors");
        for (const auto &id : r.factor_ids)
          if (!sc.catalog.find(id))
            fail(rn["factors"], rp + ".factors", "unknown factor id '" + id + "'");
        if (rn["requires"])
          r.requires_capability =
              as_enum<Capability>(rn["requires"], rp + ".requires", parse_capability,
                                  "a capability flag name");
        if (rn["effect"]) {
          const auto e = as_string(rn["effect"], rp + ".effect");
          if (e == "unavailable")
            r.effect = Availability::Unavailable;
          else if (e == "partial")
            r.effect = Availability::Partial;
          else
            fail(rn["effect"], rp + ".effect", "'" + e + "' is not one of unavailable, partial");
        }
        cm.rules.push_back(std::move(r));
      }
    }
    if (c["partial_penalty"])
      cm.partial_penalty = as_ranged(c["partial_penalty"], "context.partial_penalty", 0.0, 1.0);
    if (c["timeline"]) {
      const auto tl = c["timeline"];
      if (!tl.IsSequence())
        fail(tl, "context.timeline", "expected a list");
      for (std::size_t i = 0; i < tl.size(); ++i) {
        const std::string tp = "context.timeline[" + std::to_string(i) + "]";
        only_keys(tl[i], tp, {"at", "set"});
        ContextChange ch;
        ch.at = tl[i]["at"] ? as_double(tl[i]["at"], tp + ".at") : 0.0;
        const auto set = require(tl[i], tp, "set");
        if (!set.IsMap())
          fail(set, tp + ".set", "expected a mapping of condition to value");
        for (const auto &kv : set) {
          const auto name = kv.first.as<std::string>();
          ch.conditions[name] = as_string(kv.second, tp + ".set." + name);
        }
        sc.context_timeline.push_back(std::move(ch));
      }
    }
  }

  if (const auto s = root["sources"]) {
    if (!s.IsMap())
      fail(s, "sources", "expected a mapping of factor id to source class");
    for (const auto &kv : s) {
      const auto id = kv.first.as<std::string>();
      sc.sources[id] = as_enum<SourceClass>(kv.second, "sources." + id, parse_source_class,
                                            "Owned, Familiar, SocialFriend, Stranger");
    }
  }

  if (const auto t = root["trust"]) {
    only_keys(t, "trust", {"levels", "promotion_threshold"});
    if (const auto lv = t["levels"]) {
      only_keys(lv, "trust.levels", {"Owned", "Familiar", "SocialFriend", "Stranger"});
      for (SourceClass c : kAllSourceClasses) {
        const std::string key(to_string(c));
        if (lv[key])
          sc.trust.levels[static_cast<std::size_t>(c)] =
              as_ranged(lv[key], "trust.levels." + key, 0.0, 1.0);
      }
    }
    if (t["promotion_threshold"]) {
      const long long th = as_int(t["promotion_threshold"], "trust.promotion_threshold");
      if (th < 1)
        fail(t["promotion_threshold"], "trust.promotion_threshold", "must be >= 1");
      sc.trust.promotion_threshold = static_cast<std::uint64_t>(th);
    }
  }
  return sc;
}

inline Scenario load_scenario_file(const std::filesystem::path &path) {
  const std::string text = read_text_file(path);
  return with_file_context(path,
                           [&] { return load_scenario(text, path.parent_path()); });
}

} // namespace mfa

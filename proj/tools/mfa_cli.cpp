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

// mfa: command-line front end for catalog inspection, composite-rate
// sweeps, policy decisions and session simulation.
//
// Exit codes: 0 success or grant, 1 I/O failure, 2 configuration or
// validation error, 3 deny.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfa/manifest.hpp"
#include "mfa/mfa.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kIo = 1, kConfig = 2, kDeny = 3 };

mfa::Catalog catalog_from(const std::string &path) {
  return path.empty() ? mfa::default_catalog() : mfa::load_catalog_file(path);
}

/// Write \p content to \p file and a manifest next to it.
void write_with_manifest(const fs::path &file, const std::string &content,
                         mfa::RunManifest manifest) {
  mfa::write_text_file(file, content);
  const fs::path dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  manifest.seal(dir, {file.filename().string()});
  manifest.write(fs::path(file.string() + ".manifest.json"));
}

// ---------------------------------------------------------------------------

struct CatalogArgs {
  std::string catalog;
  std::string format = "summary";
  std::string out;
  std::string path;
};

int catalog_list(const CatalogArgs &a) {
  const auto catalog = catalog_from(a.catalog);
  if (a.format == "csv") {
    std::cout << "id,name,category,action,duration,far,frr,vendor_accuracy\n";
    for (const auto &f : catalog)
      std::cout << f.id << ",\"" << f.name << "\"," << mfa::table_notation(f.category) << ','
                << mfa::table_notation(f.action) << ',' << mfa::table_notation(f.duration)
                << ',' << mfa::format_g17(f.far) << ',' << mfa::format_g17(f.frr) << ','
                << mfa::format_g17(f.vendor_accuracy) << '\n';
    return kOk;
  }
  std::size_t width = 6;
  for (const auto &f : catalog)
    width = std::max(width, f.name.size());
  std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "Factor"
            << std::setw(7) << "Type" << std::setw(7) << "Action"
            << "Duration\n";
  for (const auto &f : catalog)
    std::cout << std::setw(static_cast<int>(width) + 2) << f.name << std::setw(7)
              << mfa::table_notation(f.category) << std::setw(7)
              << mfa::table_notation(f.action) << mfa::table_notation(f.duration) << '\n';
  return kOk;
}

int catalog_export(const CatalogArgs &a) {
  const auto catalog = catalog_from(a.catalog);
  const std::string text = mfa::serialize_catalog(catalog);
  if (a.out.empty()) {
    std::cout << text;
    return kOk;
  }
  mfa::RunManifest m;
  m.command = "catalog export";
  if (!a.catalog.empty())
    m.config_paths.push_back(a.catalog);
  write_with_manifest(a.out, text, m);
  return kOk;
}

int catalog_validate(const CatalogArgs &a) {
  const std::string path = a.path.empty() ? a.catalog : a.path;
  const auto catalog = catalog_from(path);
  std::cout << (path.empty() ? std::string("built-in catalog") : path) << ": ok ("
            << catalog.size() << " factors)\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  double far = 0.0003;
  double frr = 0.02;
  int n_min = 1;
  int n_max = 7;
  std::vector<std::string> strategies{"all", "any", "balanced"};
  std::string k = "majority";
  std::string catalog;
  std::string out;
};

int sweep(const SweepArgs &a) {
  std::vector<mfa::SweepStrategy> strategies;
  for (const auto &s : a.strategies) {
    if (s == "all")
      strategies.push_back(mfa::SweepStrategy::All);
    else if (s == "any")
      strategies.push_back(mfa::SweepStrategy::Any);
    else if (s == "balanced")
      strategies.push_back(mfa::SweepStrategy::Balanced);
    else
      throw mfa::ConfigError("--strategies: '" + s + "' is not one of all, any, balanced");
  }
  mfa::KRule rule = mfa::KRule::majority();
  if (a.k != "majority") {
    try {
      std::size_t used = 0;
      const int k = std::stoi(a.k, &used);
      if (used != a.k.size())
        throw std::invalid_argument(a.k);
      rule = mfa::KRule::fixed(k);
    } catch (const std::exception &) {
      throw mfa::ConfigError("--k: expected 'majority' or an integer, got '" + a.k + "'");
    }
  }
  if (!(a.far >= 0.0 && a.far <= 1.0) || !(a.frr >= 0.0 && a.frr <= 1.0))
    throw mfa::ConfigError("--far/--frr must lie in [0,1]");

  std::vector<mfa::SweepRow> rows;
  if (a.catalog.empty()) {
    rows = mfa::sweep_homogeneous({a.far, a.frr}, strategies, a.n_min, a.n_max, rule);
  } else {
    std::vector<mfa::FactorRates> pool;
    for (const auto &f : mfa::load_catalog_file(a.catalog))
      pool.push_back({f.far, f.frr});
    rows = mfa::sweep(pool, strategies, a.n_min, a.n_max, rule);
  }
  std::ostringstream csv;
  mfa::write_sweep_csv(csv, rows);
  if (a.out.empty()) {
    std::cout << csv.str();
    return kOk;
  }
  mfa::RunManifest m;
  std::ostringstream cmd;
  cmd << "sweep --n-min " << a.n_min << " --n-max " << a.n_max << " --k " << a.k;
  if (a.catalog.empty())
    cmd << " --far " << mfa::format_shortest(a.far) << " --frr " << mfa::format_shortest(a.frr);
  m.command = cmd.str();
  if (!a.catalog.empty())
    m.config_paths.push_back(a.catalog);
  write_with_manifest(a.out, csv.str(), m);
  return kOk;
}

// ---------------------------------------------------------------------------

struct DecideArgs {
  std::string catalog;
  std::string policy;
  std::string evidence;
};

int decide(const DecideArgs &a) {
  const auto catalog = catalog_from(a.catalog);
  const std::string policy_text = mfa::read_text_file(a.policy);
  const std::string evidence_text = mfa::read_text_file(a.evidence);
  const auto policy = mfa::with_file_context(
      a.policy, [&] { return mfa::load_policy(policy_text, catalog); });
  const auto records =
      mfa::with_file_context(a.evidence, [&] { return mfa::load_evidence(evidence_text); });
  mfa::Decision d;
  try {
    d = mfa::decide(records, policy, catalog);
  } catch (const mfa::EvaluationError &e) {
    throw mfa::ConfigError(e.what());
  }

  std::cout << "decision: " << (d.granted ? "granted" : "denied") << '\n';
  std::cout << "strategy: " << mfa::to_string(policy.strategy.kind);
  if (policy.strategy.kind == mfa::StrategyKind::KofN)
    std::cout << " (k=" << policy.strategy.k << ')';
  std::cout << '\n';
  if (d.score) {
    std::cout << "score: " << mfa::format_shortest(*d.score) << '\n';
    std::cout << "threshold: " << mfa::format_shortest(policy.strategy.threshold) << '\n';
  }
  std::cout << "passed: " << d.passed_count << '/' << records.size() << '\n';
  std::cout << "contributions:\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &r = records[i];
    std::cout << "  " << r.factor_id << ": ";
    if (d.score) {
      const double delta =
          (policy.use_likelihood && r.likelihood) ? *r.likelihood : (r.decision ? 1.0 : 0.0);
      std::cout << "delta=" << mfa::format_shortest(delta)
                << " mu=" << mfa::format_shortest(catalog.at(r.factor_id).vendor_accuracy)
                << " tau=" << mfa::format_shortest(r.trust)
                << " phi=" << mfa::format_shortest(policy.weights.at(r.factor_id)) << " -> ";
    }
    std::cout << mfa::format_shortest(d.contributing[i].second) << '\n';
  }
  return d.granted ? kOk : kDeny;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::uint64_t trials = 100000;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 1;
  std::string format = "summary";
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t> &seed) {
  if (seed)
    return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << '\n';
  return s;
}

int simulate(const SimulateArgs &a) {
  const auto scenario = mfa::load_scenario_file(a.scenario);
  const std::uint64_t seed = resolve_seed(a.seed);
  const auto report = mfa::run_simulation(scenario, a.trials, seed, a.threads);

  std::ostringstream summary_csv, firings_csv, latency_csv, times_csv, human;
  mfa::write_summary_csv(summary_csv, report);
  mfa::write_firings_csv(firings_csv, report);
  mfa::write_histogram_csv(latency_csv, "latency_seconds", report.revocation_latency);
  times_csv << "kind,seconds,count\n";
  auto hist = [&](const char *kind, const std::map<double, std::uint64_t> &h) {
    for (const auto &[k, v] : h)
      times_csv << kind << ',' << mfa::format_g17(k) << ',' << v << '\n';
  };
  hist("basic_grant", report.basic_grant_times);
  hist("full_grant", report.full_grant_times);
  hist("active_phase", report.active_phase_times);
  mfa::write_human_summary(human, report);

  std::cout << (a.format == "csv" ? summary_csv.str() : human.str());
  if (a.out.empty())
    return kOk;

  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw mfa::IoError("cannot create '" + dir.string() + "': " + ec.message());
  const std::vector<std::pair<std::string, std::string>> files{
      {"summary.csv", summary_csv.str()},
      {"factor_firings.csv", firings_csv.str()},
      {"revocation_latency.csv", latency_csv.str()},
      {"grant_times.csv", times_csv.str()},
      {"summary.txt", human.str()},
  };
  std::vector<std::string> names;
  for (const auto &[name, content] : files) {
    mfa::write_text_file(dir / name, content);
    names.push_back(name);
  }
  mfa::RunManifest m;
  m.command = "simulate --trials " + std::to_string(a.trials);
  m.config_paths = {a.scenario};
  m.seed = seed;
  m.seal(dir, names);
  m.write(dir / "manifest.json");
  return kOk;
}

struct GrantTimeArgs {
  std::string scenario;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
};

int time_to_grant(const GrantTimeArgs &a) {
  const auto scenario = mfa::load_scenario_file(a.scenario);
  const auto g = mfa::time_to_grant(scenario, a.trials, a.seed);
  std::cout << "sessions: " << g.sessions << '\n'
            << "basic grants: " << g.basic_grants << '\n'
            << "full grants: " << g.full_grants << '\n'
            << "median basic grant: " << mfa::format_shortest(g.median_basic) << " s\n"
            << "median full grant: " << mfa::format_shortest(g.median_full) << " s\n"
            << "median active phase: " << mfa::format_shortest(g.median_active_phase)
            << " s\n"
            << "p90 active phase: " << mfa::format_shortest(g.p90_active_phase) << " s\n"
            << "usability budget exceeded: " << (g.usability_exceeded ? "yes" : "no") << '\n'
            << "degenerate policy: " << (g.degenerate ? "yes" : "no") << '\n';
  return kOk;
}

int verify_manifest(const std::string &path) {
  const auto m = mfa::RunManifest::read(path);
  const fs::path p(path);
  const bool ok = m.verify(p.has_parent_path() ? p.parent_path() : fs::path("."));
  std::cout << path << ": " << (ok ? "digest ok" : "digest MISMATCH") << '\n';
  return ok ? kOk : kConfig;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multi-factor authentication fusion toolkit"};
  app.set_version_flag("--version", std::string(mfa::kToolVersion));
  app.require_subcommand(1);

  CatalogArgs cat;
  auto *catalog_cmd = app.add_subcommand("catalog", "Inspect, export or validate a factor catalog");
  catalog_cmd->require_subcommand(1);
  auto *list_cmd = catalog_cmd->add_subcommand("list", "Print the factors");
  list_cmd->add_option("--catalog", cat.catalog, "Catalog file (default: built-in)");
  list_cmd->add_option("--format", cat.format, "Output format")
      ->check(CLI::IsMember({"csv", "summary"}));
  auto *export_cmd = catalog_cmd->add_subcommand("export", "Write the catalog file");
  export_cmd->add_option("--catalog", cat.catalog, "Catalog file (default: built-in)");
  export_cmd->add_option("--out", cat.out, "Output file (default: stdout)");
  auto *validate_cmd = catalog_cmd->add_subcommand("validate", "Check a catalog file");
  validate_cmd->add_option("path", cat.path, "Catalog file");
  validate_cmd->add_option("--catalog", cat.catalog, "Catalog file");

  SweepArgs sw;
  auto *sweep_cmd = app.add_subcommand("sweep", "Composite FAR/FRR for n = n-min..n-max");
  sweep_cmd->add_option("--far", sw.far, "Per-factor FAR of the homogeneous factors");
  sweep_cmd->add_option("--frr", sw.frr, "Per-factor FRR of the homogeneous factors");
  sweep_cmd->add_option("--n-min", sw.n_min, "Smallest number of factors");
  sweep_cmd->add_option("--n-max", sw.n_max, "Largest number of factors");
  sweep_cmd->add_option("--strategies", sw.strategies, "Subset of all,any,balanced")
      ->delimiter(',');
  sweep_cmd->add_option("--k", sw.k, "k for Balanced rows: 'majority' or an integer");
  sweep_cmd->add_option("--catalog", sw.catalog,
                        "Use the first n factors of this catalog instead of homogeneous ones");
  sweep_cmd->add_option("--out", sw.out, "CSV output file (default: stdout)");

  DecideArgs dc;
  auto *decide_cmd = app.add_subcommand("decide", "Evaluate evidence against a policy");
  decide_cmd->add_option("--catalog", dc.catalog, "Catalog file (default: built-in)");
  decide_cmd->add_option("--policy", dc.policy, "Policy file")->required();
  decide_cmd->add_option("--evidence", dc.evidence, "Evidence file")->required();

  SimulateArgs sim;
  auto *sim_cmd = app.add_subcommand("simulate", "Run the session simulator");
  sim_cmd->add_option("--scenario", sim.scenario, "Scenario file")->required();
  sim_cmd->add_option("--trials", sim.trials, "Number of sessions");
  sim_cmd->add_option("--seed", sim.seed, "Random seed (default: random, printed)");
  sim_cmd->add_option("--out", sim.out, "Directory for report CSVs and manifest");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--format", sim.format, "Stdout format")
      ->check(CLI::IsMember({"csv", "summary"}));

  GrantTimeArgs tg;
  auto *tg_cmd = app.add_subcommand("time-to-grant", "Grant latency of legitimate users");
  tg_cmd->add_option("--scenario", tg.scenario, "Scenario file")->required();
  tg_cmd->add_option("--trials", tg.trials, "Number of sessions");
  tg_cmd->add_option("--seed", tg.seed, "Random seed");

  std::string manifest_path;
  auto *verify_cmd = app.add_subcommand("verify-manifest", "Recompute a manifest digest");
  verify_cmd->add_option("manifest", manifest_path, "Manifest file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (list_cmd->parsed())
      return catalog_list(cat);
    if (export_cmd->parsed())
      return catalog_export(cat);
    if (validate_cmd->parsed())
      return catalog_validate(cat);
    if (sweep_cmd->parsed())
      return sweep(sw);
    if (decide_cmd->parsed())
      return decide(dc);
    if (sim_cmd->parsed())
      return simulate(sim);
    if (tg_cmd->parsed())
      return time_to_grant(tg);
    if (verify_cmd->parsed())
      return verify_manifest(manifest_path);
  } catch (const mfa::IoError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const mfa::ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const mfa::EvaluationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const mfa::CapacityError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}

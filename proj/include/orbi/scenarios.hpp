#pragma once

// Scenario registry and orchestration: a scenario names a kind of catalog
// object, its parameters, an ordered check list and tolerance overrides.
//
// User scenario file:
//   {"schema_version": 1, "name": "...", "description": "...",
//    "base": <registered scenario> | "kind": <kind>,
//    "checks": [...], "params": {...}, "tolerances": {...}}
// Fields other than the name are optional and override the base.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orbi/io.hpp"

namespace orbi::scenario {

using json = io::json;

struct Config {
  std::string name;
  std::string kind;  // a2, circle, torus, groupoid-file
  std::string description;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;
  json params = json::object();
  std::string origin = "builtin";  // file the config came from
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  json metrics = json::object();
};

struct Spectrum {
  std::string label;
  std::vector<double> values;
};

struct Report {
  std::string scenario;
  std::string kind;
  json params = json::object();
  std::map<std::string, double> tolerances;
  std::vector<CheckResult> checks;
  std::vector<Spectrum> spectra;
  bool passed() const;
  int exit_status() const { return passed() ? 0 : 1; }
};

struct CheckInfo {
  std::string name;
  std::string description;
  std::vector<std::string> kinds;
};

const std::vector<CheckInfo>& registered_checks();
const std::map<std::string, double>& default_tolerances();

class Registry {
 public:
  /// The built-in scenarios.
  Registry();
  const std::vector<Config>& entries() const { return entries_; }
  bool contains(const std::string& name) const;
  /// Throws Error listing the known names.
  const Config& find(const std::string& name) const;
  /// Throws Error naming the file on parse or validation failure.
  const Config& add_file(const std::string& path);
  /// Every *.json file, in name order.
  void add_directory(const std::string& dir);

 private:
  std::vector<Config> entries_;
};

/// Resolve a scenario document against the registry; diagnostics name origin and field.
Config config_from_json(const json& doc, const Registry& reg, const std::string& origin);
Config load_config(const std::string& path, const Registry& reg);

struct RunOptions {
  std::optional<int> modes;
  std::optional<int> buffer;
  bool force = false;
};

/// Throws Error on invalid parameters or on a tolerance loosened more than 10x without force.
Report run_scenario(const Config& cfg, const RunOptions& opt = {});

std::string report_json(const Report& r);
std::string spectra_csv(const Report& r);
std::string summary_md(const Report& r);
/// Writes report.json, spectra.csv and summary.md into dir (created if missing).
void write_outputs(const Report& r, const std::string& dir);

}  // namespace orbi::scenario

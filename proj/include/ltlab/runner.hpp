#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltlab/config.hpp"
#include "ltlab/report.hpp"

namespace ltlab {

inline constexpr int kManifestVersion = 1;

/// CSV plot data emitted by an audit, written under plots/<scenario>/.
struct PlotData {
  std::string name;
  std::string csv;
};

struct ScenarioResult {
  std::string name;
  std::vector<BoundReport> reports;
  std::vector<PlotData> plots;
  std::string error;  // non-empty when the scenario aborted
  double wall_time = 0.0;

  /// No error and every conclusive report passes.
  bool pass() const;
};

struct RunManifest {
  std::string tool_version;
  std::string config_name;
  std::string config_digest;
  int schema_version = kConfigSchemaVersion;
  std::vector<ScenarioResult> scenarios;
  bool pass = true;
  double wall_time = 0.0;
};

struct RunOptions {
  unsigned jobs = 1;
};

/// Runs one scenario; failures are caught and recorded in `error`.
ScenarioResult run_scenario(const Scenario& scenario);

/// Runs every scenario, up to `jobs` at a time, keeping config order.
RunManifest run(const Config& config, const RunOptions& options = {});

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::string& path);

/// Copy of a manifest document with every wall-time field removed.
nlohmann::json strip_timing(nlohmann::json j);

std::string render_csv(const RunManifest& manifest);
std::string render_markdown(const RunManifest& manifest);

/// manifest.json, summary.csv, summary.md and plots/<scenario>/<name>.csv.
void write_outputs(const RunManifest& manifest, const std::string& dir);

}  // namespace ltlab

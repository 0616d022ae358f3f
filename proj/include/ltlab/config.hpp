#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltlab/common.hpp"
#include "ltlab/potentials.hpp"

namespace ltlab {

inline constexpr int kConfigSchemaVersion = 1;

/// Config rejected by the schema; `line` is 1-based, 0 when unknown.
class SchemaError : public InvalidArgument {
 public:
  SchemaError(const std::string& message, std::string pointer, int line);
  const std::string& pointer() const { return pointer_; }
  int line() const { return line_; }

 private:
  std::string pointer_;
  int line_;
};

/// Scalar 2D potential family: currently the Gaussian well.
struct Potential2DSpec {
  std::string family = "gaussian";
  double depth = 1.0;
  double width = 1.0;
};

/// Discretization controls for 1D spectra.
struct GridSpec {
  double max_step = 0.02;
  int levels = 2;
  double cap = 1000.0;
  double edge_threshold = 1e-8;
};

struct AuditRequest {
  std::string tag;
  nlohmann::json params = nlohmann::json::object();
};

struct Scenario {
  std::string name;
  std::optional<FamilySpec> potential;
  std::optional<Potential2DSpec> potential2d;
  GridSpec grid;
  std::vector<AuditRequest> audits;
  std::map<std::string, double> tolerances;  // per audit tag
};

struct Config {
  int schema_version = kConfigSchemaVersion;
  std::string name;
  std::vector<Scenario> scenarios;
  std::string digest;  // FNV-1a of the canonical JSON dump
};

/// Parameter names accepted by an audit tag, and whether it needs a 1D or 2D
/// potential.
struct AuditSchema {
  std::vector<std::string> params;
  bool needs_potential = false;
  bool needs_potential2d = false;
};

const std::map<std::string, AuditSchema>& audit_schemas();

/// Parse and validate. Errors name the offending field and its line.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

nlohmann::json to_json(const Config& config);

/// 1-based line of every value in a JSON document, keyed by JSON pointer.
std::map<std::string, int> json_value_lines(const std::string& text);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace ltlab

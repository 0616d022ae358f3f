#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ltlab {

enum class Side { upper, lower, identity };

std::string to_string(Side side);
Side side_from_string(const std::string& s);

/// What an audit compares. `factor` multiplies the classical constant for
/// Lieb-Thirring type bounds and is 1 otherwise; `reference` names the result
/// being audited and `topic` groups reports in summaries.
struct BoundSpec {
  double gamma = std::numeric_limits<double>::quiet_NaN();
  int d = 1;
  Side side = Side::upper;
  double factor = 1.0;
  std::string reference;
  std::string topic;
};

/// One audited inequality or identity.
///
///   upper:    pass iff lhs <= rhs + rel_tol |rhs| + budget
///   lower:    pass iff lhs >= rhs - rel_tol |rhs| - budget
///   identity: pass iff |lhs - rhs| <= rel_tol max(|lhs|, |rhs|) + budget
///
/// `tolerance` is the resulting relative slack (rel_tol + budget / |rhs|, or
/// the absolute allowance when rhs = 0); `residual` is lhs - rhs.
struct BoundReport {
  std::string tag;
  BoundSpec spec;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double residual = 0.0;
  double rel_tol = 0.0;
  double budget = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool inconclusive = false;
  std::string provenance;
  std::map<std::string, double> extras;
  std::string note;
};

/// Fill ratio, residual, tolerance and pass from lhs, rhs, rel_tol and budget.
void evaluate(BoundReport& r);

BoundReport make_report(std::string tag, BoundSpec spec, double lhs, double rhs, double rel_tol, double budget,
                        std::string provenance = {});

/// Report with no content to check (for example an empty spectrum against a
/// zero right side); always passes.
BoundReport vacuous_report(std::string tag, BoundSpec spec, std::string note);

void to_json(nlohmann::json& j, const BoundReport& r);
void from_json(const nlohmann::json& j, BoundReport& r);

/// Fixed CSV columns used by every summary.
inline constexpr const char* kReportCsvHeader = "scenario,audit_tag,paper_ref,gamma,d,lhs,rhs,ratio,tolerance,pass";

std::string csv_row(const std::string& scenario, const BoundReport& r);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

}  // namespace ltlab

#include "ltlab/report.hpp"

#include <charconv>
#include <cmath>

#include "ltlab/common.hpp"

namespace ltlab {

using nlohmann::json;

std::string to_string(Side side) {
  switch (side) {
    case Side::upper: return "upper";
    case Side::lower: return "lower";
    case Side::identity: return "identity";
  }
  return "upper";
}

Side side_from_string(const std::string& s) {
  if (s == "upper") return Side::upper;
  if (s == "lower") return Side::lower;
  if (s == "identity") return Side::identity;
  throw InvalidArgument("unknown bound side '" + s + "'");
}

void evaluate(BoundReport& r) {
  const double scale = std::abs(r.rhs);
  r.residual = r.lhs - r.rhs;
  if (r.rhs != 0.0) {
    r.ratio = r.lhs / r.rhs;
  } else {
    r.ratio = r.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  switch (r.spec.side) {
    case Side::upper: {
      const double allowance = r.rel_tol * scale + r.budget;
      r.tolerance = scale > 0.0 ? allowance / scale : allowance;
      r.pass = r.lhs <= r.rhs + allowance;
      break;
    }
    case Side::lower: {
      const double allowance = r.rel_tol * scale + r.budget;
      r.tolerance = scale > 0.0 ? allowance / scale : allowance;
      r.pass = r.lhs >= r.rhs - allowance;
      break;
    }
    case Side::identity: {
      const double allowance = r.rel_tol * std::max(std::abs(r.lhs), scale) + r.budget;
      r.tolerance = allowance;
      r.pass = std::abs(r.residual) <= allowance;
      break;
    }
  }
  if (!std::isfinite(r.lhs) || !std::isfinite(r.rhs)) r.pass = false;
}

BoundReport make_report(std::string tag, BoundSpec spec, double lhs, double rhs, double rel_tol, double budget,
                        std::string provenance) {
  BoundReport r;
  r.tag = std::move(tag);
  r.spec = std::move(spec);
  r.lhs = lhs;
  r.rhs = rhs;
  r.rel_tol = rel_tol;
  r.budget = budget;
  r.provenance = std::move(provenance);
  evaluate(r);
  return r;
}

BoundReport vacuous_report(std::string tag, BoundSpec spec, std::string note) {
  BoundReport r = make_report(std::move(tag), std::move(spec), 0.0, 0.0, 0.0, 0.0);
  r.note = std::move(note);
  return r;
}

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

void to_json(json& j, const BoundReport& r) {
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = number(v);
  j = json{{"tag", r.tag},
           {"spec",
            {{"gamma", number(r.spec.gamma)},
             {"d", r.spec.d},
             {"side", to_string(r.spec.side)},
             {"factor", r.spec.factor},
             {"reference", r.spec.reference},
             {"topic", r.spec.topic}}},
           {"lhs", number(r.lhs)},
           {"rhs", number(r.rhs)},
           {"ratio", number(r.ratio)},
           {"residual", number(r.residual)},
           {"rel_tol", r.rel_tol},
           {"budget", number(r.budget)},
           {"tolerance", number(r.tolerance)},
           {"pass", r.pass},
           {"inconclusive", r.inconclusive},
           {"provenance", r.provenance},
           {"extras", extras},
           {"note", r.note}};
}

void from_json(const json& j, BoundReport& r) {
  r = BoundReport{};
  r.tag = j.at("tag").get<std::string>();
  const json& s = j.at("spec");
  r.spec.gamma = number_from(s.at("gamma"));
  r.spec.d = s.at("d").get<int>();
  r.spec.side = side_from_string(s.at("side").get<std::string>());
  r.spec.factor = s.at("factor").get<double>();
  r.spec.reference = s.at("reference").get<std::string>();
  r.spec.topic = s.value("topic", "");
  r.lhs = number_from(j.at("lhs"));
  r.rhs = number_from(j.at("rhs"));
  r.ratio = number_from(j.at("ratio"));
  r.residual = number_from(j.at("residual"));
  r.rel_tol = j.at("rel_tol").get<double>();
  r.budget = number_from(j.at("budget"));
  r.tolerance = number_from(j.at("tolerance"));
  r.pass = j.at("pass").get<bool>();
  r.inconclusive = j.value("inconclusive", false);
  r.provenance = j.value("provenance", "");
  if (auto it = j.find("extras"); it != j.end()) {
    for (const auto& [k, v] : it->items()) r.extras[k] = number_from(v);
  }
  r.note = j.value("note", "");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string csv_row(const std::string& scenario, const BoundReport& r) {
  std::string row;
  row += csv_field(scenario) + ',' + csv_field(r.tag) + ',' + csv_field(r.spec.reference) + ',';
  row += (std::isnan(r.spec.gamma) ? std::string() : format_double(r.spec.gamma)) + ',';
  row += std::to_string(r.spec.d) + ',';
  row += format_double(r.lhs) + ',' + format_double(r.rhs) + ',' + format_double(r.ratio) + ',';
  row += format_double(r.tolerance) + ',';
  row += r.inconclusive ? "inconclusive" : (r.pass ? "true" : "false");
  return row;
}

}  // namespace ltlab

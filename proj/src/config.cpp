#include "ltlab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace ltlab {

using json = nlohmann::json;

SchemaError::SchemaError(const std::string& message, std::string pointer, int line)
    : InvalidArgument(line > 0 ? "config line " + std::to_string(line) + ": " + message : "config: " + message),
      pointer_(std::move(pointer)),
      line_(line) {}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Minimal walker over text already accepted by the JSON parser.
class LineScanner {
 public:
  explicit LineScanner(const std::string& text) : s_(text) {}

  std::map<std::string, int> run() {
    skip();
    if (i_ < s_.size()) value("");
    return std::move(lines_);
  }

 private:
  void skip() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r' || s_[i_] == '\n')) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string() {
    std::string out;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') {
        out += s_[i_ + 1];
        i_ += 2;
      } else {
        out += s_[i_++];
      }
    }
    ++i_;
    return out;
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }

  void value(const std::string& pointer) {
    lines_[pointer] = line_;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      for (;;) {
        skip();
        if (s_[i_] == '}') break;
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        const std::string key = string();
        skip();
        ++i_;  // ':'
        skip();
        value(pointer + "/" + escape(key));
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      int index = 0;
      for (;;) {
        skip();
        if (s_[i_] == ']') break;
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        value(pointer + "/" + std::to_string(index++));
      }
      ++i_;
    } else if (c == '"') {
      string();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' && s_[i_] != ' ' && s_[i_] != '\n' &&
             s_[i_] != '\r' && s_[i_] != '\t') {
        ++i_;
      }
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

enum class Kind { number, integer, numbers, string };

struct ParamSpec {
  std::map<std::string, Kind> params;
  bool needs_potential = false;
  bool needs_potential2d = false;
};

const std::map<std::string, ParamSpec>& param_specs() {
  using K = Kind;
  static const std::map<std::string, ParamSpec> specs = {
      {"classical-constants", {{}, false, false}},
      {"sharp-half", {{}, true, false}},
      {"lifted-moment", {{{"gammas", K::numbers}}, true, false}},
      {"lower-bound", {{}, true, false}},
      {"birman-schwinger", {{{"tolerance", K::number}}, true, false}},
      {"bs-sum-rule", {{{"tolerance", K::number}}, true, false}},
      {"kyfan-monotonicity", {{{"eps_count", K::integer}, {"n_max", K::integer}}, true, false}},
      {"cauchy-kernel", {{{"epsilons", K::numbers}, {"us", K::numbers}, {"tolerance", K::number}}, false, false}},
      {"unitarity", {{{"tolerance", K::number}}, true, false}},
      {"logdet-positivity", {{}, true, false}},
      {"integral-positivity", {{}, true, false}},
      {"trace-identities", {{{"tolerance", K::number}}, true, false}},
      {"holder-chain", {{}, true, false}},
      {"lifting-identity", {{{"pairs", K::integer}, {"seed", K::integer}, {"tolerance", K::number}}, false, false}},
      {"remainder-sweep",
       {{{"alpha_min", K::number},
         {"alpha_max", K::number},
         {"count", K::integer},
         {"slope_limit", K::number},
         {"base_step", K::number},
         {"levels", K::integer}},
        true,
        false}},
      {"weyl-sweep",
       {{{"gamma", K::number},
         {"alpha_min", K::number},
         {"alpha_max", K::number},
         {"count", K::integer},
         {"limit_tolerance", K::number},
         {"base_step", K::number},
         {"levels", K::integer}},
        true,
        false}},
      {"delta-limit",
       {{{"c", K::number}, {"widths", K::numbers}, {"dim", K::integer}, {"floor", K::number}}, false, false}},
      {"lt-2d", {{{"gammas", K::numbers}, {"half_length", K::number}, {"points", K::integer}}, false, true}},
      {"lt-2d-magnetic",
       {{{"gammas", K::numbers},
         {"half_length", K::number},
         {"points", K::integer},
         {"B", K::number},
         {"gauge", K::string}},
        false,
        true}},
      {"gauge-invariance",
       {{{"half_length", K::number},
         {"points", K::integer},
         {"B", K::number},
         {"gauge", K::string},
         {"seeds", K::numbers},
         {"tolerance", K::number}},
        false,
        true}},
      {"diamagnetic-trend",
       {{{"gamma", K::number}, {"half_length", K::number}, {"points", K::integer}, {"B", K::number},
         {"gauge", K::string}},
        false,
        true}},
      {"lifting-inequality",
       {{{"gammas", K::numbers}, {"rank", K::integer}, {"half_length", K::number}, {"points", K::integer}},
        false,
        true}},
      {"stable-c0",
       {{{"alpha", K::number},
         {"c1", K::number},
         {"beta", K::number},
         {"expected", K::number},
         {"tolerance", K::number},
         {"grid_points", K::integer},
         {"cutoff", K::number}},
        false,
        false}},
      {"density-mass", {{{"alpha", K::number}, {"c1", K::number}, {"tolerance", K::number}}, false, false}},
      {"fractional-moment",
       {{{"beta", K::number}, {"alpha", K::number}, {"c1", K::number}, {"c0", K::number}}, true, false}},
      {"fractional-crosscheck", {{{"tolerance", K::number}}, true, false}},
  };
  return specs;
}

bool kind_matches(const json& v, Kind k) {
  switch (k) {
    case Kind::number:
      return v.is_number();
    case Kind::integer:
      return v.is_number_integer();
    case Kind::string:
      return v.is_string();
    case Kind::numbers:
      if (!v.is_array()) return false;
      for (const json& x : v) {
        if (!x.is_number()) return false;
      }
      return true;
  }
  return false;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::number:
      return "a number";
    case Kind::integer:
      return "an integer";
    case Kind::string:
      return "a string";
    case Kind::numbers:
      return "an array of numbers";
  }
  return "";
}

const std::set<std::string> kPotentialKeys = {"family", "dim",    "depth", "half_width", "center", "nu",    "width",
                                              "integral", "radius", "amplitude", "modes", "seed",   "blocks"};

class Validator {
 public:
  explicit Validator(const std::string& text) : lines_(json_value_lines(text)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    // report the line of the nearest enclosing value that the scanner saw
    std::string p = pointer;
    for (;;) {
      auto it = lines_.find(p);
      if (it != lines_.end()) throw SchemaError(message, pointer, it->second);
      if (p.empty()) break;
      p = p.substr(0, p.rfind('/'));
    }
    throw SchemaError(message, pointer, 0);
  }

  void only_keys(const json& obj, const std::string& pointer, const std::set<std::string>& keys,
                 const std::string& what) const {
    for (const auto& [k, v] : obj.items()) {
      if (!keys.count(k)) fail(pointer + "/" + k, "unknown field '" + k + "' in " + what);
    }
  }

  void potential(const json& p, const std::string& pointer) const {
    if (!p.is_object()) fail(pointer, "potential must be an object");
    only_keys(p, pointer, kPotentialKeys, "potential");
    if (!p.contains("family") || !p["family"].is_string()) fail(pointer, "potential needs a string field 'family'");
    try {
      family_from_string(p["family"].get<std::string>());
    } catch (const InvalidArgument& e) {
      fail(pointer + "/family", e.what());
    }
    const std::string family = p["family"];
    if (family == to_string(FamilyTag::random_smooth) && !p.contains("seed")) {
      fail(pointer, "random family needs an explicit 'seed'");
    }
    if (family == to_string(FamilyTag::samples)) fail(pointer + "/family", "sampled potentials cannot be configured");
    if (p.contains("blocks")) {
      if (!p["blocks"].is_array()) fail(pointer + "/blocks", "'blocks' must be an array");
      for (std::size_t i = 0; i < p["blocks"].size(); ++i) {
        potential(p["blocks"][i], pointer + "/blocks/" + std::to_string(i));
      }
    }
    for (const char* key : {"depth", "half_width", "center", "nu", "width", "integral", "radius", "amplitude"}) {
      if (p.contains(key) && !p[key].is_number()) fail(pointer + "/" + key, std::string("'") + key + "' must be a number");
    }
    for (const char* key : {"dim", "modes", "seed"}) {
      if (p.contains(key) && !p[key].is_number_integer()) {
        fail(pointer + "/" + key, std::string("'") + key + "' must be an integer");
      }
    }
  }

  Scenario scenario(const json& s, const std::string& pointer) const {
    if (!s.is_object()) fail(pointer, "scenario must be an object");
    only_keys(s, pointer, {"name", "potential", "potential2d", "grid", "audits", "tolerances"}, "scenario");
    Scenario out;
    if (!s.contains("name") || !s["name"].is_string() || s["name"].get<std::string>().empty()) {
      fail(pointer, "scenario needs a non-empty string 'name'");
    }
    out.name = s["name"];
    for (char c : out.name) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
        fail(pointer + "/name", "scenario name '" + out.name + "' may only use letters, digits, '-', '_' and '.'");
      }
    }
    if (s.contains("potential")) {
      potential(s["potential"], pointer + "/potential");
      out.potential = s["potential"].get<FamilySpec>();
    }
    if (s.contains("potential2d")) {
      const json& p = s["potential2d"];
      const std::string pp = pointer + "/potential2d";
      if (!p.is_object()) fail(pp, "potential2d must be an object");
      only_keys(p, pp, {"family", "depth", "width"}, "potential2d");
      Potential2DSpec q;
      if (p.contains("family")) {
        if (!p["family"].is_string() || p["family"] != "gaussian") fail(pp + "/family", "2D family must be 'gaussian'");
      }
      for (const char* key : {"depth", "width"}) {
        if (p.contains(key) && !p[key].is_number()) fail(pp + "/" + key, std::string("'") + key + "' must be a number");
      }
      q.depth = p.value("depth", q.depth);
      q.width = p.value("width", q.width);
      out.potential2d = q;
    }
    if (s.contains("grid")) {
      const json& g = s["grid"];
      const std::string gp = pointer + "/grid";
      if (!g.is_object()) fail(gp, "grid must be an object");
      only_keys(g, gp, {"max_step", "levels", "cap", "edge_threshold"}, "grid");
      for (const char* key : {"max_step", "cap", "edge_threshold"}) {
        if (g.contains(key) && !g[key].is_number()) fail(gp + "/" + key, std::string("'") + key + "' must be a number");
      }
      if (g.contains("levels") && !g["levels"].is_number_integer()) fail(gp + "/levels", "'levels' must be an integer");
      out.grid.max_step = g.value("max_step", out.grid.max_step);
      out.grid.levels = g.value("levels", out.grid.levels);
      out.grid.cap = g.value("cap", out.grid.cap);
      out.grid.edge_threshold = g.value("edge_threshold", out.grid.edge_threshold);
      if (out.grid.levels < 1 || out.grid.levels > 2) fail(gp + "/levels", "'levels' must be 1 or 2");
      if (!(out.grid.max_step > 0.0)) fail(gp + "/max_step", "'max_step' must be positive");
    }
    if (!s.contains("audits") || !s["audits"].is_array()) fail(pointer, "scenario needs an 'audits' array");
    const auto& specs = param_specs();
    for (std::size_t i = 0; i < s["audits"].size(); ++i) {
      const json& a = s["audits"][i];
      const std::string ap = pointer + "/audits/" + std::to_string(i);
      AuditRequest req;
      if (a.is_string()) {
        req.tag = a;
      } else if (a.is_object() && a.contains("tag") && a["tag"].is_string()) {
        req.tag = a["tag"];
        only_keys(a, ap, {"tag", "params"}, "audit");
        if (a.contains("params")) {
          if (!a["params"].is_object()) fail(ap + "/params", "'params' must be an object");
          req.params = a["params"];
        }
      } else {
        fail(ap, "audit must be a tag string or an object with a string 'tag'");
      }
      auto it = specs.find(req.tag);
      if (it == specs.end()) fail(a.is_string() ? ap : ap + "/tag", "unknown audit tag '" + req.tag + "'");
      for (const auto& [k, v] : req.params.items()) {
        auto p = it->second.params.find(k);
        if (p == it->second.params.end()) {
          fail(ap + "/params/" + k, "audit '" + req.tag + "' has no parameter '" + k + "'");
        }
        if (!kind_matches(v, p->second)) {
          fail(ap + "/params/" + k, "parameter '" + k + "' of audit '" + req.tag + "' must be " + kind_name(p->second));
        }
      }
      if (it->second.needs_potential && !out.potential) {
        fail(ap, "audit '" + req.tag + "' needs a 'potential' in scenario '" + out.name + "'");
      }
      if (it->second.needs_potential2d && !out.potential2d) {
        fail(ap, "audit '" + req.tag + "' needs a 'potential2d' in scenario '" + out.name + "'");
      }
      out.audits.push_back(std::move(req));
    }
    if (s.contains("tolerances")) {
      const json& t = s["tolerances"];
      if (!t.is_object()) fail(pointer + "/tolerances", "'tolerances' must be an object");
      for (const auto& [k, v] : t.items()) {
        if (!specs.count(k)) fail(pointer + "/tolerances/" + k, "unknown audit tag '" + k + "'");
        if (!v.is_number() || !(v.get<double>() >= 0.0)) {
          fail(pointer + "/tolerances/" + k, "tolerance for '" + k + "' must be a nonnegative number");
        }
        out.tolerances[k] = v;
      }
    }
    return out;
  }

 private:
  std::map<std::string, int> lines_;
};

}  // namespace

const std::map<std::string, AuditSchema>& audit_schemas() {
  static const std::map<std::string, AuditSchema> out = [] {
    std::map<std::string, AuditSchema> m;
    for (const auto& [tag, spec] : param_specs()) {
      AuditSchema s;
      for (const auto& [k, v] : spec.params) s.params.push_back(k);
      s.needs_potential = spec.needs_potential;
      s.needs_potential2d = spec.needs_potential2d;
      m[tag] = s;
    }
    return m;
  }();
  return out;
}

std::map<std::string, int> json_value_lines(const std::string& text) { return LineScanner(text).run(); }

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size() + 1) && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw SchemaError(std::string("malformed JSON: ") + e.what(), "", line);
  }
  const Validator v(text);
  if (!doc.is_object()) v.fail("", "config must be a JSON object");
  v.only_keys(doc, "", {"schema_version", "name", "scenarios"}, "config");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    v.fail("", "config needs an integer 'schema_version'");
  }
  Config c;
  c.schema_version = doc["schema_version"];
  if (c.schema_version != kConfigSchemaVersion) {
    v.fail("/schema_version", "schema_version " + std::to_string(c.schema_version) + " is not supported (expected " +
                                  std::to_string(kConfigSchemaVersion) + ")");
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) v.fail("/name", "'name' must be a string");
    c.name = doc["name"];
  }
  if (!doc.contains("scenarios") || !doc["scenarios"].is_array()) v.fail("", "config needs a 'scenarios' array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < doc["scenarios"].size(); ++i) {
    const std::string p = "/scenarios/" + std::to_string(i);
    Scenario s = v.scenario(doc["scenarios"][i], p);
    if (!names.insert(s.name).second) v.fail(p + "/name", "duplicate scenario name '" + s.name + "'");
    c.scenarios.push_back(std::move(s));
  }
  c.digest = fnv1a_hex(to_json(c).dump());
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json to_json(const Config& c) {
  json scenarios = json::array();
  for (const Scenario& s : c.scenarios) {
    json j;
    j["name"] = s.name;
    if (s.potential) j["potential"] = *s.potential;
    if (s.potential2d) {
      j["potential2d"] = {{"family", s.potential2d->family}, {"depth", s.potential2d->depth},
                          {"width", s.potential2d->width}};
    }
    j["grid"] = {{"max_step", s.grid.max_step},
                 {"levels", s.grid.levels},
                 {"cap", s.grid.cap},
                 {"edge_threshold", s.grid.edge_threshold}};
    json audits = json::array();
    for (const AuditRequest& a : s.audits) audits.push_back({{"tag", a.tag}, {"params", a.params}});
    j["audits"] = audits;
    j["tolerances"] = s.tolerances;
    scenarios.push_back(j);
  }
  return {{"schema_version", c.schema_version}, {"name", c.name}, {"scenarios", scenarios}};
}

}  // namespace ltlab

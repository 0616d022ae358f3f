#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "ltlab/runner.hpp"

using namespace ltlab;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const SchemaError& e) {
    return e.line();
  }
  return -1;
}

const char* kSmall = R"({
  "schema_version": 1,
  "name": "small",
  "scenarios": [
    {"name": "constants", "audits": ["classical-constants"]},
    {
      "name": "pt1",
      "potential": {"family": "poschl-teller", "nu": 1},
      "audits": ["sharp-half", {"tag": "lifted-moment", "params": {"gammas": [0.5, 1.5]}}]
    }
  ]
})";

}  // namespace

TEST_CASE("valid config parses") {
  const Config c = parse_config(kSmall);
  CHECK(c.name == "small");
  REQUIRE(c.scenarios.size() == 2);
  CHECK(c.scenarios[1].potential->tag == FamilyTag::poschl_teller);
  CHECK(c.scenarios[1].audits[1].params["gammas"].size() == 2);
  CHECK(c.digest.size() == 16);
  CHECK(parse_config(to_json(c).dump()).digest == c.digest);
}

TEST_CASE("schema errors carry the offending line") {
  CHECK(error_line("{\n  \"schema_version\": 1,\n  \"name\": \"x\",\n  \"scenarios\": [],\n  \"extra\": 3\n}") == 5);
  CHECK(error_line("{\n  \"schema_version\": 2,\n  \"scenarios\": []\n}") == 2);
  CHECK(error_line(R"({
  "schema_version": 1,
  "scenarios": [
    {"name": "a", "audits": [
      "sharp-half"
    ]}
  ]
})") == 5);  // sharp-half needs a potential
  CHECK(error_line(R"({
  "schema_version": 1,
  "scenarios": [
    {"name": "a", "potential": {"family": "poschl-teller", "nu": 1},
     "audits": [{"tag": "lifted-moment", "params": {"gama": [1]}}]}
  ]
})") == 5);
  CHECK(error_line("{\n  \"schema_version\": 1,\n  \"scenarios\": [\n    {\"name\": \"r\", \"potential\": {\"family\": \"random-smooth\"},\n \"audits\": []}]}") == 4);
  CHECK(error_line("{\n  \"schema_version\": 1,\n  \"scenarios\": [\n  }") > 0);
}

TEST_CASE("duplicate names and unknown tags are rejected") {
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "scenarios": [
    {"name": "a", "audits": []}, {"name": "a", "audits": []}]})"),
                  SchemaError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "scenarios": [{"name": "a", "audits": ["nope"]}]})"),
                  SchemaError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "scenarios": [{"name": "a b", "audits": []}]})"),
                  SchemaError);
}

TEST_CASE("line map of a JSON document") {
  const auto lines = json_value_lines("{\n \"a\": [1,\n 2],\n \"b\": {\"c\": \"]\"}\n}");
  CHECK(lines.at("/a") == 2);
  CHECK(lines.at("/a/1") == 3);
  CHECK(lines.at("/b/c") == 4);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("empty config runs and passes") {
  const RunManifest m = run(parse_config(R"({"schema_version": 1, "scenarios": []})"));
  CHECK(m.pass);
  CHECK(m.scenarios.empty());
}

TEST_CASE("run, serialize, reload, render") {
  const Config c = parse_config(kSmall);
  const RunManifest m = run(c);
  CHECK(m.pass);
  REQUIRE(m.scenarios.size() == 2);
  CHECK(m.scenarios[0].name == "constants");
  CHECK(m.scenarios[1].reports.size() == 3);

  const nlohmann::json j = to_json(m);
  const RunManifest back = manifest_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(render_csv(back) == render_csv(m));
  CHECK(render_markdown(m).find("pt1") != std::string::npos);

  const nlohmann::json stripped = strip_timing(j);
  CHECK(stripped.dump().find("wall_time") == std::string::npos);
  CHECK(strip_timing(to_json(run(c))) == stripped);

  const auto dir = std::filesystem::temp_directory_path() / "ltlab-unit-out";
  std::filesystem::remove_all(dir);
  write_outputs(m, dir.string());
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  CHECK(std::filesystem::exists(dir / "summary.md"));
  CHECK(strip_timing(to_json(load_manifest((dir / "manifest.json").string()))) == stripped);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario failures are recorded, not thrown") {
  const Config c = parse_config(R"({"schema_version": 1, "scenarios": [
    {"name": "bad", "potential": {"family": "square-well", "depth": 1, "half_width": -1}, "audits": ["sharp-half"]}]})");
  const RunManifest m = run(c);
  REQUIRE(m.scenarios.size() == 1);
  CHECK_FALSE(m.scenarios[0].error.empty());
  CHECK_FALSE(m.pass);
}

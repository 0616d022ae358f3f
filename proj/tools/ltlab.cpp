#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ltlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical audits of Lieb-Thirring type inequalities"};
  app.set_version_flag("--version", std::string(LTLAB_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "ltlab-out";
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run every scenario of a config and write the manifest and summaries");
  run->add_option("--config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs,-j", jobs, "Scenarios run in parallel")->check(CLI::Range(1u, 256u));
  run->add_option("--out,-o", out_dir, "Output directory");

  std::string manifest_path;
  std::string format = "md";
  std::string output;
  auto* report = app.add_subcommand("report", "Render a manifest as csv, json or a markdown summary");
  report->add_option("--manifest", manifest_path, "manifest.json of a run")->required()->check(CLI::ExistingFile);
  report->add_option("--format", format, "csv, json or md")->check(CLI::IsMember({"csv", "json", "md"}));
  report->add_option("--output", output, "Write here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ltlab::Config config = ltlab::load_config(config_path);
      const ltlab::RunManifest m = ltlab::run(config, {jobs});
      ltlab::write_outputs(m, out_dir);
      std::size_t reports = 0, failed = 0;
      for (const auto& s : m.scenarios) {
        for (const auto& r : s.reports) {
          ++reports;
          if (!r.pass && !r.inconclusive) ++failed;
        }
        if (!s.error.empty()) std::cerr << "scenario " << s.name << " failed: " << s.error << "\n";
      }
      std::cout << m.scenarios.size() << " scenarios, " << reports << " reports, " << failed << " failed; "
                << (m.pass ? "PASS" : "FAIL") << " (" << out_dir << "/manifest.json)\n";
      return m.pass ? 0 : 1;
    }
    const ltlab::RunManifest m = ltlab::load_manifest(manifest_path);
    std::string text;
    if (format == "csv") text = ltlab::render_csv(m);
    else if (format == "json") text = ltlab::to_json(m).dump(2) + "\n";
    else text = ltlab::render_markdown(m);
    if (output.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(output, std::ios::binary);
      if (!out) throw ltlab::Error("cannot write '" + output + "'");
      out << text;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

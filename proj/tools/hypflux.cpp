#include "hypflux/driver.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"hypflux: explicit finite-volume runs and refinement studies"};
  app.require_subcommand(1);
  std::string output_dir;
  int jobs = 1;
  app.add_option("--output-dir", output_dir, "Write outputs here instead of [run] output_dir");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string config;
  auto* run = app.add_subcommand("run", "Run one simulation with diagnostics");
  run->add_option("config", config, "Run config file")->required();
  std::string spec;
  auto* study = app.add_subcommand("study", "Run a refinement study");
  study->add_option("spec", spec, "Study spec file")->required();
  std::string vconfig;
  auto* val = app.add_subcommand("validate", "Parse and validate a config without running");
  val->add_option("config", vconfig, "Config file")->required();
  for (auto* sub : {run, study}) {
    sub->add_option("--output-dir", output_dir, "Write outputs here instead of [run] output_dir");
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hypflux::kExitParse;
  }
  if (*run) return hypflux::run_single(config, output_dir, jobs);
  if (*study) return hypflux::run_study(spec, output_dir, jobs);
  return hypflux::validate_only(vconfig);
}

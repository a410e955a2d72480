#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plk/acceptance.hpp"
#include "plk/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov-Krasovskii certificates for the two-delay plankton-fish system"};
  app.require_subcommand(0, 1);

  bool seed_check = false;
  app.add_flag("--seed-check", seed_check, "Run the built-in acceptance suite");

  std::string run_config;
  std::string run_out;
  CLI::App* run = app.add_subcommand("run", "Classify, certify, simulate and verify one scenario");
  run->add_option("config", run_config, "Scenario JSON file")->required();
  run->add_option("--out", run_out, "Output directory (overrides outputs.directory)");

  std::string sweep_config;
  std::string sweep_key;
  std::vector<double> sweep_values;
  std::string sweep_out;
  CLI::App* sw = app.add_subcommand("sweep", "Run a scenario once per value of one field");
  sw->add_option("config", sweep_config, "Scenario JSON file")->required();
  sw->add_option("--key", sweep_key, "Dotted field path, e.g. params.d1")->required();
  sw->add_option("--values", sweep_values, "Values (comma or space separated)")
      ->delimiter(',')
      ->expected(0, -1);
  sw->add_option("--out", sweep_out, "Output directory (overrides outputs.directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : plk::kExitInputError;
  }

  if (seed_check) {
    const auto results = plk::run_acceptance(std::cout);
    for (const auto& r : results) {
      if (!r.pass) return 1;
    }
    return 0;
  }

  auto out_of = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  if (*run) {
    const plk::ScenarioResult r = plk::run_scenario_file(run_config, out_of(run_out));
    if (r.exit_code == plk::kExitInputError) {
      std::cerr << "error: " << r.message << '\n';
    } else {
      std::cout << "output: " << r.output_dir.string() << '\n';
      std::cout << "verdict: " << r.verdict << '\n';
      if (!r.message.empty()) std::cout << "note: " << r.message << '\n';
    }
    std::cout << "exit code: " << r.exit_code << '\n';
    return r.exit_code;
  }
  if (*sw) {
    const plk::SweepResult r = plk::sweep(sweep_config, sweep_key, sweep_values, out_of(sweep_out));
    if (r.exit_code != 0) {
      std::cerr << "error: " << r.message << '\n';
      return r.exit_code;
    }
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      std::printf("%.17g -> exit %d %s\n", r.values[i], r.rows[i].exit_code,
                  r.rows[i].message.c_str());
    }
    return 0;
  }
  std::cout << app.help();
  return 0;
}

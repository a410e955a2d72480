#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plk/certificate.hpp"
#include "plk/history.hpp"
#include "plk/model.hpp"

namespace plk {

/// Exit codes of the scenario pipeline.
enum ExitCode : int {
  kExitPass = 0,
  kExitInadmissible = 2,  // initial data outside the certified set, or no certificate
  kExitViolation = 3,     // envelope, differential inequality, positivity, or blow-up
  kExitInputError = 4,
};

struct HistorySpec {
  /// equilibrium | constant | equilibrium_plus_constant | equilibrium_plus_sine | tabulated
  std::string preset = "equilibrium";
  Vec3 value{};      // constant
  Vec3 offset{};     // equilibrium_plus_constant
  Vec3 amplitude{};  // equilibrium_plus_sine
  double frequency = 1.0;
  double phase = 0.0;
  double scale = 1.0;  // multiplies the deviation from the plankton-only point
  std::string table_path;
};

struct SolverSpec {
  double step = 0.0;  // 0: min(positive delays, 0.01) / step_divisor
  int step_divisor = 20;
  int stride = 10;
  int quad_intervals = 128;
  double positivity_tol = 1e-9;
};

inline const std::vector<std::string>& all_output_files() {
  static const std::vector<std::string> files = {"equilibria.txt", "certificate.txt",
                                                 "trajectory.csv", "verification.csv",
                                                 "report.txt"};
  return files;
}

struct OutputSpec {
  std::string directory = "plk_out";
  std::vector<std::string> files = all_output_files();
};

struct Scenario {
  RawParams params;
  HistorySpec history;
  double horizon = 50.0;
  SolverSpec solver;
  CertificateOptions overrides;
  OutputSpec outputs;
  /// Relative paths (table_path, outputs.directory) resolve against this.
  std::filesystem::path base_dir = ".";
};

/// JSON text to Scenario.  ConfigError on syntax errors (with line and
/// column), unknown keys, wrong types, or missing params, naming the field.
[[nodiscard]] Scenario parse_scenario(const std::string& text,
                                      const std::filesystem::path& base_dir = ".");
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// History for the scenario; equilibrium-based presets need the
/// plankton-only point.
[[nodiscard]] History build_history(const Scenario& sc, const ModelParams& p);

struct ScenarioResult {
  int exit_code = kExitPass;
  std::string verdict = "n/a";  // stability verdict of the plankton-only point
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double q = std::numeric_limits<double>::quiet_NaN();
  double V0 = std::numeric_limits<double>::quiet_NaN();
  bool admissible = false;
  double worst_envelope_margin = std::numeric_limits<double>::quiet_NaN();
  std::string message;  // first problem encountered, empty on pass
  std::filesystem::path output_dir;
};

/// classify -> certify -> simulate -> verify, writing the requested files
/// into `out_dir` (scenario outputs.directory when empty).
[[nodiscard]] ScenarioResult run_scenario(const Scenario& sc,
                                          const std::optional<std::filesystem::path>& out_dir = {});
/// Same, from a config file; input errors become exit code 4.
[[nodiscard]] ScenarioResult run_scenario_file(
    const std::filesystem::path& config,
    const std::optional<std::filesystem::path>& out_dir = {});

struct SweepResult {
  int exit_code = kExitPass;
  std::string message;
  std::vector<double> values;
  std::vector<ScenarioResult> rows;
};

/// Runs the scenario once per value with `key` (dotted path such as
/// params.d1 or history.amplitude.1) set to that value.  Each run writes
/// into out_dir/run_NNN; out_dir/summary.csv has one row per value.
[[nodiscard]] SweepResult sweep(const std::filesystem::path& config, const std::string& key,
                                const std::vector<double>& values,
                                const std::optional<std::filesystem::path>& out_dir = {},
                                bool parallel = true);

}  // namespace plk

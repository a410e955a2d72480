#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plk/errors.hpp"
#include "plk/scenario.hpp"
#include "plk/spectrum.hpp"

using namespace plk;
namespace fs = std::filesystem;

namespace {

const char* kParams =
    R"("params": {"r": 1, "K": 1, "c1": 1, "c2": 1, "d1": 1.5, "d2": 1, "b1": 3, "b2": 1, "tau1": 0.1, "tau2": 0.1})";

std::string scenario_text(const std::string& extra) {
  return std::string("{") + kParams + (extra.empty() ? "" : ", " + extra) + "}";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("plk_scenario_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    (void)parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse_scenario defaults and fields") {
  const Scenario sc = parse_scenario(scenario_text(
      R"("history": {"preset": "equilibrium_plus_sine", "amplitude": [0.001, 0.002, 0.003]}, "horizon": 12)"));
  CHECK(sc.params.d1 == 1.5);
  CHECK(sc.history.preset == "equilibrium_plus_sine");
  CHECK(sc.history.amplitude[2] == 0.003);
  CHECK(sc.horizon == 12.0);
  CHECK(sc.solver.stride == 10);
  CHECK(sc.outputs.files.size() == 5);
}

TEST_CASE("parse_scenario names the offending field") {
  CHECK(config_error(scenario_text(R"("history": {"bogus": 1})")).find("history.bogus") !=
        std::string::npos);
  CHECK(config_error(R"({"params": {"r": 1}})").find("params.K") != std::string::npos);
  CHECK(config_error(scenario_text(R"("solver": {"stride": 1.5})")).find("solver.stride") !=
        std::string::npos);
  CHECK(config_error(scenario_text(R"("history": {"preset": "wavy"})")).find("history.preset") !=
        std::string::npos);
  CHECK(config_error(scenario_text(R"("overrides": {"mu_fraction": 0.7})")).find("overrides") !=
        std::string::npos);
  CHECK(config_error(scenario_text(R"("outputs": {"files": ["plot.png"]})")).find("outputs.files.0") !=
        std::string::npos);
  const std::string syntax = config_error("{\n  \"params\": {\n    \"r\": 1,,\n  }\n}");
  CHECK(syntax.find("syntax error") != std::string::npos);
  CHECK(syntax.find("line 3") != std::string::npos);
  CHECK(config_error("{}").find("params") != std::string::npos);
}

TEST_CASE("exit codes of the pipeline") {
  const fs::path dir = scratch("exit");
  Scenario ok = parse_scenario(scenario_text(
      R"("history": {"preset": "equilibrium_plus_sine", "amplitude": [0.0001, 0.0001, 0], "frequency": 4}, "horizon": 8)"));
  const ScenarioResult pass = run_scenario(ok, dir / "pass");
  CHECK(pass.exit_code == kExitPass);
  CHECK(pass.admissible);
  CHECK(pass.verdict == "AsymptoticallyStable");
  CHECK(pass.worst_envelope_margin > 0.0);
  for (const auto& f : all_output_files()) CHECK(fs::exists(dir / "pass" / f));

  Scenario far = ok;
  far.history.scale = 500.0;
  const ScenarioResult inad = run_scenario(far, dir / "far");
  CHECK(inad.exit_code == kExitInadmissible);
  CHECK_FALSE(inad.admissible);
  CHECK(inad.message.find("condition") != std::string::npos);
  CHECK(slurp(dir / "far" / "verification.csv").find("nan") != std::string::npos);

  Scenario coexist = ok;
  coexist.params = {2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, 2.0, 0.0, 0.0};
  coexist.history = {};
  coexist.history.preset = "constant";
  coexist.history.value = {0.5, 0.5, 0.5};
  const ScenarioResult none = run_scenario(coexist, dir / "coexist");
  CHECK(none.exit_code == kExitInadmissible);
  CHECK(none.message.find("certificate") != std::string::npos);

  Scenario bad = ok;
  bad.params.K = -1.0;
  CHECK(run_scenario(bad, dir / "bad").exit_code == kExitInputError);
  Scenario negative = ok;
  negative.history.preset = "constant";
  negative.history.value = {0.5, -0.5, 0.0};
  CHECK(run_scenario(negative, dir / "neg").exit_code == kExitInputError);
  CHECK(run_scenario_file(dir / "missing.json").exit_code == kExitInputError);
}

TEST_CASE("outputs subset and relative table paths") {
  const fs::path dir = scratch("table");
  std::ofstream(dir / "hist.csv") << "theta,x,y,z\n-0.1,0.5,0.45,0.001\n0,0.5,0.45,0.001\n";
  std::ofstream(dir / "cfg.json") << scenario_text(
      R"("history": {"preset": "tabulated", "table_path": "hist.csv"}, "horizon": 2, "outputs": {"directory": "out", "files": ["report.txt"]})");
  const ScenarioResult res = run_scenario_file(dir / "cfg.json");
  CHECK(res.exit_code != kExitInputError);
  CHECK(fs::exists(dir / "out" / "report.txt"));
  CHECK_FALSE(fs::exists(dir / "out" / "trajectory.csv"));
}

TEST_CASE("sweep writes one summary row per value and is reproducible") {
  const fs::path dir = scratch("sweep");
  std::ofstream(dir / "cfg.json") << scenario_text(
      R"("history": {"preset": "equilibrium_plus_sine", "amplitude": [0.0001, 0.0001, 0]}, "horizon": 4, "outputs": {"files": ["report.txt", "trajectory.csv"]})");

  const SweepResult empty = sweep(dir / "cfg.json", "params.d1", {}, dir / "empty");
  CHECK(empty.rows.empty());
  CHECK(slurp(dir / "empty" / "summary.csv") ==
        "value,verdict,sigma,epsilon,q,V0,admissible,worst_envelope_margin,exit_code\n");

  const std::vector<double> values = {1.4, 1.5, 1.6};
  const SweepResult a = sweep(dir / "cfg.json", "params.d1", values, dir / "a", true);
  const SweepResult b = sweep(dir / "cfg.json", "params.d1", values, dir / "b", false);
  REQUIRE(a.rows.size() == 3);
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
  for (const char* run : {"run_000", "run_001", "run_002"}) {
    CHECK(slurp(dir / "a" / run / "trajectory.csv") == slurp(dir / "b" / run / "trajectory.csv"));
  }
  std::istringstream rows(slurp(dir / "a" / "summary.csv"));
  std::string line;
  int count = 0;
  while (std::getline(rows, line)) ++count;
  CHECK(count == 4);

  const SweepResult arr = sweep(dir / "cfg.json", "history.amplitude.1", {0.0002}, dir / "arr");
  CHECK(arr.rows.size() == 1);
  const SweepResult nope = sweep(dir / "cfg.json", "params.nope", {1.0}, dir / "nope");
  CHECK(nope.exit_code == kExitInputError);
  CHECK(nope.message.find("params.nope") != std::string::npos);
  CHECK(sweep(dir / "cfg.json", "history.amplitude.7", {1.0}, dir / "oob").exit_code == kExitInputError);
}

TEST_CASE("sweeps over d1 and amplitude follow the classification and quadratic scaling") {
  const fs::path dir = scratch("sweep_props");
  std::ofstream(dir / "cfg.json") << scenario_text(
      R"("history": {"preset": "equilibrium_plus_sine", "amplitude": [0.0001, 0.0001, 0]}, "horizon": 3, "outputs": {"files": ["report.txt"]})");

  const std::vector<double> d1s = {0.3, 0.6, 0.95, 1.5, 2.0, 2.6};
  const SweepResult byd1 = sweep(dir / "cfg.json", "params.d1", d1s, dir / "d1");
  REQUIRE(byd1.rows.size() == d1s.size());
  for (std::size_t i = 0; i < d1s.size(); ++i) {
    RawParams r = parse_scenario(scenario_text("")).params;
    r.d1 = d1s[i];
    CAPTURE(d1s[i]);
    CHECK(byd1.rows[i].verdict == to_string(lemma_classify(derive_params(r)).kind));
  }
  CHECK(byd1.rows.front().verdict == "DelayDependent");
  CHECK(byd1.rows.back().verdict == "AsymptoticallyStable");

  const std::vector<double> scales = {1.0, 2.0, 4.0, 16.0, 64.0, 256.0, 1024.0};
  const SweepResult amp = sweep(dir / "cfg.json", "history.scale", scales, dir / "amp");
  REQUIRE(amp.rows.size() == scales.size());
  bool flipped = false;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    CHECK(amp.rows[i].V0 == doctest::Approx(scales[i] * scales[i] * amp.rows[0].V0).epsilon(1e-9));
    if (!amp.rows[i].admissible) flipped = true;
    // Once inadmissible, larger amplitudes stay inadmissible.
    if (flipped) CHECK_FALSE(amp.rows[i].admissible);
  }
  CHECK(amp.rows.front().admissible);
  CHECK(flipped);
}

#include "plk/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "plk/dde.hpp"
#include "plk/errors.hpp"
#include "plk/kernels.hpp"
#include "plk/spectrum.hpp"
#include "plk/theorem.hpp"

namespace plk {

namespace {

using json = nlohmann::json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) field_error(where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) field_error(join(where, it.key()), "unknown key");
  }
}

double read_number(const json& obj, const std::string& where, const char* key, double def,
                   bool required = false) {
  if (!obj.contains(key)) {
    if (required) field_error(join(where, key), "missing required number");
    return def;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) field_error(join(where, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) field_error(join(where, key), "must be finite");
  return d;
}

int read_int(const json& obj, const std::string& where, const char* key, int def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !(v.is_number() && std::floor(v.get<double>()) == v.get<double>())) {
    field_error(join(where, key), "expected an integer");
  }
  return static_cast<int>(v.get<double>());
}

Vec3 read_vec3(const json& obj, const std::string& where, const char* key, const Vec3& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) field_error(join(where, key), "expected an array of 3 numbers");
  Vec3 out;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) field_error(join(where, key) + "." + std::to_string(i), "expected a number");
    out[i] = v[i].get<double>();
  }
  return out;
}

std::string read_string(const json& obj, const std::string& where, const char* key,
                        const std::string& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_string()) field_error(join(where, key), "expected a string");
  return v.get<std::string>();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
}

Scenario scenario_from_json(const json& root, const std::filesystem::path& base_dir) {
  reject_unknown(root, "", {"params", "history", "horizon", "solver", "overrides", "outputs"});
  Scenario sc;
  sc.base_dir = base_dir;

  if (!root.contains("params")) field_error("params", "missing required section");
  const json& pj = root.at("params");
  reject_unknown(pj, "params", {"r", "K", "c1", "c2", "d1", "d2", "b1", "b2", "tau1", "tau2"});
  RawParams& rp = sc.params;
  rp.r = read_number(pj, "params", "r", 0.0, true);
  rp.K = read_number(pj, "params", "K", 0.0, true);
  rp.c1 = read_number(pj, "params", "c1", 0.0, true);
  rp.c2 = read_number(pj, "params", "c2", 0.0, true);
  rp.d1 = read_number(pj, "params", "d1", 0.0, true);
  rp.d2 = read_number(pj, "params", "d2", 0.0, true);
  rp.b1 = read_number(pj, "params", "b1", 0.0, true);
  rp.b2 = read_number(pj, "params", "b2", 0.0, true);
  rp.tau1 = read_number(pj, "params", "tau1", 0.0, true);
  rp.tau2 = read_number(pj, "params", "tau2", 0.0, true);

  if (root.contains("history")) {
    const json& hj = root.at("history");
    reject_unknown(hj, "history", {"preset", "value", "offset", "amplitude", "frequency", "phase",
                                   "scale", "table_path"});
    HistorySpec& h = sc.history;
    h.preset = read_string(hj, "history", "preset", h.preset);
    static const std::set<std::string> presets = {"equilibrium", "constant",
                                                  "equilibrium_plus_constant",
                                                  "equilibrium_plus_sine", "tabulated"};
    if (!presets.count(h.preset)) field_error("history.preset", "unknown preset '" + h.preset + "'");
    h.value = read_vec3(hj, "history", "value", h.value);
    h.offset = read_vec3(hj, "history", "offset", h.offset);
    h.amplitude = read_vec3(hj, "history", "amplitude", h.amplitude);
    h.frequency = read_number(hj, "history", "frequency", h.frequency);
    h.phase = read_number(hj, "history", "phase", h.phase);
    h.scale = read_number(hj, "history", "scale", h.scale);
    h.table_path = read_string(hj, "history", "table_path", h.table_path);
    if (h.preset == "constant" && !hj.contains("value")) {
      field_error("history.value", "required by preset 'constant'");
    }
    if (h.preset == "tabulated" && h.table_path.empty()) {
      field_error("history.table_path", "required by preset 'tabulated'");
    }
  }

  sc.horizon = read_number(root, "", "horizon", sc.horizon);
  if (!(sc.horizon > 0.0)) field_error("horizon", "must be > 0");

  if (root.contains("solver")) {
    const json& sj = root.at("solver");
    reject_unknown(sj, "solver", {"step", "step_divisor", "stride", "quad_intervals",
                                  "positivity_tol"});
    SolverSpec& s = sc.solver;
    s.step = read_number(sj, "solver", "step", s.step);
    s.step_divisor = read_int(sj, "solver", "step_divisor", s.step_divisor);
    s.stride = read_int(sj, "solver", "stride", s.stride);
    s.quad_intervals = read_int(sj, "solver", "quad_intervals", s.quad_intervals);
    s.positivity_tol = read_number(sj, "solver", "positivity_tol", s.positivity_tol);
    if (s.step < 0.0) field_error("solver.step", "must be >= 0");
    if (s.step_divisor < 1) field_error("solver.step_divisor", "must be >= 1");
    if (s.stride < 1) field_error("solver.stride", "must be >= 1");
    if (s.quad_intervals < 64 || s.quad_intervals % 2 != 0) {
      field_error("solver.quad_intervals", "must be even and >= 64");
    }
    if (!(s.positivity_tol >= 0.0)) field_error("solver.positivity_tol", "must be >= 0");
  }

  if (root.contains("overrides")) {
    const json& oj = root.at("overrides");
    reject_unknown(oj, "overrides", {"alpha", "mu_fraction", "m_fraction", "h33_factor"});
    CertificateOptions& o = sc.overrides;
    o.alpha = read_number(oj, "overrides", "alpha", o.alpha);
    o.mu_fraction = read_number(oj, "overrides", "mu_fraction", o.mu_fraction);
    o.m_fraction = read_number(oj, "overrides", "m_fraction", o.m_fraction);
    o.h33_factor = read_number(oj, "overrides", "h33_factor", o.h33_factor);
    try {
      o.validate();
    } catch (const DomainError& e) {
      field_error("overrides", e.what());
    }
  }

  if (root.contains("outputs")) {
    const json& oj = root.at("outputs");
    reject_unknown(oj, "outputs", {"directory", "files"});
    sc.outputs.directory = read_string(oj, "outputs", "directory", sc.outputs.directory);
    if (oj.contains("files")) {
      const json& fj = oj.at("files");
      if (!fj.is_array()) field_error("outputs.files", "expected an array of file names");
      sc.outputs.files.clear();
      for (std::size_t i = 0; i < fj.size(); ++i) {
        const std::string where = "outputs.files." + std::to_string(i);
        if (!fj[i].is_string()) field_error(where, "expected a string");
        const std::string f = fj[i].get<std::string>();
        const auto& all = all_output_files();
        if (std::find(all.begin(), all.end(), f) == all.end()) {
          field_error(where, "unknown output file '" + f + "'");
        }
        sc.outputs.files.push_back(f);
      }
    }
  }
  return sc;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool wants(const Scenario& sc, const std::string& file) {
  const auto& f = sc.outputs.files;
  return std::find(f.begin(), f.end(), file) != f.end();
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
  std::ofstream os(dir / name);
  if (!os) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  return os;
}

void write_equilibria(std::ostream& os, const ModelParams& p, const EquilibriumSet& eq,
                      const std::optional<StabilityVerdict>& verdict,
                      const std::optional<RootReport>& roots, const std::string& root_error) {
  const CaseThresholds th = case_thresholds(p);
  os << "case = " << eq.case_id << '\n';
  os << "threshold_upper = " << num(th.upper) << "  # e1 c1 K\n";
  os << "threshold_lower = " << num(th.lower) << "  # e1 c1 K (1 - c1 d2 / (e2 c2 r))\n";
  os << "e1 = " << num(p.e1) << "\ne2 = " << num(p.e2) << '\n';
  for (const auto& e : eq.points) {
    os << "point " << to_string(e.label) << " = " << num(e.point[0]) << ' ' << num(e.point[1])
       << ' ' << num(e.point[2]) << '\n';
  }
  if (verdict) {
    os << "plankton_only_stability = " << to_string(verdict->kind) << '\n';
    os << "witness = " << verdict->witness << '\n';
  } else {
    os << "plankton_only_stability = n/a  # plankton-only point absent\n";
  }
  if (roots) {
    os << "root_scan_region = [" << num(roots->search_region.re_min) << ", "
       << num(roots->search_region.re_max) << "] x [" << num(roots->search_region.im_min) << ", "
       << num(roots->search_region.im_max) << "]\n";
    os << "root_scan_complete = " << (roots->complete ? "true" : "false") << '\n';
    os << "rightmost_real_part = " << num(roots->rightmost_real_part) << '\n';
    os << "roots_found = " << roots->roots.size() << '\n';
    os << "loose_roots_found = " << roots->loose_roots.size()
       << "  # |Q| above 1e-9 only through the size of its terms\n";
    const std::size_t shown = std::min<std::size_t>(roots->roots.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& r = roots->roots[i];
      os << "root " << num(r.lambda.real()) << ' ' << num(r.lambda.imag())
         << "  residual " << num(r.residual) << '\n';
    }
  } else if (!root_error.empty()) {
    os << "root_scan_error = " << root_error << '\n';
  }
}

struct Outcome {
  int code = kExitPass;
  std::string message;
  void raise(int c, const std::string& msg) {
    if (c > code) {
      code = c;
      message = msg;
    } else if (message.empty()) {
      message = msg;
    }
  }
};

const char* exit_meaning(int code) {
  switch (code) {
    case kExitPass:
      return "all requested checks passed";
    case kExitInadmissible:
      return "initial data not certified (inadmissible or no certificate)";
    case kExitViolation:
      return "verification violation";
    default:
      return "input error";
  }
}

ScenarioResult run_pipeline(const Scenario& sc, const std::filesystem::path& out) {
  ScenarioResult res;
  res.output_dir = out;
  Outcome oc;

  ModelParams p;
  try {
    p = derive_params(sc.params);
  } catch (const DomainError& e) {
    res.exit_code = kExitInputError;
    res.message = std::string("params: ") + e.what();
    return res;
  }

  std::optional<History> hist;
  try {
    hist = build_history(sc, p);
    hist->validate_nonnegative();
    (void)resolve_step(p, StepControl{sc.solver.step, sc.solver.step_divisor,
                                      sc.solver.positivity_tol});
  } catch (const std::exception& e) {
    res.exit_code = kExitInputError;
    res.message = e.what();
    return res;
  }

  std::filesystem::create_directories(out);
  std::ostringstream report;
  report << "# scenario report\n";

  const EquilibriumSet eq = classify_equilibria(p);
  std::optional<StabilityVerdict> verdict;
  std::optional<RootReport> roots;
  std::string root_error;
  if (eq.case_id >= 2 && p.e1 * p.c1 > 0.0) {
    verdict = lemma_classify(p);
    res.verdict = to_string(verdict->kind);
    try {
      roots = root_scan(linearize(p), p);
    } catch (const std::exception& e) {
      root_error = e.what();
    }
  }
  if (wants(sc, "equilibria.txt")) {
    auto os = open_out(out, "equilibria.txt");
    write_equilibria(os, p, eq, verdict, roots, root_error);
  }
  report << "equilibrium_case = " << eq.case_id << '\n';
  report << "stability = " << res.verdict << '\n';

  std::optional<LKCertificate> cert;
  std::string cert_error;
  try {
    cert = build_certificate(p, sc.overrides);
    res.sigma = cert->sigma;
    res.epsilon = cert->epsilon;
    res.q = cert->q;
  } catch (const CertificateError& e) {
    cert_error = e.what();
    oc.raise(e.kind() == CertificateError::Kind::Internal ? kExitViolation : kExitInadmissible,
             std::string("certificate: ") + e.what());
  }
  if (wants(sc, "certificate.txt")) {
    auto os = open_out(out, "certificate.txt");
    if (cert) {
      write_certificate_report(os, *cert);
    } else {
      os << "certificate = none\nreason = " << cert_error << '\n';
    }
  }
  report << "certificate = " << (cert ? "built" : "none: " + cert_error) << '\n';
  if (cert) {
    report << "sigma = " << num(cert->sigma) << "\nepsilon = " << num(cert->epsilon)
           << "\nq = " << num(cert->q) << "\neps_over_q = " << num(cert->epsilon / cert->q)
           << '\n';
  }

  std::optional<Trajectory> traj;
  try {
    traj = integrate(p, *hist, sc.horizon,
                     StepControl{sc.solver.step, sc.solver.step_divisor, sc.solver.positivity_tol});
  } catch (const IntegrationError& e) {
    oc.raise(kExitViolation, std::string("integration failed at t = ") + num(e.time()) + ": " +
                                 e.what());
    report << "integration = failed at t = " << num(e.time()) << '\n';
  }

  if (traj) {
    report << "step = " << num(traj->step()) << "\nnodes = " << traj->times().size() << '\n';
    if (wants(sc, "trajectory.csv")) {
      auto os = open_out(out, "trajectory.csv");
      write_trajectory_csv(os, *traj, sc.solver.stride);
    }
    const PositivityReport pos = check_positivity_boundedness(*traj, sc.solver.positivity_tol);
    report << "positivity = " << (pos.nonnegative ? "pass" : "FAIL") << "  min = "
           << num(pos.min_component[0]) << ' ' << num(pos.min_component[1]) << ' '
           << num(pos.min_component[2]) << '\n';
    report << "x_bound = " << (pos.x_bounded ? "pass" : "FAIL") << "  sup x = "
           << num(pos.observed_sup[0]) << "  bound = " << num(pos.x_bound) << '\n';
    report << "observed_sup = " << num(pos.observed_sup[0]) << ' ' << num(pos.observed_sup[1])
           << ' ' << num(pos.observed_sup[2]) << "  # empirical, valid on [0, horizon] only\n";
    if (!pos.pass()) oc.raise(kExitViolation, "positivity/boundedness check failed");

    if (cert) {
      const ExtendedHistory ext = extend_history(*hist, p);
      const TheoremReport th = check_initial_conditions(ext, *cert, sc.solver.quad_intervals);
      res.V0 = th.V0;
      res.admissible = th.envelopes_valid;
      write_theorem_report(report, th);
      Sampling sampling;
      sampling.stride = sc.solver.stride;
      sampling.quad_intervals = sc.solver.quad_intervals;
      std::vector<double> times;
      std::vector<double> V;
      if (th.envelopes_valid) {
        const double err = estimate_solver_error(*traj);
        const EnvelopeCheck ec = check_envelope(*traj, ext, *cert, th, sampling, err);
        res.worst_envelope_margin =
            std::min({ec.worst_margin[0], ec.worst_margin[1], ec.worst_margin[2]});
        report << "solver_error_estimate = " << num(err) << '\n';
        report << "envelope_tolerance = " << num(ec.tolerance) << '\n';
        report << "envelope = " << (ec.pass ? "pass" : "FAIL") << "  samples = " << ec.samples
               << "  violations = " << ec.violations << '\n';
        report << "worst_envelope_margin = " << num(ec.worst_margin[0]) << ' '
               << num(ec.worst_margin[1]) << ' ' << num(ec.worst_margin[2]) << '\n';
        report << "gronwall = " << (ec.gronwall_pass ? "pass" : "FAIL")
               << "  worst margin = " << num(ec.worst_gronwall_margin) << '\n';
        if (!ec.pass) {
          oc.raise(kExitViolation, "envelope violated first at t = " + num(ec.first_violation_time));
        }
        const InequalityCheck ic = check_differential_inequality(*traj, ext, *cert, sampling);
        report << "differential_inequality = " << (ic.pass ? "pass" : "FAIL")
               << "  samples = " << ic.samples << "  violations = " << ic.violations
               << "  worst margin = " << num(ic.worst_margin) << " at t = "
               << num(ic.worst_time) << "  without tolerance: " << ic.strict_violations
               << " violations\n";
        if (!ic.pass) oc.raise(kExitViolation, "differential inequality violated");
        times = ec.times;
        V = ec.V;
      } else {
        const ConditionResult* f = th.first_failure();
        oc.raise(kExitInadmissible, "inadmissible: condition " + f->name + " fails");
        if (wants(sc, "verification.csv")) {
          times = sample_times(*traj, sampling.stride);
          V = kernels::v_along_parallel(*traj, ext, *cert, times, sampling.quad_intervals);
        }
      }
      if (wants(sc, "verification.csv")) {
        auto os = open_out(out, "verification.csv");
        write_verification_csv(os, *traj, *cert, th, times, V);
      }
    }
  }

  res.exit_code = oc.code;
  res.message = oc.message;
  report << "exit_code = " << res.exit_code << "  # " << exit_meaning(res.exit_code) << '\n';
  if (!res.message.empty()) report << "message = " << res.message << '\n';
  if (wants(sc, "report.txt")) {
    auto os = open_out(out, "report.txt");
    os << report.str();
  }
  return res;
}

std::filesystem::path resolve(const Scenario& sc, const std::string& rel) {
  const std::filesystem::path p(rel);
  return p.is_absolute() ? p : sc.base_dir / p;
}

// Navigates a dotted path, creating objects for missing intermediate keys.
void set_path(json& root, const std::string& key, double value) {
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty() || std::any_of(parts.begin(), parts.end(), [](const auto& s) { return s.empty(); })) {
    throw ConfigError("sweep key '" + key + "' is not a dotted path");
  }
  json* node = &root;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& k = parts[i];
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(k);
      } catch (const std::exception&) {
        throw ConfigError("sweep key '" + key + "': '" + k + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("sweep key '" + key + "': index out of range");
      node = &(*node)[idx];
    } else if (node->is_object()) {
      if (!node->contains(k)) {
        if (last) {
          (*node)[k] = value;
          return;
        }
        (*node)[k] = json::object();
      }
      node = &(*node)[k];
    } else {
      throw ConfigError("sweep key '" + key + "' does not address a scalar field");
    }
  }
  if (!node->is_number()) throw ConfigError("sweep key '" + key + "' does not address a number");
  *node = value;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  return scenario_from_json(parse_json(text), base_dir);
}

Scenario load_scenario(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_scenario(text, path.parent_path().empty() ? "." : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

History build_history(const Scenario& sc, const ModelParams& p) {
  const HistorySpec& h = sc.history;
  if (h.preset == "constant") return History::constant(h.value, p.tau1, p.tau2);
  if (h.preset == "tabulated") {
    return History::from_csv(resolve(sc, h.table_path).string(), p.tau1, p.tau2);
  }
  PlanktonPoint pt;
  try {
    pt = plankton_only_point(p);
  } catch (const DomainError& e) {
    throw ConfigError("history preset '" + h.preset + "' needs the plankton-only point: " + e.what());
  }
  const Vec3 base{pt.x0, pt.y0, 0.0};
  History out = History::constant(base, p.tau1, p.tau2);
  if (h.preset == "equilibrium_plus_constant") {
    out = History::equilibrium_plus_constant(base, h.offset, p.tau1, p.tau2);
  } else if (h.preset == "equilibrium_plus_sine") {
    out = History::equilibrium_plus_sine(base, h.amplitude, h.frequency, h.phase, p.tau1, p.tau2);
  }
  return h.scale == 1.0 ? out : out.scaled_about(base, h.scale);
}

ScenarioResult run_scenario(const Scenario& sc, const std::optional<std::filesystem::path>& out_dir) {
  const std::filesystem::path out = out_dir ? *out_dir : resolve(sc, sc.outputs.directory);
  return run_pipeline(sc, out);
}

ScenarioResult run_scenario_file(const std::filesystem::path& config,
                                 const std::optional<std::filesystem::path>& out_dir) {
  try {
    return run_scenario(load_scenario(config), out_dir);
  } catch (const ConfigError& e) {
    ScenarioResult r;
    r.exit_code = kExitInputError;
    r.message = e.what();
    return r;
  }
}

SweepResult sweep(const std::filesystem::path& config, const std::string& key,
                  const std::vector<double>& values,
                  const std::optional<std::filesystem::path>& out_dir, bool parallel) {
  SweepResult sr;
  sr.values = values;
  json base;
  Scenario base_sc;
  try {
    base = parse_json(read_file(config));
    base_sc = load_scenario(config);
    json probe = base;
    set_path(probe, key, 1.0);
    (void)scenario_from_json(probe, base_sc.base_dir);
  } catch (const ConfigError& e) {
    sr.exit_code = kExitInputError;
    sr.message = e.what();
    return sr;
  }
  const std::filesystem::path out = out_dir ? *out_dir : resolve(base_sc, base_sc.outputs.directory);
  std::filesystem::create_directories(out);

  sr.rows.resize(values.size());
  kernels::for_each_index(
      values.size(),
      [&](std::size_t i) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        try {
          json j = base;
          set_path(j, key, values[i]);
          const Scenario sc = scenario_from_json(j, base_sc.base_dir);
          sr.rows[i] = run_scenario(sc, out / name);
        } catch (const std::exception& e) {
          sr.rows[i].exit_code = kExitInputError;
          sr.rows[i].message = e.what();
          sr.rows[i].output_dir = out / name;
        }
      },
      parallel);

  std::ofstream os(out / "summary.csv");
  if (!os) {
    sr.exit_code = kExitInputError;
    sr.message = "cannot write summary.csv";
    return sr;
  }
  os << "value,verdict,sigma,epsilon,q,V0,admissible,worst_envelope_margin,exit_code\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const ScenarioResult& r = sr.rows[i];
    os << num(values[i]) << ',' << r.verdict << ',' << num(r.sigma) << ',' << num(r.epsilon) << ','
       << num(r.q) << ',' << num(r.V0) << ',' << (r.admissible ? "true" : "false") << ','
       << num(r.worst_envelope_margin) << ',' << r.exit_code << '\n';
  }
  return sr;
}

}  // namespace plk

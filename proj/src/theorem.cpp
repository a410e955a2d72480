#include "plk/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "plk/errors.hpp"
#include "plk/kernels.hpp"

namespace plk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_intervals(int n) {
  if (n < 64 || n % 2 != 0) throw DomainError("quadrature needs an even number >= 64 of intervals");
}

// Composite Simpson of <K(t - s) y(s), y(s)> over [lo, hi] with
// K(u) = e^{-m u} K0.
template <class Y>
double simpson_piece(const Mat3& K0, double m, double tau, double t, double lo, double hi, int n,
                     const Y& y) {
  if (!(hi > lo)) return 0.0;
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = i == n ? hi : lo + i * h;
    const double u = std::clamp(t - s, 0.0, tau);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * std::exp(-m * u) * quad_form(K0, y(s));
  }
  return sum * h / 3.0;
}

template <class Y>
double functional_value(const LKCertificate& c, double t, int n, const Y& y) {
  double v = quad_form(c.H, y(t));
  const Mat3 K10 = eval_K(c, 1, 0.0, KernelWeights::Functional);
  const Mat3 K20 = eval_K(c, 2, 0.0, KernelWeights::Functional);
  const std::pair<const Mat3*, std::pair<double, double>> windows[2] = {
      {&K10, {c.m1, c.params.tau1}}, {&K20, {c.m2, c.params.tau2}}};
  for (const auto& [K0, mt] : windows) {
    const double m = mt.first;
    const double tau = mt.second;
    const double lo = t - tau;
    if (lo < 0.0 && t > 0.0) {
      v += simpson_piece(*K0, m, tau, t, lo, 0.0, n, y);
      v += simpson_piece(*K0, m, tau, t, 0.0, t, n, y);
    } else {
      v += simpson_piece(*K0, m, tau, t, lo, t, n, y);
    }
  }
  return v;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExtendedHistory::ExtendedHistory(History h, double x0, double y0)
    : hist_(std::move(h)), x0_(x0), y0_(y0) {}

Vec3 ExtendedHistory::operator()(double theta) const {
  if (theta > 0.0) throw DomainError("extended history evaluated at theta > 0");
  Vec3 v{};
  if (theta >= -hist_.tau1()) v[0] = hist_.phi(theta) - x0_;
  if (theta >= -hist_.tau_max()) v[1] = hist_.psi(theta) - y0_;
  if (theta >= -hist_.tau2()) v[2] = hist_.eta(theta);
  return v;
}

ExtendedHistory extend_history(const History& hist, const ModelParams& p) {
  const PlanktonPoint pt = plankton_only_point(p);
  return ExtendedHistory(hist, pt.x0, pt.y0);
}

double eval_V0(const ExtendedHistory& ext, const LKCertificate& cert, int intervals) {
  check_intervals(intervals);
  return functional_value(cert, 0.0, intervals, [&](double s) { return ext(s); });
}

double eval_V_along(const Trajectory& traj, const ExtendedHistory& ext, const LKCertificate& cert,
                    double t, int intervals) {
  check_intervals(intervals);
  if (!(t >= 0.0 && t <= traj.t_end())) {
    throw DomainError("eval_V_along: t = " + num(t) + " outside [0, t_end]");
  }
  const Vec3 eq = ext.equilibrium();
  return functional_value(cert, t, intervals, [&](double s) {
    return s < 0.0 ? ext(s) : traj.sample(s) - eq;
  });
}

const ConditionResult* TheoremReport::first_failure() const noexcept {
  for (const auto& c : conditions) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

TheoremReport check_initial_conditions(const ExtendedHistory& ext, const LKCertificate& c,
                                       int intervals) {
  const ModelParams& p = c.params;
  const History& hist = ext.history();
  const double y0 = c.lin.y0;
  const double det = c.det_h_block();

  TheoremReport r;
  r.V0 = eval_V0(ext, c, intervals);
  const double root = std::sqrt(std::max(r.V0, 0.0));

  double dev1 = hist.sampled_max_abs_deviation(1, y0, -p.tau1, 0.0);
  double dev2 = hist.sampled_max_abs_deviation(1, y0, -p.tau2, 0.0);
  r.analytic_dev_tau1 = hist.analytic_max_abs_deviation(1, y0, -p.tau1, 0.0);
  r.analytic_dev_tau2 = hist.analytic_max_abs_deviation(1, y0, -p.tau2, 0.0);
  if (r.analytic_dev_tau1) dev1 = std::max(dev1, *r.analytic_dev_tau1);
  if (r.analytic_dev_tau2) dev2 = std::max(dev2, *r.analytic_dev_tau2);

  const double w1 = c.mu1 / (p.e1 * p.c1) * std::exp(-c.m1 * p.tau1 / 2.0);
  const double w2 = c.mu2 / (p.e2 * p.c2) * std::exp(-c.m2 * p.tau2 / 2.0);

  auto set = [](ConditionResult& cr, const char* name, const char* statement, double lhs,
                double rhs, bool strict) {
    cr.name = name;
    cr.statement = statement;
    cr.lhs = lhs;
    cr.rhs = rhs;
    cr.margin = rhs - lhs;
    cr.pass = strict ? lhs < rhs : lhs <= rhs;
  };

  set(r.conditions[0], "y_deviation_tau1_window",
      "max_{[-tau1,0]} |psi - y0| <= sqrt(h11 h22 - h12^2)/h22 * mu1/(e1 c1) * exp(-m1 tau1/2)",
      dev1, std::sqrt(det) / c.h22 * w1, false);
  set(r.conditions[1], "y_deviation_tau2_window",
      "max_{[-tau2,0]} |psi - y0| <= mu2/(e2 c2) * exp(-m2 tau2/2)", dev2, w2, false);
  set(r.conditions[2], "sqrt_V0_below_eps_over_q", "sqrt(V0) < epsilon/q", root,
      c.epsilon / c.q, true);
  const double deflated =
      r.conditions[2].pass ? root / (1.0 - c.q / c.epsilon * root) : kInf;
  set(r.conditions[3], "deflated_V0_tau1_bound",
      "sqrt(V0)/(1 - q/epsilon sqrt(V0)) <= (h11 h22 - h12^2)/(h22 sqrt(h11)) * mu1/(e1 c1) * "
      "exp(-m1 tau1/2)",
      deflated, det / (c.h22 * std::sqrt(c.h11)) * w1, false);
  set(r.conditions[4], "deflated_V0_tau2_bound",
      "sqrt(V0)/(1 - q/epsilon sqrt(V0)) <= sqrt(h11 h22 - h12^2)/sqrt(h11) * mu2/(e2 c2) * "
      "exp(-m2 tau2/2)",
      deflated, std::sqrt(det) / std::sqrt(c.h11) * w2, false);
  r.envelopes_valid = std::all_of(r.conditions.begin(), r.conditions.end(),
                                  [](const ConditionResult& cr) { return cr.pass; });
  return r;
}

Envelope predicted_envelope(const LKCertificate& c, double V0, double t) {
  const double root = std::sqrt(std::max(V0, 0.0));
  const double den = 1.0 - c.q / c.epsilon * root;
  if (!(den > 0.0)) throw DomainError("envelope needs sqrt(V0) < epsilon/q");
  const double D = root * std::exp(-c.epsilon * t / 2.0) / den;
  const double sd = std::sqrt(c.det_h_block());
  return {std::sqrt(c.h22) / sd * D, std::sqrt(c.h11) / sd * D, D / std::sqrt(c.h33)};
}

double gronwall_bound(const LKCertificate& c, double V0, double t) {
  const double den = 1.0 - c.q / c.epsilon * std::sqrt(std::max(V0, 0.0));
  if (!(den > 0.0)) throw DomainError("Gronwall bound needs sqrt(V0) < epsilon/q");
  return V0 * std::exp(-c.epsilon * t) / (den * den);
}

std::vector<double> sample_times(const Trajectory& traj, int stride) {
  if (stride < 1) throw DomainError("stride must be >= 1");
  std::vector<double> out;
  const auto& t = traj.times();
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (i % static_cast<std::size_t>(stride) == 0 || i + 1 == t.size()) out.push_back(t[i]);
  }
  return out;
}

EnvelopeCheck check_envelope(const Trajectory& traj, const ExtendedHistory& ext,
                             const LKCertificate& c, const TheoremReport& report,
                             const Sampling& sampling, double solver_error) {
  if (!report.envelopes_valid) throw DomainError("envelope check needs an admissible history");
  EnvelopeCheck ec;
  ec.solver_error = solver_error;
  ec.tolerance = 1e-6 + 10.0 * solver_error;
  ec.times = sample_times(traj, sampling.stride);
  ec.V = sampling.parallel
             ? kernels::v_along_parallel(traj, ext, c, ec.times, sampling.quad_intervals)
             : kernels::v_along_serial(traj, ext, c, ec.times, sampling.quad_intervals);
  ec.samples = ec.times.size();
  ec.worst_margin = {kInf, kInf, kInf};
  ec.worst_gronwall_margin = kInf;
  const Vec3 eq = ext.equilibrium();
  for (std::size_t i = 0; i < ec.times.size(); ++i) {
    const double t = ec.times[i];
    const Envelope env = predicted_envelope(c, report.V0, t);
    const Vec3 dev = traj.sample(t) - eq;
    const Vec3 margin{env.bx - std::fabs(dev[0]), env.by - std::fabs(dev[1]),
                      env.bz - std::fabs(dev[2])};
    bool bad = false;
    for (std::size_t k = 0; k < 3; ++k) {
      ec.worst_margin[k] = std::min(ec.worst_margin[k], margin[k]);
      if (margin[k] < -ec.tolerance) bad = true;
    }
    const double gm = gronwall_bound(c, report.V0, t) + 1e-7 - ec.V[i];
    ec.worst_gronwall_margin = std::min(ec.worst_gronwall_margin, gm);
    if (gm < 0.0) {
      ec.gronwall_pass = false;
      bad = true;
    }
    if (bad) {
      if (ec.violations == 0) ec.first_violation_time = t;
      ++ec.violations;
    }
  }
  ec.pass = ec.violations == 0;
  return ec;
}

InequalityCheck check_differential_inequality(const Trajectory& traj, const ExtendedHistory& ext,
                                              const LKCertificate& c, const Sampling& sampling) {
  const double h = traj.step();
  std::vector<double> centers;
  for (double t : sample_times(traj, sampling.stride)) {
    if (t - h >= 0.0 && t + h <= traj.t_end()) centers.push_back(t);
  }
  std::vector<double> times;
  times.reserve(3 * centers.size());
  for (double t : centers) {
    times.push_back(t - h);
    times.push_back(t);
    times.push_back(t + h);
  }
  const std::vector<double> V =
      sampling.parallel ? kernels::v_along_parallel(traj, ext, c, times, sampling.quad_intervals)
                        : kernels::v_along_serial(traj, ext, c, times, sampling.quad_intervals);
  InequalityCheck ic;
  ic.samples = centers.size();
  ic.worst_margin = kInf;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double vm = V[3 * i];
    const double v = V[3 * i + 1];
    const double vp = V[3 * i + 2];
    const double dv = (vp - vm) / (2.0 * h);
    const double vpos = std::max(v, 0.0);
    const double bound = -c.epsilon * v + c.q * vpos * std::sqrt(vpos);
    const double margin = bound + 1e-5 * (1.0 + std::fabs(v)) - dv;
    if (margin < ic.worst_margin) {
      ic.worst_margin = margin;
      ic.worst_time = centers[i];
    }
    if (margin < 0.0) ++ic.violations;
    if (dv > bound) ++ic.strict_violations;
  }
  ic.pass = ic.violations == 0;
  return ic;
}

void write_verification_csv(std::ostream& os, const Trajectory& traj, const LKCertificate& c,
                            const TheoremReport& report, const std::vector<double>& times,
                            const std::vector<double>& V) {
  if (times.size() != V.size()) throw DomainError("verification CSV: times/V size mismatch");
  os << "t,x,y,z,V,bound_x,bound_y,bound_z,margin_x,margin_y,margin_z\n";
  const Vec3 eq = c.lin.equilibrium();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  char buf[512];
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const Vec3 s = traj.sample(t);
    Envelope env{nan, nan, nan};
    if (report.envelopes_valid) env = predicted_envelope(c, report.V0, t);
    const Vec3 dev = s - eq;
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, s[0],
                  s[1], s[2], V[i], env.bx, env.by, env.bz, env.bx - std::fabs(dev[0]),
                  env.by - std::fabs(dev[1]), env.bz - std::fabs(dev[2]));
    os << buf;
  }
}

void write_theorem_report(std::ostream& os, const TheoremReport& r) {
  os << "V0 = " << num(r.V0) << '\n';
  for (const auto& cr : r.conditions) {
    os << "condition " << cr.name << ": " << (cr.pass ? "pass" : "FAIL") << '\n';
    os << "  " << cr.statement << '\n';
    os << "  lhs = " << num(cr.lhs) << "\n  rhs = " << num(cr.rhs) << "\n  margin = "
       << num(cr.margin) << '\n';
  }
  if (r.analytic_dev_tau1) os << "analytic max |psi - y0| on [-tau1,0] = " << num(*r.analytic_dev_tau1) << '\n';
  if (r.analytic_dev_tau2) os << "analytic max |psi - y0| on [-tau2,0] = " << num(*r.analytic_dev_tau2) << '\n';
  os << "envelopes_valid = " << (r.envelopes_valid ? "true" : "false") << '\n';
  if (const ConditionResult* f = r.first_failure()) {
    os << "inadmissible: first failed condition " << f->name << '\n';
  }
}

}  // namespace plk

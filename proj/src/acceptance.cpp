#include "plk/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "plk/certificate.hpp"
#include "plk/dde.hpp"
#include "plk/errors.hpp"
#include "plk/kernels.hpp"
#include "plk/model.hpp"
#include "plk/spectrum.hpp"
#include "plk/theorem.hpp"

namespace plk {

namespace {

// Uniform doubles from raw engine bits so draws do not depend on the
// standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RawParams base_draw(Rng& g, double tau_lo, double tau_hi) {
  RawParams r;
  r.r = g.uniform(0.5, 3.0);
  r.K = g.uniform(0.5, 3.0);
  r.c1 = g.uniform(0.2, 2.0);
  r.c2 = g.uniform(0.2, 2.0);
  r.b1 = g.uniform(1.0, 5.0);
  r.b2 = g.uniform(0.5, 4.0);
  r.d2 = g.uniform(0.2, 2.0);
  r.tau1 = g.uniform(tau_lo, tau_hi);
  r.tau2 = g.uniform(tau_lo, tau_hi);
  return r;
}

double e_of(double b, double c, double tau) { return b * std::exp(-c * tau); }

// Thresholds recomputed from the raw inputs.
struct Bounds {
  double upper;
  double lower;  // may be negative
};

Bounds bounds_of(const RawParams& r) {
  const double e1 = e_of(r.b1, r.c1, r.tau1);
  const double e2 = e_of(r.b2, r.c2, r.tau2);
  const double upper = e1 * r.c1 * r.K;
  return {upper, upper * (1.0 - r.c1 * r.d2 / (e2 * r.c2 * r.r))};
}

// Forces c1 d2 < e2 c2 r so the lower threshold is positive.
void make_lower_positive(Rng& g, RawParams& r) {
  const double e2 = e_of(r.b2, r.c2, r.tau2);
  if (r.c1 * r.d2 >= e2 * r.c2 * r.r) r.d2 = g.uniform(0.1, 0.9) * e2 * r.c2 * r.r / r.c1;
}

RawParams draw_case(Rng& g, int target, double tau_lo, double tau_hi) {
  RawParams r = base_draw(g, tau_lo, tau_hi);
  if (target == 3) make_lower_positive(g, r);
  const Bounds b = bounds_of(r);
  if (target == 1) {
    r.d1 = b.upper * g.uniform(1.05, 2.0);
  } else if (target == 2) {
    const double lo = std::max(b.lower, 0.0);
    r.d1 = lo + g.uniform(0.05, 0.95) * (b.upper - lo);
  } else {
    r.d1 = b.lower * g.uniform(0.05, 0.95);
  }
  return r;
}

// Strictly inside the delay-independent stability interval.
RawParams draw_stable(Rng& g, double tau_lo, double tau_hi) {
  RawParams r = base_draw(g, tau_lo, tau_hi);
  const Bounds b = bounds_of(r);
  const double lo = std::max(b.upper / 3.0, b.lower);
  r.d1 = lo + g.uniform(0.05, 0.95) * (b.upper - lo);
  return r;
}

RawParams draw_unstable(Rng& g, double tau_lo, double tau_hi) {
  RawParams r = base_draw(g, tau_lo, tau_hi);
  make_lower_positive(g, r);
  r.d1 = bounds_of(r).lower * g.uniform(0.1, 0.9);
  return r;
}

struct Admissible {
  ModelParams p;
  LKCertificate cert;
  History hist;
  Vec3 base;
};

// Random perturbation shape around the plankton-only point, halved until all
// admissibility conditions pass.
Admissible make_admissible(Rng& g) {
  for (;;) {
    const ModelParams p = derive_params(draw_stable(g, 0.01, 0.5));
    const LKCertificate cert = build_certificate(p);
    const Vec3 base{cert.lin.x0, cert.lin.y0, 0.0};
    const double dir_y = g.uniform(0.3, 1.0) * (g.bits() & 1 ? 1.0 : -1.0);
    const Vec3 dir{g.uniform(-1.0, 1.0), dir_y, g.uniform(0.0, 1.0)};
    const bool sine = g.bits() & 1;
    const double freq = g.uniform(0.5, 20.0);
    const double phase = g.uniform(0.0, 6.283185307179586);
    double amp = 0.5;
    for (int it = 0; it < 80; ++it, amp *= 0.5) {
      const Vec3 a = amp * dir;
      // The sine preset is lifted in z by its amplitude so z stays >= 0.
      const History h =
          sine ? History::equilibrium_plus_sine(Vec3{base[0], base[1], std::fabs(a[2])}, a, freq,
                                                phase, p.tau1, p.tau2)
               : History::equilibrium_plus_constant(base, a, p.tau1, p.tau2);
      try {
        h.validate_nonnegative();
      } catch (const DomainError&) {
        continue;
      }
      const TheoremReport th = check_initial_conditions(extend_history(h, p), cert);
      if (th.envelopes_valid) return {p, cert, h, base};
    }
  }
}

struct CriterionRun {
  bool pass = true;
  std::ostringstream detail;
};

CriterionResult finish(int id, const char* name, CriterionRun& run) {
  return {id, name, run.pass, run.detail.str()};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& log, const AcceptanceOptions& opts) {
  std::vector<CriterionResult> results;
  Rng g(opts.seed);
  std::vector<PositivityReport> positivity;
  auto emit = [&](const CriterionResult& r) {
    log << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.detail.empty()) log << "  [" << r.detail << ']';
    log << std::endl;
    results.push_back(r);
  };

  // 1. Equilibria zero the right-hand side; case ids follow the thresholds.
  {
    CriterionRun run;
    double worst = 0.0;
    int counts[4] = {0, 0, 0, 0};
    int mismatches = 0;
    for (int i = 0; i < 200; ++i) {
      RawParams raw = draw_case(g, 1 + i % 3, 0.0, 0.5);
      if (i % 50 == 7) raw.c1 = 0.0;  // degenerate predation
      if (i % 50 == 11) raw.d1 = bounds_of(raw).upper;  // boundary
      const ModelParams p = derive_params(raw);
      const EquilibriumSet eq = classify_equilibria(p);
      const Bounds b = bounds_of(raw);
      const int expect = raw.d1 > b.upper ? 1 : (raw.d1 >= b.lower ? 2 : 3);
      if (eq.case_id != expect || eq.points.size() != static_cast<std::size_t>(expect + 1)) {
        ++mismatches;
      }
      ++counts[eq.case_id];
      for (const auto& e : eq.points) {
        for (double c : e.point) {
          if (c < 0.0) ++mismatches;
        }
        worst = std::max(worst, max_abs(rhs(e.point, e.point, e.point, p)));
      }
    }
    run.pass = worst <= 1e-12 && mismatches == 0 && counts[1] > 0 && counts[2] > 0 && counts[3] > 0;
    run.detail << "200 sets, cases 1/2/3 = " << counts[1] << '/' << counts[2] << '/' << counts[3]
               << ", max |rhs| = " << fmt("%.3g", worst) << ", mismatches = " << mismatches;
    emit(finish(1, "equilibria zero the rhs and case ids match thresholds", run));
  }

  // 2. Root scan corroborates the delay-independent classification.
  {
    CriterionRun run;
    int bad = 0;
    double worst_stable = -1e300;
    double least_unstable = 1e300;
    RootScanOptions ro;
    ro.parallel = opts.parallel;
    for (int i = 0; i < 20; ++i) {
      const ModelParams p = derive_params(draw_stable(g, 0.01, 2.0));
      const RootReport rr = root_scan(linearize(p), p, ro);
      worst_stable = std::max(worst_stable, rr.rightmost_real_part);
      if (lemma_classify(p).kind != StabilityKind::AsymptoticallyStable ||
          !(rr.rightmost_real_part < 0.0) || !rr.complete) {
        ++bad;
      }
    }
    for (int i = 0; i < 20; ++i) {
      const ModelParams p = derive_params(draw_unstable(g, 0.01, 2.0));
      const RootReport rr = root_scan(linearize(p), p, ro);
      const bool found = !rr.roots.empty() && rr.roots.front().lambda.real() > 0.0;
      if (found) least_unstable = std::min(least_unstable, rr.roots.front().lambda.real());
      if (lemma_classify(p).kind != StabilityKind::Unstable || !found) ++bad;
    }
    run.pass = bad == 0;
    run.detail << "max rightmost Re (stable sets) = " << fmt("%.4g", worst_stable)
               << ", min leading Re (unstable sets) = " << fmt("%.4g", least_unstable)
               << ", misclassified = " << bad;
    emit(finish(2, "root scan agrees with the stability classification", run));
  }

  // 3 and 4. Certificate soundness and the closed-form leading minor.
  std::vector<LKCertificate> certs;
  {
    CriterionRun run;
    int bad = 0;
    double min_eig = 1e300;
    double worst_psd = 1e300;
    for (int i = 0; i < 20; ++i) {
      const ModelParams p = derive_params(draw_stable(g, 0.01, 0.5));
      try {
        const LKCertificate c = build_certificate(p);
        const BlockMatrixResult C = assemble_C(c, KernelWeights::Strict);
        const double eig = min_eigenvalue(C.C);
        const SymMatrix Ls = SymMatrix::from_mat3(c.L);
        const double psd = min_eigenvalue(Ls - c.sigma * SymMatrix::from_mat3(c.H)) /
                           Ls.frobenius_norm();
        min_eig = std::min(min_eig, eig);
        worst_psd = std::min(worst_psd, psd);
        if (!(eig > 0.0) || !C.positive_definite || psd < -1e-10) ++bad;
        certs.push_back(c);
      } catch (const std::exception& e) {
        ++bad;
        run.detail << "set " << i << ": " << e.what() << "; ";
      }
    }
    run.pass = bad == 0;
    run.detail << "min eig C = " << fmt("%.4g", min_eig)
               << ", min eig(L - sigma H)/|L| = " << fmt("%.3g", worst_psd) << ", failures = " << bad;
    emit(finish(3, "certificate builds, C is positive definite, L >= sigma H", run));
  }
  {
    CriterionRun run;
    double worst = 0.0;
    certs.push_back(build_certificate(derive_params({1, 1, 1, 1, 1.5, 1, 3, 1, 0.1, 0.1})));
    for (const auto& c : certs) {
      const double l11 = c.L[0][0], l12 = c.L[0][1], l22 = c.L[1][1];
      const double direct = l11 * l22 - l12 * l12;
      worst = std::max(worst, std::fabs(direct - c.leading_minor_closed_form) / std::fabs(direct));
    }
    run.pass = worst <= 1e-10;
    run.detail << certs.size() << " certificates, max relative difference = " << fmt("%.3g", worst);
    emit(finish(4, "closed-form leading minor of L matches the direct minor", run));
  }

  // 5. Solver accuracy and observed order on the decoupled logistic case.
  {
    CriterionRun run;
    const ModelParams p = derive_params({1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 3.0, 1.0, 4.0, 4.0});
    const History h = History::constant({0.5, 0.3, 0.2}, p.tau1, p.tau2);
    auto error_at_10 = [&](double step) {
      StepControl sc;
      sc.step = step;
      const Trajectory tr = integrate(p, h, 10.0, sc);
      positivity.push_back(check_positivity_boundedness(tr));
      const Vec3 s = tr.sample(10.0);
      const double x = 1.0 / (1.0 + (1.0 / 0.5 - 1.0) * std::exp(-10.0));
      return std::max({std::fabs(s[0] - x), std::fabs(s[1] - 0.3 * std::exp(-10.0)),
                       std::fabs(s[2] - 0.2 * std::exp(-10.0))});
    };
    const double e_default = error_at_10(0.0);
    const double e1 = error_at_10(0.2), e2 = error_at_10(0.1), e3 = error_at_10(0.05);
    const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    run.pass = e_default <= 1e-8 && o1 >= 3.5 && o2 >= 3.5;
    run.detail << "error(default step) = " << fmt("%.3g", e_default) << ", orders = "
               << fmt("%.3f", o1) << ", " << fmt("%.3f", o2);
    emit(finish(5, "solver error <= 1e-8 and observed order >= 3.5", run));
  }

  // 6 and 7. Envelopes, Gronwall bound and differential inequality.
  std::vector<Admissible> adm;
  for (int i = 0; i < 10; ++i) adm.push_back(make_admissible(g));
  {
    std::vector<EnvelopeCheck> env(adm.size());
    std::vector<InequalityCheck> ineq(adm.size());
    std::vector<PositivityReport> pos(adm.size());
    Sampling sampling;
    sampling.stride = 10;
    sampling.parallel = false;
    kernels::for_each_index(
        adm.size(),
        [&](std::size_t i) {
          const Admissible& a = adm[i];
          const ExtendedHistory ext = extend_history(a.hist, a.p);
          const TheoremReport th = check_initial_conditions(ext, a.cert);
          const Trajectory tr = integrate(a.p, a.hist, 50.0);
          pos[i] = check_positivity_boundedness(tr);
          env[i] = check_envelope(tr, ext, a.cert, th, sampling, estimate_solver_error(tr));
          ineq[i] = check_differential_inequality(tr, ext, a.cert, sampling);
        },
        opts.parallel);
    positivity.insert(positivity.end(), pos.begin(), pos.end());

    CriterionRun r6;
    double worst_env = 1e300, worst_gron = 1e300;
    std::size_t samples = 0;
    for (const auto& e : env) {
      worst_env = std::min({worst_env, e.worst_margin[0] + e.tolerance,
                            e.worst_margin[1] + e.tolerance, e.worst_margin[2] + e.tolerance});
      // Strict Gronwall margin, without the 1e-7 slack.
      worst_gron = std::min(worst_gron, e.worst_gronwall_margin - 1e-7);
      samples += e.samples;
      if (!e.pass) r6.pass = false;
    }
    if (worst_gron < 0.0) r6.pass = false;
    r6.detail << "10 scenarios, " << samples << " samples, min(bound + tol - |dev|) = "
              << fmt("%.3g", worst_env) << ", min Gronwall margin = " << fmt("%.3g", worst_gron);
    emit(finish(6, "exponential envelopes and Gronwall bound hold on admissible runs", r6));

    CriterionRun r7;
    double worst_ineq = 1e300;
    std::size_t strict = 0;
    samples = 0;
    for (const auto& e : ineq) {
      worst_ineq = std::min(worst_ineq, e.worst_margin);
      samples += e.samples;
      strict += e.strict_violations;
      if (!e.pass) r7.pass = false;
    }
    r7.detail << samples << " interior samples, min margin = " << fmt("%.3g", worst_ineq)
              << ", samples failing with zero tolerance = " << strict;
    emit(finish(7, "dV/dt <= -eps V + q V^{3/2} + 1e-5 (1 + |V|)", r7));
  }

  // 8. Quadratic scaling of V0 and monotone margins.
  {
    CriterionRun run;
    double worst = 0.0;
    int not_improved = 0;
    for (const auto& a : adm) {
      const TheoremReport t1 = check_initial_conditions(extend_history(a.hist, a.p), a.cert);
      for (double lam : {0.5, 0.25}) {
        const History hs = a.hist.scaled_about(a.base, lam);
        const TheoremReport ts = check_initial_conditions(extend_history(hs, a.p), a.cert);
        worst = std::max(worst, std::fabs(ts.V0 - lam * lam * t1.V0) / (lam * lam * t1.V0));
        for (std::size_t k = 0; k < 5; ++k) {
          if (!(ts.conditions[k].margin > t1.conditions[k].margin)) ++not_improved;
        }
      }
    }
    run.pass = worst <= 1e-8 && not_improved == 0;
    run.detail << "max relative V0 error = " << fmt("%.3g", worst)
               << ", margins not improved = " << not_improved;
    emit(finish(8, "V0 scales quadratically and margins improve", run));
  }

  // 9. Positivity and the logistic bound across every simulated run, plus
  // adversarial histories with large initial predator densities.
  {
    for (int i = 0; i < 10; ++i) {
      const ModelParams p = derive_params(draw_case(g, 1 + i % 3, 0.05, 1.0));
      const History h = i % 2 == 0
                            ? History::constant({g.uniform(0.01, 3.0), g.uniform(2.0, 20.0),
                                                 g.uniform(2.0, 20.0)},
                                                p.tau1, p.tau2)
                            : History::equilibrium_plus_sine(
                                  {2.0, 10.0, 10.0}, {1.9, 9.0, 9.0}, g.uniform(1.0, 30.0), 0.0,
                                  p.tau1, p.tau2);
      positivity.push_back(check_positivity_boundedness(integrate(p, h, 20.0)));
    }
    CriterionRun run;
    double min_c = 1e300, worst_x = -1e300;
    for (const auto& r : positivity) {
      min_c = std::min({min_c, r.min_component[0], r.min_component[1], r.min_component[2]});
      worst_x = std::max(worst_x, r.observed_sup[0] - r.x_bound);
      if (!r.pass()) run.pass = false;
    }
    run.detail << positivity.size() << " runs, min component = " << fmt("%.3g", min_c)
               << ", max(sup x - bound) = " << fmt("%.3g", worst_x);
    emit(finish(9, "components stay non-negative and x <= max(sup phi, K)", run));
  }
  return results;
}

}  // namespace plk

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gen.hpp"
#include "plk/errors.hpp"
#include "plk/theorem.hpp"

using namespace plk;

namespace {

struct Setup {
  ModelParams p;
  LKCertificate cert;
  Vec3 eq;
};

Setup reference(double tau1 = 0.1) {
  RawParams r = gen::case2();
  r.tau1 = tau1;
  Setup s;
  s.p = derive_params(r);
  s.cert = build_certificate(s.p);
  s.eq = s.cert.lin.equilibrium();
  return s;
}

History offset_history(const Setup& s, const Vec3& offset) {
  return History::equilibrium_plus_constant(s.eq, offset, s.p.tau1, s.p.tau2);
}

}  // namespace

TEST_CASE("extended history is zero outside each window") {
  const Setup s = reference(0.05);
  const History h = History::equilibrium_plus_sine(s.eq + Vec3{0.0, 0.0, 0.1}, {0.01, 0.02, 0.03}, 4.0,
                                                   0.0, s.p.tau1, s.p.tau2);
  const ExtendedHistory ext = extend_history(h, s.p);
  const Vec3 in = ext(-0.03);
  CHECK(in[0] == doctest::Approx(h.phi(-0.03) - s.eq[0]));
  CHECK(in[1] == doctest::Approx(h.psi(-0.03) - s.eq[1]));
  CHECK(in[2] == doctest::Approx(h.eta(-0.03)));
  const Vec3 mid = ext(-0.08);
  CHECK(mid[0] == 0.0);
  CHECK(mid[1] == doctest::Approx(h.psi(-0.08) - s.eq[1]));
  CHECK(ext(-0.5) == Vec3{0.0, 0.0, 0.0});
  CHECK_THROWS_AS((void)ext(1e-9), DomainError);

  RawParams r = gen::case2();
  r.d1 = 10.0;
  CHECK_THROWS_AS((void)extend_history(h, derive_params(r)), DomainError);
}

TEST_CASE("V0 of a constant x offset matches the closed form") {
  const Setup s = reference();
  const LKCertificate& c = s.cert;
  const double delta = 0.003;
  const ExtendedHistory ext = extend_history(offset_history(s, {delta, 0.0, 0.0}), s.p);
  const double g = s.p.e1 * s.p.c1 * c.lin.y0;
  const double expected =
      delta * delta *
      (c.h11 + (c.alpha * g * g + c.mu1 * c.h11) * (1.0 - std::exp(-c.m1 * s.p.tau1)) / c.m1);
  CHECK(eval_V0(ext, c) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS((void)eval_V0(ext, c, 63), DomainError);
  CHECK_THROWS_AS((void)eval_V0(ext, c, 32), DomainError);
}

TEST_CASE("property: V0 is quadratic in the deviation") {
  const Setup s = reference();
  gen::Rng g(5);
  for (int i = 0; i < 30; ++i) {
    const History h = History::equilibrium_plus_sine(s.eq + Vec3{0.0, 0.0, 0.05},
                                                     gen::random_vec(g, -0.05, 0.05),
                                                     g.uniform(0.0, 20.0), g.uniform(0.0, 6.3),
                                                     s.p.tau1, s.p.tau2);
    const double lam = g.uniform(0.1, 3.0);
    const double v = eval_V0(extend_history(h, s.p), s.cert);
    const double vl = eval_V0(extend_history(h.scaled_about(s.eq, lam), s.p), s.cert);
    CHECK(v > 0.0);
    CHECK(vl == doctest::Approx(lam * lam * v).epsilon(1e-11));
  }
}

TEST_CASE("y deviation just above the first window bound fails that condition") {
  const Setup s = reference();
  const ExtendedHistory probe = extend_history(offset_history(s, {0.0, 1e-6, 0.0}), s.p);
  const double bound = check_initial_conditions(probe, s.cert).conditions[0].rhs;

  const TheoremReport over =
      check_initial_conditions(extend_history(offset_history(s, {0.0, 1.01 * bound, 0.0}), s.p), s.cert);
  CHECK_FALSE(over.conditions[0].pass);
  CHECK(over.conditions[0].name == "y_deviation_tau1_window");
  CHECK_FALSE(over.envelopes_valid);
  REQUIRE(over.first_failure() != nullptr);
  CHECK(over.first_failure()->name == "y_deviation_tau1_window");

  const TheoremReport under =
      check_initial_conditions(extend_history(offset_history(s, {0.0, 0.99 * bound, 0.0}), s.p), s.cert);
  CHECK(under.conditions[0].pass);
  CHECK(under.conditions[0].lhs == doctest::Approx(0.99 * bound));
  REQUIRE(under.analytic_dev_tau1.has_value());

  std::ostringstream os;
  write_theorem_report(os, over);
  CHECK(os.str().find("first failed condition y_deviation_tau1_window") != std::string::npos);
}

TEST_CASE("envelope and Gronwall bound on a hand-built certificate") {
  LKCertificate c;
  c.h11 = c.h22 = c.h33 = 1.0;
  c.h12 = 0.0;
  c.epsilon = 0.2;
  c.q = 1.0;  // q/eps * sqrt(V0) = 0.5 at V0 = 0.01
  for (double t : {0.0, 1.0, 7.5}) {
    const Envelope e = predicted_envelope(c, 0.01, t);
    const double expected = 0.2 * std::exp(-c.epsilon * t / 2.0);
    CHECK(e.bx == doctest::Approx(expected).epsilon(1e-15));
    CHECK(e.by == doctest::Approx(expected).epsilon(1e-15));
    CHECK(e.bz == doctest::Approx(expected).epsilon(1e-15));
    CHECK(gronwall_bound(c, 0.01, t) == doctest::Approx(0.04 * std::exp(-c.epsilon * t)).epsilon(1e-15));
  }
  CHECK_THROWS_AS((void)predicted_envelope(c, 0.04, 0.0), DomainError);
  CHECK_THROWS_AS((void)gronwall_bound(c, 0.05, 0.0), DomainError);
}

TEST_CASE("V along the solution starts at V0 and stays under the Gronwall bound") {
  const Setup s = reference();
  const History h = History::equilibrium_plus_sine(s.eq + Vec3{0.0, 0.0, 1e-4}, {1e-4, 1e-4, 5e-5},
                                                   6.0, 0.7, s.p.tau1, s.p.tau2);
  const ExtendedHistory ext = extend_history(h, s.p);
  const TheoremReport rep = check_initial_conditions(ext, s.cert);
  REQUIRE(rep.envelopes_valid);
  const Trajectory tr = integrate(s.p, h, 20.0);
  CHECK(eval_V_along(tr, ext, s.cert, 0.0) == eval_V0(ext, s.cert));
  CHECK_THROWS_AS((void)eval_V_along(tr, ext, s.cert, 20.5), DomainError);

  Sampling smp;
  smp.stride = 50;
  const EnvelopeCheck env = check_envelope(tr, ext, s.cert, rep, smp, estimate_solver_error(tr));
  CHECK(env.pass);
  CHECK(env.gronwall_pass);
  CHECK(env.samples == env.times.size());
  CHECK(env.times.front() > 0.0);
  CHECK(env.times.back() == tr.t_end());
  for (std::size_t i = 0; i < env.V.size(); ++i) {
    CHECK(env.V[i] <= gronwall_bound(s.cert, rep.V0, env.times[i]) * (1.0 + 1e-9));
  }

  const InequalityCheck ineq = check_differential_inequality(tr, ext, s.cert, smp);
  CHECK(ineq.pass);
  CHECK(ineq.strict_violations == 0);
  CHECK(ineq.samples > 0);

  std::ostringstream os;
  write_verification_csv(os, tr, s.cert, rep, env.times, env.V);
  CHECK(os.str().rfind("t,x,y,z,V,bound_x", 0) == 0);
  CHECK(os.str().find("nan") == std::string::npos);
}

TEST_CASE("inadmissible data gives nan bounds and refuses the envelope check") {
  const Setup s = reference();
  const History h = offset_history(s, {0.0, 0.3, 0.0});
  const ExtendedHistory ext = extend_history(h, s.p);
  const TheoremReport rep = check_initial_conditions(ext, s.cert);
  REQUIRE_FALSE(rep.envelopes_valid);
  const Trajectory tr = integrate(s.p, h, 1.0);
  CHECK_THROWS_AS((void)check_envelope(tr, ext, s.cert, rep, {}, 0.0), DomainError);
  std::ostringstream os;
  write_verification_csv(os, tr, s.cert, rep, {0.5}, {eval_V_along(tr, ext, s.cert, 0.5)});
  CHECK(os.str().find("nan") != std::string::npos);
}

TEST_CASE("differential inequality is stable under step halving") {
  const Setup s = reference();
  const History h = History::equilibrium_plus_sine(s.eq + Vec3{0.0, 0.0, 2e-4}, {2e-4, -1e-4, 1e-4},
                                                   3.0, 0.0, s.p.tau1, s.p.tau2);
  const ExtendedHistory ext = extend_history(h, s.p);
  REQUIRE(check_initial_conditions(ext, s.cert).envelopes_valid);
  Sampling smp;
  smp.stride = 40;
  StepControl sc;
  sc.step = 0.001;
  const InequalityCheck coarse =
      check_differential_inequality(integrate(s.p, h, 5.0, sc), ext, s.cert, smp);
  sc.step = 0.0005;
  smp.stride = 80;
  const InequalityCheck fine = check_differential_inequality(integrate(s.p, h, 5.0, sc), ext, s.cert, smp);
  CHECK(coarse.pass);
  CHECK(fine.pass);
  CHECK(fine.strict_violations <= coarse.strict_violations);
}

TEST_CASE("property: admissible random histories satisfy every estimate") {
  gen::Rng g(909);
  const Setup s = reference();
  int checked = 0;
  for (int i = 0; i < 6; ++i) {
    Vec3 amp = gen::random_vec(g, -1.0, 1.0);
    amp[2] = std::abs(amp[2]);
    History h = History::equilibrium_plus_sine(s.eq + Vec3{0.0, 0.0, amp[2]}, amp, g.uniform(0.5, 10.0),
                                               0.0, s.p.tau1, s.p.tau2);
    while (!check_initial_conditions(extend_history(h, s.p), s.cert).envelopes_valid) {
      h = h.scaled_about(s.eq, 0.5);
    }
    const ExtendedHistory ext = extend_history(h, s.p);
    const TheoremReport rep = check_initial_conditions(ext, s.cert);
    const Trajectory tr = integrate(s.p, h, 10.0);
    Sampling smp;
    smp.stride = 100;
    CHECK(check_envelope(tr, ext, s.cert, rep, smp, estimate_solver_error(tr)).pass);
    CHECK(check_differential_inequality(tr, ext, s.cert, smp).pass);
    ++checked;
  }
  CHECK(checked == 6);
}

#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "plk/errors.hpp"
#include "plk/spectrum.hpp"

using namespace plk;

TEST_CASE("eval_Q at distinguished points") {
  const ModelParams p = derive_params(gen::case2());
  const LinearizedSystem lin = linearize(p);
  const double a = p.r * lin.x0 / p.K;
  CHECK(std::abs(eval_Q(cplx(-a, 0.0), lin, p)) > 1e-3);

  const QFactors f0 = eval_factors(0.0, lin, p);
  CHECK(f0.q2.real() == doctest::Approx(p.d2 - p.e2 * p.c2 * lin.y0).epsilon(1e-15));
  CHECK(f0.q1.real() == doctest::Approx(p.c1 * p.d1 * lin.y0).epsilon(1e-14));
  const cplx q0 = eval_Q(0.0, lin, p);
  CHECK(std::abs(q0 - f0.q1 * f0.q2) <= 1e-14);
}

TEST_CASE("property: factorization and conjugate symmetry") {
  gen::Rng g(17);
  int checked = 0;
  for (int s = 0; s < 20; ++s) {
    const ModelParams p = derive_params(gen::stable(g, 0.0, 1.0));
    const LinearizedSystem lin = linearize(p);
    const CharacteristicFunction q(lin, p);
    for (int i = 0; i < 60; ++i, ++checked) {
      const cplx z(g.uniform(-3.0, 3.0), g.uniform(-10.0, 10.0));
      const cplx direct = q.eval(z);
      CHECK(std::abs(direct - q.q1(z) * q.q2(z)) <= 1e-10 * (1.0 + std::abs(direct)));
      CHECK(std::abs(q.eval(std::conj(z)) - std::conj(direct)) <= 1e-12 * (1.0 + std::abs(direct)));
    }
  }
  CHECK(checked >= 1000);
}

TEST_CASE("derivative matches a central difference") {
  const ModelParams p = derive_params(gen::case2());
  const CharacteristicFunction q(linearize(p), p);
  gen::Rng g(4);
  for (int i = 0; i < 50; ++i) {
    const cplx z(g.uniform(-2.0, 2.0), g.uniform(-5.0, 5.0));
    const double h = 1e-5;
    const cplx fd = (q.eval(z + h) - q.eval(z - h)) / (2.0 * h);
    CHECK(std::abs(fd - q.derivative(z)) <= 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("lemma_classify examples") {
  const ModelParams p2 = derive_params(gen::case2());
  const StabilityVerdict v2 = lemma_classify(p2);
  CHECK(v2.kind == StabilityKind::AsymptoticallyStable);
  const double up = p2.e1 * p2.c1 * p2.K;
  CHECK(up * std::max(1.0 / 3.0, 1.0 - p2.c1 * p2.d2 / (p2.e2 * p2.c2 * p2.r)) < p2.d1);
  CHECK(p2.d1 < up);

  CHECK(lemma_classify(derive_params(gen::case3())).kind == StabilityKind::Unstable);

  RawParams r = gen::case2();
  r.d1 = 0.5;
  const ModelParams pg = derive_params(r);
  const StabilityVerdict vg = lemma_classify(pg);
  CHECK(vg.kind == StabilityKind::DelayDependent);
  CHECK(pg.d1 < pg.e1 * pg.c1 * pg.K / 3.0);

  r.d1 = 10.0;
  CHECK_THROWS_AS((void)lemma_classify(derive_params(r)), DomainError);
}

TEST_CASE("root_scan corroborates the stable reference set on the fixed region") {
  const ModelParams p = derive_params(gen::case2());
  RootScanOptions o;
  o.region = Region{-10.0, 1.0, -50.0, 50.0};
  const RootReport rr = root_scan(linearize(p), p, o);
  CHECK(rr.complete);
  CHECK(rr.rightmost_real_part < 0.0);
  for (const auto& root : rr.roots) CHECK(root.residual <= 1e-9);
}

TEST_CASE("root_scan without delays returns the eigenvalues of A + B1 + B2") {
  const ModelParams p = derive_params(gen::case3());
  const LinearizedSystem lin = linearize(p);
  const RootReport rr = root_scan(lin, p);
  // Block-triangular: -d2 + e2 c2 y0 and the roots of l^2 + a l + c1 d1 y0.
  const double a = p.r * lin.x0 / p.K;
  const double c = p.c1 * p.d1 * lin.y0;
  const cplx disc = std::sqrt(cplx(a * a - 4.0 * c, 0.0));
  const cplx expected[3] = {(-a + disc) / 2.0, (-a - disc) / 2.0,
                            cplx(-p.d2 + p.e2 * p.c2 * lin.y0, 0.0)};
  REQUIRE(rr.roots.size() == 3);
  CHECK(rr.total_winding == 3);
  for (const cplx& e : expected) {
    double best = 1e300;
    for (const auto& root : rr.roots) best = std::min(best, std::abs(root.lambda - e));
    CHECK(best <= 1e-8);
  }
  CHECK(rr.rightmost_real_part > 0.0);
}

TEST_CASE("winding_number and newton_polish near a known root") {
  const ModelParams p = derive_params(gen::case3());
  const CharacteristicFunction q(linearize(p), p);
  const double root = -p.d2 + p.e2 * p.c2 * q.linearization().y0;
  CHECK(winding_number(q, {root - 0.1, root + 0.13, -0.07, 0.11}) == 1);
  CHECK(winding_number(q, {root + 0.2, root + 0.3, -0.07, 0.11}) == 0);
  const auto z = newton_polish(q, cplx(root + 0.05, 0.01));
  REQUIRE(z.has_value());
  CHECK(std::abs(*z - root) <= 1e-12);
}

TEST_CASE("root_scan rejects bad grids") {
  const ModelParams p = derive_params(gen::case2());
  RootScanOptions o;
  o.nx = 4;
  CHECK_THROWS_AS((void)root_scan(linearize(p), p, o), DomainError);
  o.nx = 16;
  o.region = Region{1.0, -1.0, -1.0, 1.0};
  CHECK_THROWS_AS((void)root_scan(linearize(p), p, o), DomainError);
}

TEST_CASE("property: verdicts and roots agree") {
  gen::Rng g(31);
  for (int i = 0; i < 8; ++i) {
    const ModelParams ps = derive_params(gen::stable(g, 0.01, 1.5));
    REQUIRE(lemma_classify(ps).kind == StabilityKind::AsymptoticallyStable);
    const RootReport rs = root_scan(linearize(ps), ps);
    CHECK(rs.rightmost_real_part < 0.0);
    for (const auto& root : rs.roots) CHECK(root.residual <= 1e-9);
    for (const auto& root : rs.loose_roots) CHECK(root.scaled_residual <= 1e-12);

    const ModelParams pu = derive_params(gen::unstable(g, 0.01, 1.5));
    REQUIRE(lemma_classify(pu).kind == StabilityKind::Unstable);
    const RootReport ru = root_scan(linearize(pu), pu);
    REQUIRE_FALSE(ru.roots.empty());
    CHECK(ru.roots.front().lambda.real() > 0.0);
    // The positive root comes from the fish factor.
    const CharacteristicFunction q(linearize(pu), pu);
    CHECK(std::abs(q.q2(ru.roots.front().lambda)) <= 1e-9);
  }
}

#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "gen.hpp"
#include "plk/errors.hpp"
#include "plk/model.hpp"

using namespace plk;

TEST_CASE("derive_params computes efficiencies and delay extremes") {
  RawParams r = gen::case2();
  r.tau1 = 0.0;
  CHECK(derive_params(r).e1 == 3.0);

  r.tau1 = 0.1;
  const ModelParams p = derive_params(r);
  CHECK(p.e1 == 3.0 * std::exp(-0.1));
  CHECK(p.e2 == 1.0 * std::exp(-0.1));

  r.tau2 = 0.2;
  const ModelParams q = derive_params(r);
  CHECK(q.tau_max == 0.2);
  CHECK(q.tau_min == 0.1);
}

TEST_CASE("derive_params names the offending field") {
  const auto message = [](RawParams r) {
    try {
      (void)derive_params(r);
    } catch (const DomainError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  RawParams r = gen::case2();
  r.K = 0.0;
  CHECK(message(r).find("K") != std::string::npos);
  r = gen::case2();
  r.tau2 = -0.1;
  CHECK(message(r).find("tau2") != std::string::npos);
  r = gen::case2();
  r.c1 = std::numeric_limits<double>::quiet_NaN();
  CHECK(message(r).find("c1") != std::string::npos);
  r = gen::case2();
  r.d2 = std::numeric_limits<double>::infinity();
  CHECK(message(r).find("d2") != std::string::npos);
}

TEST_CASE("rhs examples") {
  const ModelParams p = derive_params(gen::case2());
  const Vec3 k{p.K, 0.0, 0.0};
  CHECK(max_abs(rhs(k, k, k, p)) == 0.0);

  const PlanktonPoint pt = plankton_only_point(p);
  const Vec3 e{pt.x0, pt.y0, 0.0};
  CHECK(max_abs(rhs(e, e, e, p)) <= 1e-15);

  RawParams r = gen::case2();
  r.c1 = 0.0;
  r.c2 = 0.0;
  const ModelParams d = derive_params(r);
  const Vec3 s{d.K / 2.0, 1.0, 1.0};
  const Vec3 f = rhs(s, {9.0, 9.0, 9.0}, {7.0, 7.0, 7.0}, d);
  CHECK(f[0] == doctest::Approx(d.r * d.K / 4.0));
  CHECK(f[1] == -d.d1);
  CHECK(f[2] == -d.d2);
}

TEST_CASE("classify_equilibria examples") {
  RawParams r = gen::case2();
  r.c1 = 0.0;
  const EquilibriumSet none = classify_equilibria(derive_params(r));
  CHECK(none.case_id == 1);
  REQUIRE(none.points.size() == 2);
  CHECK(none.points[0].label == EquilibriumLabel::Extinction);
  CHECK(none.points[1].point == Vec3{1.0, 0.0, 0.0});

  const ModelParams p2 = derive_params(gen::case2());
  const EquilibriumSet two = classify_equilibria(p2);
  CHECK(two.case_id == 2);
  REQUIRE(two.points.size() == 3);
  const double x0 = 1.5 / (3.0 * std::exp(-0.1));
  CHECK(two.points[2].point[0] == doctest::Approx(x0).epsilon(1e-15));
  CHECK(two.points[2].point[1] == doctest::Approx(1.0 - x0).epsilon(1e-14));
  const PlanktonPoint pt = plankton_only_point(p2);
  CHECK(two.points[2].point[0] == pt.x0);
  CHECK(two.points[2].point[1] == pt.y0);

  const EquilibriumSet three = classify_equilibria(derive_params(gen::case3()));
  CHECK(three.case_id == 3);
  REQUIRE(three.points.size() == 4);
  CHECK(three.points[3].label == EquilibriumLabel::Coexistence);
  CHECK(three.points[3].point[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(three.points[3].point[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(three.points[3].point[2] == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("boundary d1 = e1 c1 K is case 2 with y0 = 0") {
  RawParams r = gen::case2();
  r.tau1 = 0.0;
  r.d1 = r.b1 * r.c1 * r.K;
  const ModelParams p = derive_params(r);
  const EquilibriumSet eq = classify_equilibria(p);
  CHECK(eq.case_id == 2);
  CHECK(plankton_only_point(p).y0 == 0.0);

  const LinearizedSystem lin = linearize(p);
  CHECK(lin.B1[1][0] == 0.0);
  CHECK(lin.B2[2][2] == 0.0);
  CHECK(lin.A[1][2] == 0.0);
}

TEST_CASE("no fish predation makes coexistence impossible") {
  RawParams r = gen::case2();
  r.c2 = 0.0;
  r.d1 = 0.01;
  const EquilibriumSet eq = classify_equilibria(derive_params(r));
  CHECK(eq.case_id == 2);
}

TEST_CASE("plankton_only_point examples and preconditions") {
  const ModelParams p = derive_params({1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0});
  const PlanktonPoint pt = plankton_only_point(p);
  CHECK(pt.x0 == 1.0);
  CHECK(pt.y0 == 0.5);

  RawParams r = gen::case2();
  r.c1 = 0.0;
  CHECK_THROWS_WITH_AS((void)plankton_only_point(derive_params(r)), doctest::Contains("e1*c1 > 0"),
                       DomainError);
  r = gen::case2();
  r.d1 = 10.0;
  CHECK_THROWS_WITH_AS((void)plankton_only_point(derive_params(r)), doctest::Contains("d1 <= e1*c1*K"),
                       DomainError);
}

TEST_CASE("linearize structure") {
  const ModelParams p = derive_params(gen::case2());
  const LinearizedSystem lin = linearize(p);
  const double y0 = plankton_only_point(p).y0;
  CHECK(lin.B2[2][2] == p.e2 * p.c2 * y0);
  CHECK(lin.A[0][1] == -p.d1 / p.e1);
  CHECK(lin.A[1][2] == -p.c2 * y0);
  CHECK(lin.A[0][0] == -p.r * lin.x0 / p.K);
  CHECK(lin.A[1][1] == -p.d1);
  CHECK(lin.A[2][2] == -p.d2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(lin.A[i][j] == 0.0);
  CHECK(lin.B1[1][0] == p.e1 * p.c1 * y0);
  CHECK(lin.B1[1][1] == p.d1);

  gen::Rng g(11);
  for (int i = 0; i < 50; ++i) {
    const ModelParams q = derive_params(gen::stable(g));
    const LinearizedSystem l = linearize(q);
    const Mat3 s = l.A + l.B1 + l.B2;
    CHECK(s[2][0] == 0.0);
    CHECK(s[2][1] == 0.0);
    CHECK(s[2][2] == -q.d2 + q.e2 * q.c2 * l.y0);
  }
}

TEST_CASE("eval_nonlinear examples") {
  const ModelParams p = derive_params(gen::case2());
  const NonlinearTerms zero = eval_nonlinear({}, {}, {}, p);
  CHECK(max_abs(zero.F) == 0.0);
  CHECK(max_abs(zero.G1) == 0.0);
  CHECK(max_abs(zero.G2) == 0.0);

  const NonlinearTerms t = eval_nonlinear({}, {0.3, -0.2, 5.0}, {}, p);
  CHECK(t.G1 == Vec3{0.0, p.e1 * p.c1 * 0.3 * -0.2, 0.0});
}

TEST_CASE("property: shifted linear part plus remainder reproduces rhs") {
  gen::Rng g(2024);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const ModelParams p = derive_params(gen::stable(g, 0.0, 1.0));
    const LinearizedSystem lin = linearize(p);
    const Vec3 eq = lin.equilibrium();
    const Vec3 u = gen::random_vec(g, -1.0, 1.0);
    const Vec3 u1 = gen::random_vec(g, -1.0, 1.0);
    const Vec3 u2 = gen::random_vec(g, -1.0, 1.0);
    const NonlinearTerms nl = eval_nonlinear(u, u1, u2, p);
    const Vec3 shifted = lin.A * u + lin.B1 * u1 + lin.B2 * u2 + nl.F + nl.G1 + nl.G2;
    const Vec3 direct = rhs(eq + u, eq + u1, eq + u2, p);
    worst = std::max(worst, max_abs(shifted - direct));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("property: equilibria zero the rhs, counts follow the case") {
  gen::Rng g(7);
  for (int i = 0; i < 300; ++i) {
    RawParams r = gen::base(g);
    if (i % 4 == 0) r.d1 = gen::upper(r) * g.uniform(0.0, 1.0);
    const ModelParams p = derive_params(r);
    const EquilibriumSet eq = classify_equilibria(p);
    CHECK(eq.points.size() == static_cast<std::size_t>(eq.case_id + 1));
    for (const auto& e : eq.points) {
      for (double c : e.point) CHECK(c >= 0.0);
      CHECK(max_abs(rhs(e.point, e.point, e.point, p)) <= 1e-12);
    }
    const int expect = r.d1 > gen::upper(r) ? 1 : (r.d1 >= gen::lower(r) ? 2 : 3);
    CHECK(eq.case_id == expect);
  }
}

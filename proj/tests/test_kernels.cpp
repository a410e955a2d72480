#include <doctest.h>

#include <cstring>
#include <stdexcept>

#include "gen.hpp"
#include "plk/kernels.hpp"
#include "plk/theorem.hpp"

using namespace plk;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("cell windings: serial and parallel agree") {
  gen::Rng g(3);
  for (int i = 0; i < 4; ++i) {
    const ModelParams p = derive_params(i % 2 ? gen::stable(g) : gen::unstable(g));
    const LinearizedSystem lin = linearize(p);
    const CharacteristicFunction q(lin, p);
    const Region r = default_region(lin, p);
    std::vector<Region> cells;
    const int nx = 8, ny = 16;
    for (int a = 0; a < nx; ++a)
      for (int b = 0; b < ny; ++b) {
        const double x0 = r.re_min + (r.re_max - r.re_min) * a / nx + 1e-7;
        const double y0 = r.im_min + (r.im_max - r.im_min) * b / ny + 1.3e-7;
        cells.push_back({x0, x0 + (r.re_max - r.re_min) / nx, y0, y0 + (r.im_max - r.im_min) / ny});
      }
    CHECK(kernels::cell_windings_serial(q, cells) == kernels::cell_windings_parallel(q, cells));
  }
}

TEST_CASE("root_scan is identical with and without threads") {
  const ModelParams p = derive_params(gen::case2());
  RootScanOptions o;
  o.parallel = false;
  const RootReport s = root_scan(linearize(p), p, o);
  o.parallel = true;
  const RootReport t = root_scan(linearize(p), p, o);
  REQUIRE(s.roots.size() == t.roots.size());
  for (std::size_t i = 0; i < s.roots.size(); ++i) CHECK(s.roots[i].lambda == t.roots[i].lambda);
  CHECK(same_bits(s.rightmost_real_part, t.rightmost_real_part));
}

TEST_CASE("V along a trajectory: serial and parallel agree bitwise") {
  const ModelParams p = derive_params(gen::case2());
  const LKCertificate c = build_certificate(p);
  const History h = History::equilibrium_plus_sine(c.lin.equilibrium() + Vec3{0, 0, 0.01},
                                                   {0.01, -0.01, 0.01}, 5.0, 0.2, p.tau1, p.tau2);
  const ExtendedHistory ext = extend_history(h, p);
  const Trajectory tr = integrate(p, h, 5.0);
  const std::vector<double> times = sample_times(tr, 7);
  const auto a = kernels::v_along_serial(tr, ext, c, times, 128);
  const auto b = kernels::v_along_parallel(tr, ext, c, times, 128);
  REQUIRE(a.size() == b.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mismatches += same_bits(a[i], b[i]) ? 0 : 1;
  CHECK(mismatches == 0);
}

TEST_CASE("for_each_index visits every index and rethrows the lowest failure") {
  for (bool par : {false, true}) {
    std::vector<int> hits(1000, 0);
    kernels::for_each_index(hits.size(), [&](std::size_t i) { hits[i] += 1; }, par);
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
    try {
      kernels::for_each_index(
          200,
          [](std::size_t i) {
            if (i % 50 == 17) throw std::runtime_error(std::to_string(i));
          },
          par);
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
  CHECK(kernels::max_threads() >= 1);
}

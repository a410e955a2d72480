// Serial vs OpenMP timings of the two data-parallel kernels.  Exits nonzero
// if the two versions disagree in any bit.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "plk/kernels.hpp"
#include "plk/theorem.hpp"

using namespace plk;

namespace {

template <class F>
double seconds(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

bool identical(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main() {
  const ModelParams p = derive_params({1.0, 1.0, 1.0, 1.0, 1.5, 1.0, 3.0, 1.0, 0.1, 0.1});
  const LinearizedSystem lin = linearize(p);
  const CharacteristicFunction q(lin, p);
  const Region r = default_region(lin, p);
  std::vector<Region> cells;
  const int nx = 32, ny = 64;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double x0 = r.re_min + (r.re_max - r.re_min) * i / nx + 1e-7;
      const double y0 = r.im_min + (r.im_max - r.im_min) * j / ny + 1.3e-7;
      cells.push_back({x0, x0 + (r.re_max - r.re_min) / nx, y0, y0 + (r.im_max - r.im_min) / ny});
    }

  std::vector<std::optional<int>> ws, wp;
  const double tws = seconds([&] { ws = kernels::cell_windings_serial(q, cells); }, 3);
  const double twp = seconds([&] { wp = kernels::cell_windings_parallel(q, cells); }, 3);

  const LKCertificate cert = build_certificate(p);
  const History h = History::equilibrium_plus_sine(lin.equilibrium() + Vec3{0, 0, 1e-3},
                                                   {1e-3, 1e-3, 1e-3}, 4.0, 0.0, p.tau1, p.tau2);
  const ExtendedHistory ext = extend_history(h, p);
  const Trajectory tr = integrate(p, h, 50.0);
  const std::vector<double> times = sample_times(tr, 10);
  std::vector<double> vs, vp;
  const double tvs = seconds([&] { vs = kernels::v_along_serial(tr, ext, cert, times, 128); }, 3);
  const double tvp = seconds([&] { vp = kernels::v_along_parallel(tr, ext, cert, times, 128); }, 3);

  const bool same_w = ws == wp;
  const bool same_v = identical(vs, vp);
  std::printf("threads %d\n", kernels::max_threads());
  std::printf("%-14s %8s %12s %12s %8s %s\n", "kernel", "items", "serial_s", "parallel_s", "speedup",
              "identical");
  std::printf("%-14s %8zu %12.4f %12.4f %8.2f %s\n", "cell_windings", cells.size(), tws, twp,
              tws / twp, same_w ? "yes" : "NO");
  std::printf("%-14s %8zu %12.4f %12.4f %8.2f %s\n", "v_along", times.size(), tvs, tvp, tvs / tvp,
              same_v ? "yes" : "NO");
  return same_w && same_v ? 0 : 1;
}

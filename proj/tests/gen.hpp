#pragma once

// Hand-rolled generators for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "plk/model.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53);
  }
  int index(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }
  bool coin() { return (eng_() & 1) != 0; }

 private:
  std::mt19937_64 eng_;
};

inline plk::RawParams base(Rng& g, double tau_lo = 0.0, double tau_hi = 0.5) {
  plk::RawParams r;
  r.r = g.uniform(0.5, 3.0);
  r.K = g.uniform(0.5, 3.0);
  r.c1 = g.uniform(0.2, 2.0);
  r.c2 = g.uniform(0.2, 2.0);
  r.b1 = g.uniform(1.0, 5.0);
  r.b2 = g.uniform(0.5, 4.0);
  r.d2 = g.uniform(0.2, 2.0);
  r.d1 = g.uniform(0.1, 2.0);
  r.tau1 = g.uniform(tau_lo, tau_hi);
  r.tau2 = g.uniform(tau_lo, tau_hi);
  return r;
}

inline double upper(const plk::RawParams& r) {
  return r.b1 * std::exp(-r.c1 * r.tau1) * r.c1 * r.K;
}

inline double lower(const plk::RawParams& r) {
  const double e2 = r.b2 * std::exp(-r.c2 * r.tau2);
  return upper(r) * (1.0 - r.c1 * r.d2 / (e2 * r.c2 * r.r));
}

/// d1 strictly inside (e1 c1 K max{1/3, lower/upper}, e1 c1 K).
inline plk::RawParams stable(Rng& g, double tau_lo = 0.01, double tau_hi = 0.5) {
  plk::RawParams r = base(g, tau_lo, tau_hi);
  const double lo = std::max(upper(r) / 3.0, lower(r));
  r.d1 = lo + g.uniform(0.05, 0.95) * (upper(r) - lo);
  return r;
}

inline plk::RawParams unstable(Rng& g, double tau_lo = 0.01, double tau_hi = 0.5) {
  plk::RawParams r = base(g, tau_lo, tau_hi);
  const double e2 = r.b2 * std::exp(-r.c2 * r.tau2);
  if (r.c1 * r.d2 >= e2 * r.c2 * r.r) r.d2 = g.uniform(0.1, 0.9) * e2 * r.c2 * r.r / r.c1;
  r.d1 = lower(r) * g.uniform(0.1, 0.9);
  return r;
}

/// Parameters of the reference plankton-only regime used across tests.
inline plk::RawParams case2() { return {1.0, 1.0, 1.0, 1.0, 1.5, 1.0, 3.0, 1.0, 0.1, 0.1}; }

/// Coexistence regime without delays.
inline plk::RawParams case3() { return {2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, 2.0, 0.0, 0.0}; }

inline plk::Vec3 random_vec(Rng& g, double lo, double hi) {
  return {g.uniform(lo, hi), g.uniform(lo, hi), g.uniform(lo, hi)};
}

}  // namespace gen

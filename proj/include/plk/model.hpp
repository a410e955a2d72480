#pragma once

#include <string>
#include <vector>

#include "plk/linalg3.hpp"

namespace plk {

/// Raw biological inputs of the plankton-fish system as a user supplies them.
struct RawParams {
  double r = 0.0;     // phytoplankton intrinsic growth rate
  double K = 0.0;     // phytoplankton carrying capacity
  double c1 = 0.0;    // zooplankton predation rate
  double c2 = 0.0;    // fish predation rate
  double d1 = 0.0;    // zooplankton mortality
  double d2 = 0.0;    // fish mortality
  double b1 = 0.0;    // zooplankton birth rate
  double b2 = 0.0;    // fish birth rate
  double tau1 = 0.0;  // zooplankton maturation delay
  double tau2 = 0.0;  // fish maturation delay
};

/// Validated parameters together with the derived conversion efficiencies
/// e1 = b1 exp(-c1 tau1), e2 = b2 exp(-c2 tau2) and the delay extremes.
/// Obtain through derive_params().
struct ModelParams {
  double r = 0.0, K = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double d1 = 0.0, d2 = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double tau1 = 0.0, tau2 = 0.0;
  double e1 = 0.0, e2 = 0.0;
  double tau_max = 0.0, tau_min = 0.0;

  [[nodiscard]] RawParams raw() const noexcept {
    return {r, K, c1, c2, d1, d2, b1, b2, tau1, tau2};
  }
};

/// Throws DomainError naming the offending field on non-finite or
/// sign-violating input.
[[nodiscard]] ModelParams derive_params(const RawParams& raw);

/// Right-hand side of the two-delay system.  `delayed1` is the state at
/// t - tau1, `delayed2` the state at t - tau2.
[[nodiscard]] Vec3 rhs(const Vec3& current, const Vec3& delayed1,
                       const Vec3& delayed2, const ModelParams& p) noexcept;

enum class EquilibriumLabel { Extinction, PhytoOnly, PlanktonOnly, Coexistence };

[[nodiscard]] const char* to_string(EquilibriumLabel label) noexcept;

struct Equilibrium {
  EquilibriumLabel label;
  Vec3 point;
};

/// Non-negative equilibria.  case_id is 1 (extinction + phyto-only),
/// 2 (adds the plankton-only point) or 3 (adds coexistence).
struct EquilibriumSet {
  int case_id = 1;
  std::vector<Equilibrium> points;
};

/// Bounds on d1 separating the three equilibrium regimes:
/// upper = e1 c1 K, lower = e1 c1 K (1 - c1 d2 / (e2 c2 r)).
/// lower is -inf when e2 c2 = 0; both are 0 when e1 c1 = 0.
struct CaseThresholds {
  double upper = 0.0;
  double lower = 0.0;
};

[[nodiscard]] CaseThresholds case_thresholds(const ModelParams& p) noexcept;

/// d1 > upper -> case 1; lower <= d1 <= upper -> case 2 (d1 == upper gives
/// y0 = 0); d1 < lower -> case 3.
[[nodiscard]] EquilibriumSet classify_equilibria(const ModelParams& p);

struct PlanktonPoint {
  double x0 = 0.0;
  double y0 = 0.0;
};

/// (x0, y0) = (d1/(e1 c1), (r/c1)(1 - d1/(e1 c1 K))).
/// Requires e1 c1 > 0 and d1 <= e1 c1 K, else DomainError.
[[nodiscard]] PlanktonPoint plankton_only_point(const ModelParams& p);

/// Linearization about (x0, y0, 0) in shifted coordinates
/// (x - x0, y - y0, z):  y' = A y + B1 y(t - tau1) + B2 y(t - tau2) + h.o.t.
struct LinearizedSystem {
  Mat3 A{};
  Mat3 B1{};
  Mat3 B2{};
  double x0 = 0.0;
  double y0 = 0.0;

  [[nodiscard]] Vec3 equilibrium() const noexcept { return {x0, y0, 0.0}; }
};

[[nodiscard]] LinearizedSystem linearize(const ModelParams& p);

/// Quadratic remainder of the shifted system: F acts on the current shifted
/// state, G1 and G2 on the states delayed by tau1 and tau2.
struct NonlinearTerms {
  Vec3 F{};
  Vec3 G1{};
  Vec3 G2{};
};

[[nodiscard]] NonlinearTerms eval_nonlinear(const Vec3& current,
                                            const Vec3& delayed1,
                                            const Vec3& delayed2,
                                            const ModelParams& p) noexcept;

}  // namespace plk

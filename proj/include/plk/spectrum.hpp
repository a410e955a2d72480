#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plk/model.hpp"

namespace plk {

using cplx = std::complex<double>;

/// Characteristic quasi-polynomial of the linearization about the
/// plankton-only point,  Q(l) = det(l I - A - e^{-l tau1} B1 - e^{-l tau2} B2),
/// together with its factorization Q = Q1 * Q2.
class CharacteristicFunction {
 public:
  CharacteristicFunction(const LinearizedSystem& lin, const ModelParams& p);

  /// Direct 3x3 complex determinant.
  [[nodiscard]] cplx eval(cplx lambda) const noexcept;
  [[nodiscard]] cplx q1(cplx lambda) const noexcept;
  [[nodiscard]] cplx q2(cplx lambda) const noexcept;
  /// Q' by the product rule over Q1 * Q2.
  [[nodiscard]] cplx derivative(cplx lambda) const noexcept;
  /// Sum of the moduli of the terms of Q1 times that of Q2; the size of the
  /// rounding error in eval() scales with it.
  [[nodiscard]] double term_scale(cplx lambda) const noexcept;

  [[nodiscard]] const LinearizedSystem& linearization() const noexcept { return lin_; }

 private:
  LinearizedSystem lin_;
  double tau1_;
  double tau2_;
  double a_;      // r x0 / K
  double d1_;
  double c1d1y0_;
  double d2_;
  double g2_;     // e2 c2 y0
};

[[nodiscard]] cplx eval_Q(cplx lambda, const LinearizedSystem& lin, const ModelParams& p);

struct QFactors {
  cplx q1;
  cplx q2;
};

[[nodiscard]] QFactors eval_factors(cplx lambda, const LinearizedSystem& lin,
                                    const ModelParams& p);

enum class StabilityKind { AsymptoticallyStable, Unstable, DelayDependent };

[[nodiscard]] const char* to_string(StabilityKind kind) noexcept;

struct StabilityVerdict {
  StabilityKind kind = StabilityKind::DelayDependent;
  std::string witness;
  /// Open d1-interval in which the plankton-only point is stable for
  /// every delay: (e1 c1 K max{1/3, 1 - c1 d2/(e2 c2 r)}, e1 c1 K).
  double stable_lower = 0.0;
  double stable_upper = 0.0;
  /// d1 below this value is unstable for every delay.
  double unstable_upper = 0.0;
};

/// Delay-independent classification of the plankton-only point.  Requires
/// e1 c1 > 0 and d1 <= e1 c1 K (DomainError otherwise).
[[nodiscard]] StabilityVerdict lemma_classify(const ModelParams& p);

struct Region {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  [[nodiscard]] bool contains(cplx z, double slack = 0.0) const noexcept {
    return z.real() >= re_min - slack && z.real() <= re_max + slack &&
           z.imag() >= im_min - slack && z.imag() <= im_max + slack;
  }
  [[nodiscard]] cplx center() const noexcept {
    return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)};
  }
};

/// [-10 max(r, d1, d2), R] x [-I, I] where R >= 1 and I >= 50 are widened
/// to enclose every root with Re >= 0 (those satisfy
/// |l| <= max(d2 + e2 c2 y0, d1 + sqrt(d1^2 + c1 d1 y0))).
[[nodiscard]] Region default_region(const LinearizedSystem& lin, const ModelParams& p);

struct RootScanOptions {
  std::optional<Region> region;  // default_region() when empty
  int nx = 16;
  int ny = 32;
  bool parallel = true;
};

struct FoundRoot {
  cplx lambda;
  double residual = 0.0;         // |Q(lambda)|
  double scaled_residual = 0.0;  // |Q(lambda)| / term_scale(lambda)
};

struct CellCount {
  Region cell;
  int winding = 0;
};

struct RootReport {
  std::vector<FoundRoot> roots;   // |Q| <= 1e-9, sorted by decreasing real part
  /// Roots isolated by a winding number of one and converged under Newton,
  /// but where |Q| <= 1e-9 is out of reach in double precision because the
  /// terms of Q are huge (scaled residual <= 1e-12).  Sorted likewise.
  std::vector<FoundRoot> loose_roots;
  double rightmost_real_part = -std::numeric_limits<double>::infinity();
  Region search_region;
  std::vector<CellCount> counts;  // top-level grid cells
  int total_winding = 0;
  int grid_attempts = 1;          // re-jitters needed to keep the grid off roots
  std::vector<Region> unresolved; // cells whose roots could not be polished
  bool complete = true;
};

/// Argument-principle scan followed by Newton polishing.  Throws
/// NumericalError when no jittered grid avoids the roots within 12 retries.
[[nodiscard]] RootReport root_scan(const LinearizedSystem& lin, const ModelParams& p,
                                   const RootScanOptions& opts = {});

/// Winding number of Q around the boundary of one rectangle; empty when the
/// contour passes too close to a root.
[[nodiscard]] std::optional<int> winding_number(const CharacteristicFunction& q,
                                                const Region& cell);

/// Newton iteration from `start`, tolerance 1e-12 relative, <= 50 steps.
[[nodiscard]] std::optional<cplx> newton_polish(const CharacteristicFunction& q, cplx start);

}  // namespace plk

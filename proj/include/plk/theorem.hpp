#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plk/certificate.hpp"
#include "plk/dde.hpp"
#include "plk/history.hpp"

namespace plk {

inline constexpr int kDefaultQuadIntervals = 128;

/// Initial data in coordinates shifted to (x0, y0, 0), zero outside the
/// delay windows: x on [-tau1, 0], y on [-tau_max, 0], z on [-tau2, 0].
class ExtendedHistory {
 public:
  ExtendedHistory(History h, double x0, double y0);

  /// Defined for every theta <= 0; DomainError for theta > 0.
  [[nodiscard]] Vec3 operator()(double theta) const;
  [[nodiscard]] const History& history() const noexcept { return hist_; }
  [[nodiscard]] Vec3 equilibrium() const noexcept { return {x0_, y0_, 0.0}; }

 private:
  History hist_;
  double x0_;
  double y0_;
};

/// Requires the plankton-only point to exist (DomainError otherwise).
[[nodiscard]] ExtendedHistory extend_history(const History& hist, const ModelParams& p);

/// V at t = 0: <H y(0), y(0)> plus both delay integrals, composite Simpson
/// with `intervals` (even, >= 64) subintervals per window.
[[nodiscard]] double eval_V0(const ExtendedHistory& ext, const LKCertificate& cert,
                             int intervals = kDefaultQuadIntervals);

/// V along a simulated solution at t in [0, t_end].  Windows that straddle
/// 0 are split there; each piece gets `intervals` subintervals.
[[nodiscard]] double eval_V_along(const Trajectory& traj, const ExtendedHistory& ext,
                                  const LKCertificate& cert, double t,
                                  int intervals = kDefaultQuadIntervals);

struct ConditionResult {
  std::string name;
  std::string statement;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool pass = false;
};

/// Admissibility of the initial data for the exponential estimates.
/// Conditions in order:
///   y_deviation_tau1_window     max_{[-tau1,0]} |psi - y0| <= sqrt(det)/h22 (mu1/(e1 c1)) e^{-m1 tau1/2}
///   y_deviation_tau2_window     max_{[-tau2,0]} |psi - y0| <= (mu2/(e2 c2)) e^{-m2 tau2/2}
///   sqrt_V0_below_eps_over_q    sqrt(V0) < eps/q
///   deflated_V0_tau1_bound      sqrt(V0)/(1 - q/eps sqrt(V0)) <= det/(h22 sqrt(h11)) (mu1/(e1 c1)) e^{-m1 tau1/2}
///   deflated_V0_tau2_bound      sqrt(V0)/(1 - q/eps sqrt(V0)) <= sqrt(det)/sqrt(h11) (mu2/(e2 c2)) e^{-m2 tau2/2}
/// with det = h11 h22 - h12^2.
struct TheoremReport {
  double V0 = 0.0;
  std::array<ConditionResult, 5> conditions;
  bool envelopes_valid = false;
  /// Window maxima from the closed form of preset histories, when available.
  std::optional<double> analytic_dev_tau1;
  std::optional<double> analytic_dev_tau2;

  [[nodiscard]] const ConditionResult* first_failure() const noexcept;
};

[[nodiscard]] TheoremReport check_initial_conditions(const ExtendedHistory& ext,
                                                     const LKCertificate& cert,
                                                     int intervals = kDefaultQuadIntervals);

struct Envelope {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;
};

/// Bounds on |x - x0|, |y - y0|, |z| at time t.  DomainError unless
/// sqrt(V0) < eps/q.
[[nodiscard]] Envelope predicted_envelope(const LKCertificate& cert, double V0, double t);

/// V0 e^{-eps t} / (1 - q/eps sqrt(V0))^2.
[[nodiscard]] double gronwall_bound(const LKCertificate& cert, double V0, double t);

struct Sampling {
  int stride = 10;  // every stride-th solver node
  int quad_intervals = kDefaultQuadIntervals;
  bool parallel = true;
};

/// Node times with index divisible by stride, plus the final node; t = 0
/// excluded.
[[nodiscard]] std::vector<double> sample_times(const Trajectory& traj, int stride);

struct EnvelopeCheck {
  bool pass = true;
  bool gronwall_pass = true;
  double tolerance = 0.0;      // 1e-6 + 10 * solver_error
  double solver_error = 0.0;
  Vec3 worst_margin{};         // min over samples of bound - |deviation|
  double worst_gronwall_margin = 0.0;  // min of bound + 1e-7 - V
  std::size_t samples = 0;
  std::size_t violations = 0;
  double first_violation_time = -1.0;
  std::vector<double> times;
  std::vector<double> V;
};

/// Requires report.envelopes_valid (DomainError otherwise).
[[nodiscard]] EnvelopeCheck check_envelope(const Trajectory& traj, const ExtendedHistory& ext,
                                           const LKCertificate& cert, const TheoremReport& report,
                                           const Sampling& sampling, double solver_error);

struct InequalityCheck {
  bool pass = true;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  // min of -eps V + q V^{3/2} + tol - dV/dt
  double worst_time = 0.0;
  std::size_t strict_violations = 0;  // samples failing with tol = 0, for information
};

/// Central difference of V with step equal to the solver step at the
/// sample times with t - h >= 0 and t + h <= t_end.
[[nodiscard]] InequalityCheck check_differential_inequality(const Trajectory& traj,
                                                            const ExtendedHistory& ext,
                                                            const LKCertificate& cert,
                                                            const Sampling& sampling);

/// Header `t,x,y,z,V,bound_x,bound_y,bound_z,margin_x,margin_y,margin_z`.
/// Bounds and margins are written as nan when the envelopes do not apply.
void write_verification_csv(std::ostream& os, const Trajectory& traj, const LKCertificate& cert,
                            const TheoremReport& report, const std::vector<double>& times,
                            const std::vector<double>& V);

void write_theorem_report(std::ostream& os, const TheoremReport& report);

}  // namespace plk

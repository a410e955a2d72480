#pragma once

#include <iosfwd>
#include <vector>

#include "plk/history.hpp"
#include "plk/model.hpp"

namespace plk {

struct StepControl {
  /// Base step; 0 selects min(positive delays, 0.01) / step_divisor.
  double step = 0.0;
  int step_divisor = 20;
  double positivity_tol = 1e-9;
};

/// Step used by integrate() for these settings.  DomainError when an explicit
/// step exceeds min(positive delays) / 20.
[[nodiscard]] double resolve_step(const ModelParams& p, const StepControl& sc);

/// Fixed-step solution on [0, t_end] with cubic Hermite dense output.
class Trajectory {
 public:
  Trajectory(ModelParams p, History h, double step, std::vector<double> times,
             std::vector<Vec3> states, std::vector<Vec3> derivs);

  [[nodiscard]] const ModelParams& params() const noexcept { return p_; }
  [[nodiscard]] const History& history() const noexcept { return hist_; }
  [[nodiscard]] double step() const noexcept { return h_; }
  [[nodiscard]] double t_end() const noexcept { return times_.back(); }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
  [[nodiscard]] const std::vector<Vec3>& states() const noexcept { return states_; }
  [[nodiscard]] const std::vector<Vec3>& derivs() const noexcept { return derivs_; }
  [[nodiscard]] const Vec3& observed_sup() const noexcept { return sup_; }
  [[nodiscard]] const Vec3& observed_inf() const noexcept { return inf_; }

  /// State at t: history for t < 0, Hermite interpolant on [0, t_end],
  /// stored node state at node times.  DomainError for t > t_end.
  [[nodiscard]] Vec3 sample(double t) const;

 private:
  ModelParams p_;
  History hist_;
  double h_;
  std::vector<double> times_;
  std::vector<Vec3> states_;
  std::vector<Vec3> derivs_;
  Vec3 sup_{};
  Vec3 inf_{};
};

/// Classical RK4 with delayed values from the history (negative times) or
/// the dense output of completed steps.  A zero delay reads the current
/// stage state.  Throws IntegrationError on a non-finite state.
[[nodiscard]] Trajectory integrate(const ModelParams& p, const History& hist, double t_end,
                                   const StepControl& sc = {});

struct PositivityReport {
  bool nonnegative = true;
  bool x_bounded = true;
  Vec3 min_component{};
  Vec3 observed_sup{};
  double x_bound = 0.0;  // max(sup phi, K)
  [[nodiscard]] bool pass() const noexcept { return nonnegative && x_bounded; }
};

/// min component >= -positivity_tol and x <= max(sup phi, K) + 1e-6.
[[nodiscard]] PositivityReport check_positivity_boundedness(const Trajectory& traj,
                                                            double positivity_tol = 1e-9);

/// Rows every `stride` nodes plus the final node, header `t,x,y,z`.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride = 1);

/// Max-norm error estimate of `traj` from a half-step rerun:
/// |y_h - y_{h/2}| * 16/15 over the nodes of `traj`.
[[nodiscard]] double estimate_solver_error(const Trajectory& traj);

}  // namespace plk

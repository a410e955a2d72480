#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plk/linalg3.hpp"

namespace plk {

/// Initial functions on the delay windows: x on [-tau1, 0], y on
/// [-tau_max, 0], z on [-tau2, 0].  Every representation is evaluable on all
/// of [-tau_max, 0]; the per-component accessors enforce the windows.
class History {
 public:
  enum class Kind { Constant, EquilibriumPlusConstant, EquilibriumPlusSine, Tabulated };

  static History constant(const Vec3& value, double tau1, double tau2);
  static History equilibrium_plus_constant(const Vec3& base, const Vec3& offset, double tau1,
                                           double tau2);
  /// base + amplitude * sin(frequency * theta + phase), componentwise.
  static History equilibrium_plus_sine(const Vec3& base, const Vec3& amplitude, double frequency,
                                       double phase, double tau1, double tau2);
  /// Natural cubic spline through (theta_i, values_i); theta strictly
  /// increasing and covering [-tau_max, 0].
  static History tabulated(std::vector<double> theta, std::vector<Vec3> values, double tau1,
                           double tau2);
  /// CSV with header `theta,x,y,z`.
  static History from_csv(const std::string& path, double tau1, double tau2);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double tau1() const noexcept { return tau1_; }
  [[nodiscard]] double tau2() const noexcept { return tau2_; }
  [[nodiscard]] double tau_max() const noexcept { return tau1_ > tau2_ ? tau1_ : tau2_; }

  /// All three components at theta in [-tau_max, 0]; DomainError outside.
  [[nodiscard]] Vec3 operator()(double theta) const;
  [[nodiscard]] double phi(double theta) const;
  [[nodiscard]] double psi(double theta) const;
  [[nodiscard]] double eta(double theta) const;
  /// Left end of the window of component k (0: -tau1, 1: -tau_max, 2: -tau2).
  [[nodiscard]] double window_start(int k) const noexcept;

  /// max |h_k(theta) - ref| over [lo, hi] in closed form, for presets only.
  [[nodiscard]] std::optional<double> analytic_max_abs_deviation(int k, double ref, double lo,
                                                                 double hi) const;
  /// max |h_k(theta) - ref| on 1024 uniform points of [lo, hi] plus endpoints.
  [[nodiscard]] double sampled_max_abs_deviation(int k, double ref, double lo, double hi) const;
  /// Supremum of component k over its window (analytic for presets).
  [[nodiscard]] double sup(int k) const;

  /// base + lambda * (h - base): offsets, amplitudes or table deviations scaled.
  [[nodiscard]] History scaled_about(const Vec3& base, double lambda) const;

  /// DomainError unless every component is >= 0 on its window and x(0) > 0.
  void validate_nonnegative() const;

 private:
  History() = default;
  [[nodiscard]] double component(int k, double theta) const;
  [[nodiscard]] double spline_eval(int k, double theta) const;
  void build_splines();
  /// (min, max) of component k over [lo, hi] for presets.
  [[nodiscard]] std::optional<std::pair<double, double>> preset_range(int k, double lo,
                                                                      double hi) const;

  Kind kind_ = Kind::Constant;
  double tau1_ = 0.0;
  double tau2_ = 0.0;
  Vec3 base_{};
  Vec3 amplitude_{};
  double frequency_ = 0.0;
  double phase_ = 0.0;
  std::vector<double> theta_;
  std::vector<Vec3> values_;
  std::vector<Vec3> second_;  // spline second derivatives
};

}  // namespace plk

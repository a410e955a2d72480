#include "plk/dde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "plk/errors.hpp"

namespace plk {

namespace {

double min_positive_delay(const ModelParams& p) {
  double m = std::numeric_limits<double>::infinity();
  if (p.tau1 > 0.0) m = std::min(m, p.tau1);
  if (p.tau2 > 0.0) m = std::min(m, p.tau2);
  return m;
}

Vec3 hermite(double t0, double t1, const Vec3& y0, const Vec3& y1, const Vec3& f0,
             const Vec3& f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  Vec3 out;
  for (std::size_t k = 0; k < 3; ++k) {
    out[k] = h00 * y0[k] + h10 * h * f0[k] + h01 * y1[k] + h11 * h * f1[k];
  }
  return out;
}

// Dense output over the completed nodes [0, times.back()].
struct DenseView {
  const std::vector<double>& times;
  const std::vector<Vec3>& states;
  const std::vector<Vec3>& derivs;
  double h;

  Vec3 at(double t) const {
    const std::size_t last = times.size() - 1;
    if (t >= times[last]) return states[last];
    auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t / h)));
    if (i >= last) i = last - 1;
    while (i > 0 && times[i] > t) --i;
    while (i + 1 < last && times[i + 1] <= t) ++i;
    if (t == times[i]) return states[i];
    return hermite(times[i], times[i + 1], states[i], states[i + 1], derivs[i], derivs[i + 1], t);
  }
};

}  // namespace

double resolve_step(const ModelParams& p, const StepControl& sc) {
  if (sc.step_divisor < 1) throw DomainError("step_divisor must be >= 1");
  const double tmin = min_positive_delay(p);
  double h = sc.step;
  if (h == 0.0) {
    h = std::min(tmin, 0.01) / sc.step_divisor;
  } else if (!(std::isfinite(h) && h > 0.0)) {
    throw DomainError("step must be finite and > 0");
  }
  if (std::isfinite(tmin) && h > tmin / 20.0) {
    std::ostringstream os;
    os << "step " << h << " exceeds min(positive delays)/20 = " << tmin / 20.0;
    throw DomainError(os.str());
  }
  return h;
}

Trajectory::Trajectory(ModelParams p, History h, double step, std::vector<double> times,
                       std::vector<Vec3> states, std::vector<Vec3> derivs)
    : p_(p),
      hist_(std::move(h)),
      h_(step),
      times_(std::move(times)),
      states_(std::move(states)),
      derivs_(std::move(derivs)) {
  sup_ = inf_ = states_.front();
  for (const auto& s : states_) {
    for (std::size_t k = 0; k < 3; ++k) {
      sup_[k] = std::max(sup_[k], s[k]);
      inf_[k] = std::min(inf_[k], s[k]);
    }
  }
}

Vec3 Trajectory::sample(double t) const {
  if (t < 0.0) return hist_(t);
  if (t > t_end()) {
    std::ostringstream os;
    os << "trajectory sampled at t = " << t << " beyond t_end = " << t_end();
    throw DomainError(os.str());
  }
  return DenseView{times_, states_, derivs_, h_}.at(t);
}

namespace {

Trajectory integrate_with_step(const ModelParams& p, const History& hist, double t_end,
                               double h) {
  const auto n = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
  const std::size_t count = std::max<std::size_t>(n, 1) + 1;

  std::vector<double> times;
  std::vector<Vec3> states;
  std::vector<Vec3> derivs;
  times.reserve(count);
  states.reserve(count);
  derivs.reserve(count);

  const DenseView dense{times, states, derivs, h};
  auto delayed = [&](double t, double tau, const Vec3& current) -> Vec3 {
    if (tau == 0.0) return current;
    const double s = t - tau;
    return s < 0.0 ? hist(s) : dense.at(s);
  };
  auto f = [&](double t, const Vec3& y) {
    return rhs(y, delayed(t, p.tau1, y), delayed(t, p.tau2, y), p);
  };
  auto check = [](double t, const Vec3& y) {
    for (double c : y) {
      if (!std::isfinite(c)) throw IntegrationError(t, "non-finite state");
    }
  };

  times.push_back(0.0);
  states.push_back(hist(0.0));
  derivs.push_back(f(0.0, states.back()));
  check(0.0, derivs.back());

  for (std::size_t i = 1; i < count; ++i) {
    const double t0 = times.back();
    const double t1 = i + 1 == count ? t_end : static_cast<double>(i) * h;
    const double dt = t1 - t0;
    const Vec3 y = states.back();
    const Vec3 k1 = derivs.back();
    const Vec3 k2 = f(t0 + 0.5 * dt, y + (0.5 * dt) * k1);
    const Vec3 k3 = f(t0 + 0.5 * dt, y + (0.5 * dt) * k2);
    const Vec3 k4 = f(t1, y + dt * k3);
    const Vec3 y1 = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check(t1, y1);
    // The node derivative needs the delayed values at t1, all of which lie
    // at or before t0 because h <= tau / 20.
    const Vec3 f1 = f(t1, y1);
    check(t1, f1);
    times.push_back(t1);
    states.push_back(y1);
    derivs.push_back(f1);
  }
  return Trajectory(p, hist, h, std::move(times), std::move(states), std::move(derivs));
}

}  // namespace

Trajectory integrate(const ModelParams& p, const History& hist, double t_end,
                     const StepControl& sc) {
  if (!(std::isfinite(t_end) && t_end > 0.0)) throw DomainError("t_end must be finite and > 0");
  if (hist.tau1() != p.tau1 || hist.tau2() != p.tau2) {
    throw DomainError("history delays do not match the model delays");
  }
  return integrate_with_step(p, hist, t_end, resolve_step(p, sc));
}

PositivityReport check_positivity_boundedness(const Trajectory& traj, double positivity_tol) {
  PositivityReport r;
  r.min_component = traj.observed_inf();
  r.observed_sup = traj.observed_sup();
  r.x_bound = std::max(traj.history().sup(0), traj.params().K);
  for (std::size_t k = 0; k < 3; ++k) {
    if (r.min_component[k] < -positivity_tol) r.nonnegative = false;
  }
  if (r.observed_sup[0] > r.x_bound + 1e-6) r.x_bounded = false;
  return r;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride) {
  if (stride < 1) throw DomainError("stride must be >= 1");
  os << "t,x,y,z\n";
  char buf[128];
  const auto& t = traj.times();
  const auto& y = traj.states();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != t.size()) continue;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t[i], y[i][0], y[i][1], y[i][2]);
    os << buf;
  }
}

double estimate_solver_error(const Trajectory& traj) {
  const Trajectory ref =
      integrate_with_step(traj.params(), traj.history(), traj.t_end(), traj.step() / 2.0);
  double err = 0.0;
  const auto& t = traj.times();
  const auto& y = traj.states();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Vec3 d = y[i] - ref.sample(t[i]);
    err = std::max(err, max_abs(d));
  }
  return err * 16.0 / 15.0;
}

}  // namespace plk

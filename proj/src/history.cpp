#include "plk/history.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "plk/errors.hpp"

namespace plk {

namespace {

void check_delays(double tau1, double tau2) {
  if (!(std::isfinite(tau1) && tau1 >= 0.0)) throw DomainError("history: tau1 must be finite and >= 0");
  if (!(std::isfinite(tau2) && tau2 >= 0.0)) throw DomainError("history: tau2 must be finite and >= 0");
}

void check_finite(const Vec3& v, const char* what) {
  for (double c : v) {
    if (!std::isfinite(c)) throw DomainError(std::string("history: ") + what + " must be finite");
  }
}

constexpr int kGrid = 1024;

}  // namespace

History History::constant(const Vec3& value, double tau1, double tau2) {
  check_delays(tau1, tau2);
  check_finite(value, "value");
  History h;
  h.kind_ = Kind::Constant;
  h.tau1_ = tau1;
  h.tau2_ = tau2;
  h.base_ = value;
  return h;
}

History History::equilibrium_plus_constant(const Vec3& base, const Vec3& offset, double tau1,
                                           double tau2) {
  check_delays(tau1, tau2);
  check_finite(base, "base");
  check_finite(offset, "offset");
  History h;
  h.kind_ = Kind::EquilibriumPlusConstant;
  h.tau1_ = tau1;
  h.tau2_ = tau2;
  h.base_ = base;
  h.amplitude_ = offset;
  return h;
}

History History::equilibrium_plus_sine(const Vec3& base, const Vec3& amplitude, double frequency,
                                       double phase, double tau1, double tau2) {
  check_delays(tau1, tau2);
  check_finite(base, "base");
  check_finite(amplitude, "amplitude");
  if (!std::isfinite(frequency) || !std::isfinite(phase)) {
    throw DomainError("history: frequency and phase must be finite");
  }
  History h;
  h.kind_ = Kind::EquilibriumPlusSine;
  h.tau1_ = tau1;
  h.tau2_ = tau2;
  h.base_ = base;
  h.amplitude_ = amplitude;
  h.frequency_ = frequency;
  h.phase_ = phase;
  return h;
}

History History::tabulated(std::vector<double> theta, std::vector<Vec3> values, double tau1,
                           double tau2) {
  check_delays(tau1, tau2);
  if (theta.size() != values.size()) throw DomainError("history table: theta/value size mismatch");
  if (theta.size() < 2) throw DomainError("history table: need at least two rows");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i])) throw DomainError("history table: non-finite theta");
    check_finite(values[i], "table value");
    if (i > 0 && !(theta[i] > theta[i - 1])) {
      throw DomainError("history table: theta must be strictly increasing");
    }
  }
  const double tmax = std::max(tau1, tau2);
  if (theta.front() > -tmax || theta.back() < 0.0) {
    throw DomainError("history table must cover [-tau_max, 0]");
  }
  History h;
  h.kind_ = Kind::Tabulated;
  h.tau1_ = tau1;
  h.tau2_ = tau2;
  h.theta_ = std::move(theta);
  h.values_ = std::move(values);
  h.build_splines();
  return h;
}

History History::from_csv(const std::string& path, double tau1, double tau2) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open history table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty history table");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "theta,x,y,z") {
    throw ConfigError(path + ":1: expected header 'theta,x,y,z'");
  }
  std::vector<double> theta;
  std::vector<Vec3> values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    double row[4];
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      if (n >= 4) break;
      try {
        std::size_t used = 0;
        row[n] = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": cannot parse '" + cell + "'");
      }
      ++n;
    }
    if (n != 4 || std::getline(ss, cell, ',')) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 4 columns");
    }
    theta.push_back(row[0]);
    values.push_back({row[1], row[2], row[3]});
  }
  try {
    return tabulated(std::move(theta), std::move(values), tau1, tau2);
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void History::build_splines() {
  const std::size_t n = theta_.size();
  second_.assign(n, Vec3{});
  if (n < 3) return;
  // Tridiagonal solve with natural end conditions, one component at a time.
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = theta_[i] - theta_[i - 1];
      const double h1 = theta_[i + 1] - theta_[i];
      const double rhs = 6.0 * ((values_[i + 1][k] - values_[i][k]) / h1 -
                                (values_[i][k] - values_[i - 1][k]) / h0);
      const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
      c[i] = h1 / diag;
      d[i] = (rhs - h0 * d[i - 1]) / diag;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      second_[i][k] = d[i] - c[i] * second_[i + 1][k];
      if (i == 1) break;
    }
  }
}

double History::spline_eval(int k, double theta) const {
  const auto uk = static_cast<std::size_t>(k);
  auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
  std::size_t i = it == theta_.begin() ? 0 : static_cast<std::size_t>(it - theta_.begin()) - 1;
  if (i + 1 >= theta_.size()) i = theta_.size() - 2;
  const double h = theta_[i + 1] - theta_[i];
  const double a = (theta_[i + 1] - theta) / h;
  const double b = (theta - theta_[i]) / h;
  return a * values_[i][uk] + b * values_[i + 1][uk] +
         ((a * a * a - a) * second_[i][uk] + (b * b * b - b) * second_[i + 1][uk]) * h * h / 6.0;
}

double History::component(int k, double theta) const {
  const auto uk = static_cast<std::size_t>(k);
  switch (kind_) {
    case Kind::Constant:
      return base_[uk];
    case Kind::EquilibriumPlusConstant:
      return base_[uk] + amplitude_[uk];
    case Kind::EquilibriumPlusSine:
      return base_[uk] + amplitude_[uk] * std::sin(frequency_ * theta + phase_);
    case Kind::Tabulated:
      return spline_eval(k, theta);
  }
  return 0.0;
}

Vec3 History::operator()(double theta) const {
  if (!(theta <= 0.0 && theta >= -tau_max())) {
    std::ostringstream os;
    os << "history evaluated at theta = " << theta << " outside [" << -tau_max() << ", 0]";
    throw DomainError(os.str());
  }
  return {component(0, theta), component(1, theta), component(2, theta)};
}

double History::window_start(int k) const noexcept {
  return k == 0 ? -tau1_ : k == 1 ? -tau_max() : -tau2_;
}

namespace {
[[noreturn]] void window_error(const char* name, double theta, double lo) {
  std::ostringstream os;
  os << "history component " << name << " evaluated at theta = " << theta << " outside [" << lo
     << ", 0]";
  throw DomainError(os.str());
}
}  // namespace

double History::phi(double theta) const {
  if (!(theta <= 0.0 && theta >= -tau1_)) window_error("phi", theta, -tau1_);
  return component(0, theta);
}

double History::psi(double theta) const {
  if (!(theta <= 0.0 && theta >= -tau_max())) window_error("psi", theta, -tau_max());
  return component(1, theta);
}

double History::eta(double theta) const {
  if (!(theta <= 0.0 && theta >= -tau2_)) window_error("eta", theta, -tau2_);
  return component(2, theta);
}

std::optional<std::pair<double, double>> History::preset_range(int k, double lo, double hi) const {
  const auto uk = static_cast<std::size_t>(k);
  switch (kind_) {
    case Kind::Constant:
    case Kind::EquilibriumPlusConstant: {
      const double v = component(k, 0.0);
      return std::make_pair(v, v);
    }
    case Kind::EquilibriumPlusSine: {
      double mn = std::min(component(k, lo), component(k, hi));
      double mx = std::max(component(k, lo), component(k, hi));
      if (frequency_ != 0.0 && amplitude_[uk] != 0.0) {
        // sin attains +-1 where frequency*theta + phase = pi/2 + j*pi.
        const double pi = std::numbers::pi;
        const double u0 = frequency_ * lo + phase_;
        const double u1 = frequency_ * hi + phase_;
        const double ua = std::min(u0, u1);
        const double ub = std::max(u0, u1);
        const double j0 = std::ceil((ua - pi / 2.0) / pi);
        const double j1 = std::floor((ub - pi / 2.0) / pi);
        if (j1 >= j0) {
          // j0 and j0 + 1 cover both signs of sin when present.
          for (double j = j0; j <= std::min(j1, j0 + 1.0); j += 1.0) {
            const double s = std::fmod(std::fabs(j), 2.0) == 0.0 ? 1.0 : -1.0;
            const double v = base_[uk] + amplitude_[uk] * s;
            mn = std::min(mn, v);
            mx = std::max(mx, v);
          }
        }
      }
      return std::make_pair(mn, mx);
    }
    case Kind::Tabulated:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> History::analytic_max_abs_deviation(int k, double ref, double lo,
                                                          double hi) const {
  const auto range = preset_range(k, lo, hi);
  if (!range) return std::nullopt;
  return std::max(std::fabs(range->first - ref), std::fabs(range->second - ref));
}

double History::sampled_max_abs_deviation(int k, double ref, double lo, double hi) const {
  double m = std::max(std::fabs(component(k, lo) - ref), std::fabs(component(k, hi) - ref));
  for (int i = 1; i < kGrid; ++i) {
    const double t = lo + (hi - lo) * i / kGrid;
    m = std::max(m, std::fabs(component(k, t) - ref));
  }
  return m;
}

double History::sup(int k) const {
  const double lo = window_start(k);
  if (const auto range = preset_range(k, lo, 0.0)) return range->second;
  double m = std::max(component(k, lo), component(k, 0.0));
  for (int i = 1; i < kGrid; ++i) m = std::max(m, component(k, lo - lo * i / kGrid));
  for (double t : theta_) {
    if (t >= lo && t <= 0.0) m = std::max(m, component(k, t));
  }
  return m;
}

History History::scaled_about(const Vec3& base, double lambda) const {
  History h = *this;
  switch (kind_) {
    case Kind::Constant:
      h.base_ = base + lambda * (base_ - base);
      break;
    case Kind::EquilibriumPlusConstant:
    case Kind::EquilibriumPlusSine:
      h.base_ = base + lambda * (base_ - base);
      h.amplitude_ = lambda * amplitude_;
      break;
    case Kind::Tabulated:
      for (auto& v : h.values_) v = base + lambda * (v - base);
      h.build_splines();
      break;
  }
  return h;
}

void History::validate_nonnegative() const {
  static const char* names[3] = {"phi", "psi", "eta"};
  for (int k = 0; k < 3; ++k) {
    const double lo = window_start(k);
    double mn;
    if (const auto range = preset_range(k, lo, 0.0)) {
      mn = range->first;
    } else {
      mn = std::min(component(k, lo), component(k, 0.0));
      for (int i = 1; i < kGrid; ++i) mn = std::min(mn, component(k, lo - lo * i / kGrid));
      for (double t : theta_) {
        if (t >= lo && t <= 0.0) mn = std::min(mn, component(k, t));
      }
    }
    if (mn < 0.0) {
      std::ostringstream os;
      os << "history component " << names[k] << " is negative on its window (min " << mn << ")";
      throw DomainError(os.str());
    }
  }
  if (!(component(0, 0.0) > 0.0)) throw DomainError("history requires phi(0) > 0");
}

}  // namespace plk

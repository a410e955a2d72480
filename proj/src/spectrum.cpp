#include "plk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "plk/errors.hpp"
#include "plk/kernels.hpp"

namespace plk {

CharacteristicFunction::CharacteristicFunction(const LinearizedSystem& lin,
                                               const ModelParams& p)
    : lin_(lin),
      tau1_(p.tau1),
      tau2_(p.tau2),
      a_(p.r * lin.x0 / p.K),
      d1_(p.d1),
      c1d1y0_(p.c1 * p.d1 * lin.y0),
      d2_(p.d2),
      g2_(p.e2 * p.c2 * lin.y0) {}

cplx CharacteristicFunction::eval(cplx lambda) const noexcept {
  const cplx w1 = std::exp(-lambda * tau1_);
  const cplx w2 = std::exp(-lambda * tau2_);
  cplx m[3][3];
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      m[i][j] = (i == j ? lambda : cplx(0.0)) - lin_.A[i][j] - w1 * lin_.B1[i][j] -
                w2 * lin_.B2[i][j];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

cplx CharacteristicFunction::q1(cplx lambda) const noexcept {
  const cplx w1 = std::exp(-lambda * tau1_);
  return (lambda + a_) * (lambda + d1_ - d1_ * w1) + c1d1y0_ * w1;
}

cplx CharacteristicFunction::q2(cplx lambda) const noexcept {
  return lambda + d2_ - g2_ * std::exp(-lambda * tau2_);
}

cplx CharacteristicFunction::derivative(cplx lambda) const noexcept {
  const cplx w1 = std::exp(-lambda * tau1_);
  const cplx w2 = std::exp(-lambda * tau2_);
  const cplx q1v = (lambda + a_) * (lambda + d1_ - d1_ * w1) + c1d1y0_ * w1;
  const cplx q2v = lambda + d2_ - g2_ * w2;
  const cplx dq1 = (lambda + d1_ - d1_ * w1) + (lambda + a_) * (1.0 + d1_ * tau1_ * w1) -
                   c1d1y0_ * tau1_ * w1;
  const cplx dq2 = 1.0 + g2_ * tau2_ * w2;
  return dq1 * q2v + q1v * dq2;
}

double CharacteristicFunction::term_scale(cplx lambda) const noexcept {
  const double w1 = std::abs(std::exp(-lambda * tau1_));
  const double w2 = std::abs(std::exp(-lambda * tau2_));
  const double l = std::abs(lambda);
  const double s1 = std::abs(lambda + a_) * (l + d1_ + d1_ * w1) + std::fabs(c1d1y0_) * w1;
  const double s2 = l + d2_ + std::fabs(g2_) * w2;
  return s1 * s2;
}

cplx eval_Q(cplx lambda, const LinearizedSystem& lin, const ModelParams& p) {
  return CharacteristicFunction(lin, p).eval(lambda);
}

QFactors eval_factors(cplx lambda, const LinearizedSystem& lin, const ModelParams& p) {
  const CharacteristicFunction q(lin, p);
  return {q.q1(lambda), q.q2(lambda)};
}

const char* to_string(StabilityKind kind) noexcept {
  switch (kind) {
    case StabilityKind::AsymptoticallyStable: return "AsymptoticallyStable";
    case StabilityKind::Unstable: return "Unstable";
    case StabilityKind::DelayDependent: return "DelayDependent";
  }
  return "unknown";
}

StabilityVerdict lemma_classify(const ModelParams& p) {
  const double e1c1 = p.e1 * p.c1;
  if (!(e1c1 > 0.0)) throw DomainError("stability classification requires e1*c1 > 0");
  const double upper = e1c1 * p.K;
  if (!(p.d1 <= upper)) throw DomainError("stability classification requires d1 <= e1*c1*K");

  const double g = p.e2 * p.c2;
  const double term = g > 0.0 ? 1.0 - p.c1 * p.d2 / (g * p.r)
                              : -std::numeric_limits<double>::infinity();

  StabilityVerdict v;
  v.stable_upper = upper;
  v.stable_lower = upper * std::max(1.0 / 3.0, term);
  v.unstable_upper = g > 0.0 ? upper * term : -std::numeric_limits<double>::infinity();

  std::ostringstream os;
  os.precision(17);
  if (v.stable_lower < p.d1 && p.d1 < v.stable_upper) {
    v.kind = StabilityKind::AsymptoticallyStable;
    os << "e1*c1*K*max{1/3, 1 - c1*d2/(e2*c2*r)} = " << v.stable_lower << " < d1 = " << p.d1
       << " < e1*c1*K = " << v.stable_upper;
  } else if (p.d1 < v.unstable_upper) {
    v.kind = StabilityKind::Unstable;
    os << "d1 = " << p.d1 << " < e1*c1*K*(1 - c1*d2/(e2*c2*r)) = " << v.unstable_upper;
  } else {
    v.kind = StabilityKind::DelayDependent;
    os << "d1 = " << p.d1 << " in gap [" << std::max(v.unstable_upper, 0.0) << ", "
       << v.stable_lower << "]";
    if (p.d1 == v.stable_upper) os << " (boundary d1 = e1*c1*K)";
  }
  v.witness = os.str();
  return v;
}

Region default_region(const LinearizedSystem& lin, const ModelParams& p) {
  const double g2 = p.e2 * p.c2 * lin.y0;
  const double bound = std::max(p.d2 + g2, p.d1 + std::sqrt(p.d1 * p.d1 + p.c1 * p.d1 * lin.y0));
  Region reg;
  reg.re_min = -10.0 * std::max({p.r, p.d1, p.d2});
  reg.re_max = std::max(1.0, 1.1 * bound);
  reg.im_max = std::max(50.0, 1.1 * bound);
  reg.im_min = -reg.im_max;
  return reg;
}

namespace {

constexpr double kPi = std::numbers::pi;

bool near_root(const CharacteristicFunction& q, cplx z, cplx qz) {
  const double scale = 1.0 + std::pow(std::abs(z), 3);
  if (std::abs(qz) > 1e-6 * scale) return false;
  const cplx dq = q.derivative(z);
  if (dq == cplx(0.0)) return true;
  return std::abs(qz) / std::abs(dq) <= 1e-12 * std::max(1.0, std::abs(z));
}

// Phase change of Q along [za, zb]; bisects until every piece changes phase
// by less than pi/4.
bool segment_phase(const CharacteristicFunction& q, cplx za, cplx qa, cplx zb, cplx qb,
                   int depth, double& acc) {
  const cplx zm = 0.5 * (za + zb);
  const cplx qm = q.eval(zm);
  if (!std::isfinite(qm.real()) || !std::isfinite(qm.imag()) || near_root(q, zm, qm)) {
    return false;
  }
  const double d1 = std::arg(qm / qa);
  const double d2 = std::arg(qb / qm);
  if (std::fabs(d1) < kPi / 4 && std::fabs(d2) < kPi / 4) {
    acc += d1 + d2;
    return true;
  }
  if (depth >= 40) return false;
  return segment_phase(q, za, qa, zm, qm, depth + 1, acc) &&
         segment_phase(q, zm, qm, zb, qb, depth + 1, acc);
}

double frac(double x) { return x - std::floor(x); }

// Grid lines over [lo, hi] with n cells.  Interior lines are shifted by
// 2-12% of a cell; retries also nudge the outer lines outward.
std::vector<double> jittered_lines(double lo, double hi, int n, int attempt, double seed) {
  const double step = (hi - lo) / n;
  std::vector<double> lines(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    double x = lo + i * step;
    if (i > 0 && i < n) {
      x += (0.02 + 0.1 * frac(i * 0.6180339887498949 + attempt * 0.7548776662466927 + seed)) * step;
    }
    lines[static_cast<std::size_t>(i)] = x;
  }
  if (attempt > 0) {
    lines.front() -= attempt * 1e-3 * step * (1.0 + frac(seed + attempt * 0.414));
    lines.back() += attempt * 1e-3 * step * (1.0 + frac(seed + attempt * 0.732));
  }
  return lines;
}

struct Resolver {
  const CharacteristicFunction& q;
  RootReport& report;

  static bool known(const std::vector<FoundRoot>& list, cplx z) {
    return std::any_of(list.begin(), list.end(), [z](const FoundRoot& r) {
      return std::abs(r.lambda - z) <= 1e-7 * (1.0 + std::abs(z));
    });
  }

  bool try_newton(const Region& cell) {
    const auto z = newton_polish(q, cell.center());
    if (!z) return false;
    const double size = std::max(cell.re_max - cell.re_min, cell.im_max - cell.im_min);
    if (!cell.contains(*z, 1e-9 * size)) return false;
    const double res = std::abs(q.eval(*z));
    const FoundRoot root{*z, res, res / q.term_scale(*z)};
    if (res <= 1e-9) {
      if (!known(report.roots, *z)) report.roots.push_back(root);
      return true;
    }
    if (root.scaled_residual <= 1e-12) {
      if (!known(report.loose_roots, *z)) report.loose_roots.push_back(root);
      return true;
    }
    return false;
  }

  void resolve(const Region& cell, int winding, int depth) {
    if (winding == 1 && try_newton(cell)) return;
    if (depth >= 12) {
      if (!try_newton(cell)) {
        report.unresolved.push_back(cell);
        report.complete = false;
      }
      return;
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double fx = 0.5 + 0.03 * (attempt + 1) * (frac(depth * 0.618 + attempt * 0.3) - 0.5);
      const double fy = 0.5 + 0.03 * (attempt + 1) * (frac(depth * 0.755 + attempt * 0.6) - 0.5);
      const double xm = cell.re_min + fx * (cell.re_max - cell.re_min);
      const double ym = cell.im_min + fy * (cell.im_max - cell.im_min);
      const Region sub[4] = {{cell.re_min, xm, cell.im_min, ym},
                             {xm, cell.re_max, cell.im_min, ym},
                             {cell.re_min, xm, ym, cell.im_max},
                             {xm, cell.re_max, ym, cell.im_max}};
      std::optional<int> w[4];
      bool ok = true;
      for (int k = 0; k < 4 && ok; ++k) {
        w[k] = winding_number(q, sub[k]);
        ok = w[k].has_value() && *w[k] >= 0;
      }
      if (!ok) continue;
      for (int k = 0; k < 4; ++k) {
        if (*w[k] > 0) resolve(sub[k], *w[k], depth + 1);
      }
      return;
    }
    report.unresolved.push_back(cell);
    report.complete = false;
  }
};

}  // namespace

std::optional<int> winding_number(const CharacteristicFunction& q, const Region& cell) {
  const cplx corners[5] = {{cell.re_min, cell.im_min},
                           {cell.re_max, cell.im_min},
                           {cell.re_max, cell.im_max},
                           {cell.re_min, cell.im_max},
                           {cell.re_min, cell.im_min}};
  constexpr int kSegments = 32;
  double total = 0.0;
  cplx za = corners[0];
  cplx qa = q.eval(za);
  if (!std::isfinite(qa.real()) || !std::isfinite(qa.imag()) || near_root(q, za, qa)) {
    return std::nullopt;
  }
  for (int e = 0; e < 4; ++e) {
    for (int s = 1; s <= kSegments; ++s) {
      const double t = static_cast<double>(s) / kSegments;
      const cplx zb = s == kSegments ? corners[e + 1] : corners[e] + t * (corners[e + 1] - corners[e]);
      const cplx qb = q.eval(zb);
      if (!std::isfinite(qb.real()) || !std::isfinite(qb.imag()) || near_root(q, zb, qb)) {
        return std::nullopt;
      }
      if (!segment_phase(q, za, qa, zb, qb, 0, total)) return std::nullopt;
      za = zb;
      qa = qb;
    }
  }
  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::fabs(turns - rounded) > 0.05) return std::nullopt;
  return static_cast<int>(rounded);
}

std::optional<cplx> newton_polish(const CharacteristicFunction& q, cplx start) {
  cplx z = start;
  for (int it = 0; it < 50; ++it) {
    const cplx qz = q.eval(z);
    if (qz == cplx(0.0)) return z;
    const cplx dq = q.derivative(z);
    if (dq == cplx(0.0)) return std::nullopt;
    const cplx step = qz / dq;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
    z -= step;
    if (std::abs(step) <= 1e-12 * (1.0 + std::abs(z))) return z;
  }
  return std::nullopt;
}

RootReport root_scan(const LinearizedSystem& lin, const ModelParams& p,
                     const RootScanOptions& opts) {
  const Region region = opts.region.value_or(default_region(lin, p));
  if (!std::isfinite(region.re_min) || !std::isfinite(region.re_max) ||
      !std::isfinite(region.im_min) || !std::isfinite(region.im_max) ||
      !(region.re_min < region.re_max) || !(region.im_min < region.im_max)) {
    throw DomainError("root_scan needs a finite, non-degenerate rectangle");
  }
  if (opts.nx < 8 || opts.ny < 8) throw DomainError("root_scan grid must be at least 8x8");

  const CharacteristicFunction q(lin, p);
  RootReport report;

  std::vector<Region> cells;
  std::vector<std::optional<int>> windings;
  bool ok = false;
  int attempt = 0;
  for (; attempt <= 12 && !ok; ++attempt) {
    const auto xs = jittered_lines(region.re_min, region.re_max, opts.nx, attempt, 0.1);
    const auto ys = jittered_lines(region.im_min, region.im_max, opts.ny, attempt, 0.37);
    cells.clear();
    for (int j = 0; j < opts.ny; ++j)
      for (int i = 0; i < opts.nx; ++i)
        cells.push_back({xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(i + 1)],
                         ys[static_cast<std::size_t>(j)], ys[static_cast<std::size_t>(j + 1)]});
    windings = opts.parallel ? kernels::cell_windings_parallel(q, cells)
                             : kernels::cell_windings_serial(q, cells);
    ok = std::all_of(windings.begin(), windings.end(),
                     [](const std::optional<int>& w) { return w.has_value() && *w >= 0; });
    report.search_region = {cells.front().re_min, cells.back().re_max, cells.front().im_min,
                            cells.back().im_max};
  }
  report.grid_attempts = attempt;
  if (!ok) throw NumericalError("root_scan: contour kept hitting roots after 12 re-jitters");

  Resolver resolver{q, report};
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const int w = *windings[k];
    report.counts.push_back({cells[k], w});
    report.total_winding += w;
    if (w > 0) resolver.resolve(cells[k], w, 0);
  }

  const auto by_real = [](const FoundRoot& a, const FoundRoot& b) {
    return a.lambda.real() > b.lambda.real();
  };
  std::sort(report.roots.begin(), report.roots.end(), by_real);
  std::sort(report.loose_roots.begin(), report.loose_roots.end(), by_real);
  for (const auto* list : {&report.roots, &report.loose_roots})
    for (const auto& r : *list)
      report.rightmost_real_part = std::max(report.rightmost_real_part, r.lambda.real());
  for (const auto& c : report.unresolved)
    report.rightmost_real_part = std::max(report.rightmost_real_part, c.re_max);
  return report;
}

}  // namespace plk

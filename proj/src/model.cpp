#include "plk/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plk/errors.hpp"

namespace plk {

namespace {

void require_finite(const char* name, double v) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string("model parameter '") + name + "' is not finite");
  }
}

void require_positive(const char* name, double v) {
  require_finite(name, v);
  if (!(v > 0.0)) {
    std::ostringstream os;
    os << "model parameter '" << name << "' must be > 0 (got " << v << ")";
    throw DomainError(os.str());
  }
}

void require_nonnegative(const char* name, double v) {
  require_finite(name, v);
  if (!(v >= 0.0)) {
    std::ostringstream os;
    os << "model parameter '" << name << "' must be >= 0 (got " << v << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

ModelParams derive_params(const RawParams& raw) {
  require_positive("r", raw.r);
  require_positive("K", raw.K);
  require_nonnegative("c1", raw.c1);
  require_nonnegative("c2", raw.c2);
  require_positive("d1", raw.d1);
  require_positive("d2", raw.d2);
  require_nonnegative("b1", raw.b1);
  require_nonnegative("b2", raw.b2);
  require_nonnegative("tau1", raw.tau1);
  require_nonnegative("tau2", raw.tau2);

  ModelParams p;
  p.r = raw.r;
  p.K = raw.K;
  p.c1 = raw.c1;
  p.c2 = raw.c2;
  p.d1 = raw.d1;
  p.d2 = raw.d2;
  p.b1 = raw.b1;
  p.b2 = raw.b2;
  p.tau1 = raw.tau1;
  p.tau2 = raw.tau2;
  p.e1 = raw.b1 * std::exp(-raw.c1 * raw.tau1);
  p.e2 = raw.b2 * std::exp(-raw.c2 * raw.tau2);
  p.tau_max = std::max(raw.tau1, raw.tau2);
  p.tau_min = std::min(raw.tau1, raw.tau2);
  return p;
}

Vec3 rhs(const Vec3& current, const Vec3& delayed1, const Vec3& delayed2,
         const ModelParams& p) noexcept {
  const double x = current[0];
  const double y = current[1];
  const double z = current[2];
  return {
      p.r * x * (1.0 - x / p.K) - p.c1 * x * y,
      -p.d1 * y + p.e1 * p.c1 * delayed1[0] * delayed1[1] - p.c2 * y * z,
      -p.d2 * z + p.e2 * p.c2 * delayed2[1] * delayed2[2],
  };
}

const char* to_string(EquilibriumLabel label) noexcept {
  switch (label) {
    case EquilibriumLabel::Extinction: return "extinction";
    case EquilibriumLabel::PhytoOnly: return "phyto-only";
    case EquilibriumLabel::PlanktonOnly: return "plankton-only";
    case EquilibriumLabel::Coexistence: return "coexistence";
  }
  return "unknown";
}

CaseThresholds case_thresholds(const ModelParams& p) noexcept {
  CaseThresholds t;
  t.upper = p.e1 * p.c1 * p.K;
  if (t.upper == 0.0) {
    t.lower = 0.0;
  } else if (p.e2 * p.c2 == 0.0) {
    t.lower = -std::numeric_limits<double>::infinity();
  } else {
    t.lower = t.upper * (1.0 - p.c1 * p.d2 / (p.e2 * p.c2 * p.r));
  }
  return t;
}

PlanktonPoint plankton_only_point(const ModelParams& p) {
  const double e1c1 = p.e1 * p.c1;
  if (!(e1c1 > 0.0)) {
    throw DomainError("plankton-only point requires e1*c1 > 0");
  }
  if (!(p.d1 <= e1c1 * p.K)) {
    throw DomainError("plankton-only point requires d1 <= e1*c1*K");
  }
  PlanktonPoint pt;
  pt.x0 = p.d1 / e1c1;
  pt.y0 = (p.r / p.c1) * (1.0 - p.d1 / (e1c1 * p.K));
  return pt;
}

EquilibriumSet classify_equilibria(const ModelParams& p) {
  const CaseThresholds t = case_thresholds(p);
  EquilibriumSet set;
  set.points.push_back({EquilibriumLabel::Extinction, {0.0, 0.0, 0.0}});
  set.points.push_back({EquilibriumLabel::PhytoOnly, {p.K, 0.0, 0.0}});

  if (p.d1 > t.upper) {
    set.case_id = 1;
    return set;
  }

  const PlanktonPoint pt = plankton_only_point(p);
  set.points.push_back({EquilibriumLabel::PlanktonOnly, {pt.x0, pt.y0, 0.0}});
  if (p.d1 >= t.lower) {
    set.case_id = 2;
    return set;
  }

  // d1 < lower is only possible with lower finite and positive, so e2 c2 > 0.
  set.case_id = 3;
  const double ratio = 1.0 - p.c1 * p.d2 / (p.e2 * p.c2 * p.r);
  const Vec3 star{p.K * ratio, p.d2 / (p.e2 * p.c2), (t.lower - p.d1) / p.c2};
  set.points.push_back({EquilibriumLabel::Coexistence, star});
  return set;
}

LinearizedSystem linearize(const ModelParams& p) {
  const PlanktonPoint pt = plankton_only_point(p);
  LinearizedSystem lin;
  lin.x0 = pt.x0;
  lin.y0 = pt.y0;

  lin.A[0][0] = -p.r * pt.x0 / p.K;
  lin.A[0][1] = -p.d1 / p.e1;
  lin.A[1][1] = -p.d1;
  lin.A[1][2] = -p.c2 * pt.y0;
  lin.A[2][2] = -p.d2;

  lin.B1[1][0] = p.e1 * p.c1 * pt.y0;
  lin.B1[1][1] = p.d1;

  lin.B2[2][2] = p.e2 * p.c2 * pt.y0;
  return lin;
}

NonlinearTerms eval_nonlinear(const Vec3& current, const Vec3& delayed1,
                              const Vec3& delayed2,
                              const ModelParams& p) noexcept {
  NonlinearTerms n;
  const double x = current[0];
  const double y = current[1];
  const double z = current[2];
  n.F = {-(p.r / p.K) * x * x - p.c1 * x * y, -p.c2 * y * z, 0.0};
  n.G1 = {0.0, p.e1 * p.c1 * delayed1[0] * delayed1[1], 0.0};
  n.G2 = {0.0, 0.0, p.e2 * p.c2 * delayed2[1] * delayed2[2]};
  return n;
}

}  // namespace plk

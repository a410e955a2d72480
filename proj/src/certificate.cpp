#include "plk/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "plk/errors.hpp"

namespace plk {

void CertificateOptions::validate() const {
  if (!(std::isfinite(alpha) && alpha > 0.0)) throw DomainError("alpha must be > 0");
  if (!(mu_fraction > 0.0 && mu_fraction < 0.5)) throw DomainError("mu_fraction must lie in (0, 1/2)");
  if (!(m_fraction > 0.0 && m_fraction < 1.0)) throw DomainError("m_fraction must lie in (0, 1)");
  if (!(std::isfinite(h33_factor) && h33_factor > 1.0)) throw DomainError("h33_factor must be > 1");
}

DecayRates choose_rates(const ModelParams& p, double m_fraction) {
  if (!(m_fraction > 0.0 && m_fraction < 1.0)) throw DomainError("m_fraction must lie in (0, 1)");
  PlanktonPoint pt;
  try {
    pt = plankton_only_point(p);
  } catch (const DomainError& e) {
    throw CertificateError(CertificateError::Kind::Inapplicable, e.what());
  }
  const double a = p.r * pt.x0 / p.K;
  const double c1y0 = p.c1 * pt.y0;
  const double g2 = p.e2 * p.c2 * pt.y0;
  if (!(0.0 < c1y0 && c1y0 < 2.0 * a)) {
    throw CertificateError(CertificateError::Kind::Inapplicable,
                           "certificate needs 0 < c1*y0 < 2*r*x0/K");
  }
  if (!(0.0 < g2 && g2 < p.d2)) {
    throw CertificateError(CertificateError::Kind::Inapplicable,
                           "certificate needs 0 < e2*c2*y0 < d2");
  }
  if (!(p.tau1 > 0.0) || !(p.tau2 > 0.0)) {
    throw CertificateError(CertificateError::Kind::Unsupported,
                           "certificate construction needs tau1 > 0 and tau2 > 0");
  }

  const double ratio1 = (a - c1y0) / a;
  const double rho = std::max(ratio1 * ratio1, p.d1 * p.d1 / (a * a + p.d1 * p.d1));
  DecayRates rates;
  rates.m1_sup = -std::log(rho) / p.tau1;
  rates.m2_sup = (2.0 / p.tau2) * std::log(p.d2 / g2);
  rates.m1 = m_fraction * rates.m1_sup;
  rates.m2 = m_fraction * rates.m2_sup;
  return rates;
}

namespace {

Mat3 b1tb1(const LKCertificate& c) { return transpose(c.lin.B1) * c.lin.B1; }
Mat3 b2tb2(const LKCertificate& c) { return transpose(c.lin.B2) * c.lin.B2; }

[[noreturn]] void internal(const std::string& what) {
  throw CertificateError(CertificateError::Kind::Internal, "certificate invariant failed: " + what);
}

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// C for the general framework, all blocks n x n.
SymMatrix block_matrix(const DenseMatrix& A, const DenseMatrix& B1, const DenseMatrix& B2,
                       const SymMatrix& H, const SymMatrix& K10, const SymMatrix& K1t,
                       const SymMatrix& K20, const SymMatrix& K2t) {
  const int n = A.n;
  auto mul_HX = [&](const DenseMatrix& X, int i, int j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += H(i, k) * X(k, j);
    return s;
  };
  SymMatrix C(3 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double ha = mul_HX(A, i, j) + mul_HX(A, j, i);  // (HA + A^T H)_{ij}
      C.set(i, j, -(ha + K10(i, j) + K20(i, j)));
      C.set(n + i, n + j, K1t(i, j));
      C.set(2 * n + i, 2 * n + j, K2t(i, j));
    }
    for (int j = 0; j < n; ++j) {
      C.set(i, n + j, -mul_HX(B1, i, j));
      C.set(i, 2 * n + j, -mul_HX(B2, i, j));
      C.set(n + i, 2 * n + j, 0.0);
    }
  }
  return C;
}

SymMatrix sym3(const Mat3& m) {
  SymMatrix s(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      s.set(i, j, 0.5 * (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                         m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]));
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

LKCertificate build_certificate(const ModelParams& p, const CertificateOptions& opts) {
  opts.validate();
  const DecayRates rates = choose_rates(p, opts.m_fraction);

  LKCertificate c;
  c.params = p;
  c.lin = linearize(p);
  c.options = opts;
  c.alpha = opts.alpha;
  c.m1 = rates.m1;
  c.m2 = rates.m2;

  const double x0 = c.lin.x0;
  const double y0 = c.lin.y0;
  const double a = p.r * x0 / p.K;
  const double al = c.alpha;
  const double E = std::exp(-c.m1 * p.tau1);
  const double ed = p.e1 / p.d1;
  const double g2 = p.e2 * p.c2 * y0;
  const double half_growth = std::exp(c.m2 * p.tau2 / 2.0);

  c.h22 = al * (a + p.d1) * E;
  const double l22 = al * ((a * a + p.d1 * p.d1) * E - p.d1 * p.d1);
  c.h11 = ed * ed * (a * l22 + al * p.c1 * y0 * p.d1 * p.d1);
  c.h12 = al * ed * a * a * E;

  const double bracket = a * a * E - (a - p.c1 * y0) * (a - p.c1 * y0);
  const double l11 = (ed * a) * (ed * a) * l22 + al * p.e1 * p.e1 * bracket;
  const double l12 = ed * a * l22;
  const double l13 = al * p.c2 * y0 * ed * a * a * E;
  const double l23 = al * p.c2 * y0 * (a + p.d1) * E;
  const double gap2 = p.d2 - g2 * half_growth;

  const double minor = l11 * l22 - l12 * l12;
  const double numer = l11 * l23 * l23 + l22 * l13 * l13 - 2.0 * l12 * l13 * l23;
  c.h33_lower_bound = numer / (2.0 * gap2 * minor);
  c.h33 = opts.h33_factor * c.h33_lower_bound;
  if (!(c.h33 > 0.0)) internal("h33 lower bound is not positive");
  const double l33 = 2.0 * c.h33 * gap2;
  c.beta = c.h33 * half_growth / g2;
  c.leading_minor_closed_form = al * p.e1 * p.e1 * bracket * l22;

  c.H = {{{c.h11, c.h12, 0.0}, {c.h12, c.h22, 0.0}, {0.0, 0.0, c.h33}}};
  c.H1 = {{{c.h11, c.h12, 0.0}, {c.h12, c.h22, 0.0}, {0.0, 0.0, 0.0}}};
  c.H2 = {{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, c.h33}}};
  c.Htilde1 = {{{0.0, 0.0, 0.0}, {c.h12, c.h22, 0.0}, {0.0, 0.0, 0.0}}};
  c.Htilde2 = c.H2;
  c.L = {{{l11, l12, l13}, {l12, l22, l23}, {l13, l23, l33}}};

  const SymMatrix Hs = SymMatrix::from_mat3(c.H);
  const SymMatrix Ls = SymMatrix::from_mat3(c.L);
  if (!(c.h11 > 0.0 && c.h22 > 0.0 && c.h33 > 0.0 && c.det_h_block() > 0.0)) {
    internal("H is not positive definite");
  }
  if (!(l11 > 0.0 && minor > 0.0 && det3(c.L) > 0.0)) {
    internal("L fails the Sylvester chain l11 > 0, l11*l22 - l12^2 > 0, det L > 0");
  }

  const SymMatrix Hm = inv_sqrt(Hs);
  c.sigma = min_eigenvalue(congruence(Hm, Ls));
  if (!(c.sigma > 0.0)) internal("sigma is not positive");
  c.mu1 = c.mu2 = opts.mu_fraction * c.sigma;
  c.epsilon = std::min({c.sigma - 2.0 * std::max(c.mu1, c.mu2), c.m1, c.m2});

  const double s = 1.0 - c.h12 / std::sqrt(c.h11 * c.h22);
  const double rk = std::sqrt((p.r / p.K) * (p.r / p.K) + p.c1 * p.c1);
  const double first = rk / (std::min(std::sqrt(c.h11), std::sqrt(c.h22)) * std::sqrt(s));
  c.q = 2.0 / std::sqrt(s) * std::max(first, p.c2 / std::sqrt(c.h33));

  if (!(min_eigenvalue(Ls - c.sigma * Hs) >= -1e-10 * Ls.frobenius_norm())) {
    internal("L - sigma*H is not positive semidefinite");
  }
  if (!(std::max(c.mu1, c.mu2) < c.sigma / 2.0)) internal("max(mu1, mu2) >= sigma/2");
  if (!(c.epsilon > 0.0)) internal("epsilon is not positive");
  if (!(a * a * E > (a - p.c1 * y0) * (a - p.c1 * y0) && (a * a + p.d1 * p.d1) * E > p.d1 * p.d1)) {
    internal("m1 violates its admissibility inequalities");
  }
  if (!(g2 * half_growth < p.d2)) internal("m2 violates e2*c2*y0*exp(m2*tau2/2) < d2");
  return c;
}

Mat3 L_from_definition(const LKCertificate& c) {
  const Mat3& A = c.lin.A;
  const Mat3 ha = c.H * A + transpose(A) * c.H;
  const Mat3 t1 = (std::exp(c.m1 * c.params.tau1) / c.alpha) * (transpose(c.Htilde1) * c.Htilde1);
  const Mat3 t2 = (std::exp(c.m2 * c.params.tau2) / c.beta) * (transpose(c.Htilde2) * c.Htilde2);
  return -1.0 * (ha + c.alpha * b1tb1(c) + c.beta * b2tb2(c) + t1 + t2);
}

Mat3 eval_K(const LKCertificate& c, int which, double s, KernelWeights weights) {
  if (which != 1 && which != 2) throw DomainError("eval_K: which must be 1 or 2");
  const double tau = which == 1 ? c.params.tau1 : c.params.tau2;
  if (!(s >= 0.0 && s <= tau)) {
    throw DomainError("eval_K: s = " + fmt(s) + " outside [0, " + fmt(tau) + "]");
  }
  if (which == 1) {
    const Mat3 R = c.mu1 * (weights == KernelWeights::Functional ? c.H1 : c.H);
    return std::exp(-c.m1 * s) * (c.alpha * b1tb1(c) + R);
  }
  const Mat3 R = c.mu2 * (weights == KernelWeights::Functional ? c.H2 : c.H);
  return std::exp(-c.m2 * s) * (c.beta * b2tb2(c) + R);
}

DenseMatrix DenseMatrix::from_mat3(const Mat3& m) {
  DenseMatrix d(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return d;
}

BlockMatrixResult assemble_C(const LKCertificate& c, KernelWeights weights) {
  const SymMatrix K10 = sym3(eval_K(c, 1, 0.0, weights));
  const SymMatrix K1t = sym3(eval_K(c, 1, c.params.tau1, weights));
  const SymMatrix K20 = sym3(eval_K(c, 2, 0.0, weights));
  const SymMatrix K2t = sym3(eval_K(c, 2, c.params.tau2, weights));
  BlockMatrixResult res;
  res.C = block_matrix(DenseMatrix::from_mat3(c.lin.A), DenseMatrix::from_mat3(c.lin.B1),
                       DenseMatrix::from_mat3(c.lin.B2), SymMatrix::from_mat3(c.H), K10, K1t, K20,
                       K2t);
  const DefinitenessResult pd = is_positive_definite(res.C);
  res.positive_definite = pd.positive_definite;
  res.min_eigenvalue = pd.min_eigenvalue;
  return res;
}

SymMatrix C_lower_bound(const LKCertificate& c, KernelWeights weights) {
  const bool functional = weights == KernelWeights::Functional;
  const Mat3 R1 = c.mu1 * (functional ? c.H1 : c.H);
  const Mat3 R2 = c.mu2 * (functional ? c.H2 : c.H);
  const Mat3 top = c.L - R1 - R2;
  const Mat3 mid = std::exp(-c.m1 * c.params.tau1) * R1;
  const Mat3 bot = std::exp(-c.m2 * c.params.tau2) * R2;
  SymMatrix D(9);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      D.set(i, j, top[ui][uj]);
      D.set(3 + i, 3 + j, mid[ui][uj]);
      D.set(6 + i, 6 + j, bot[ui][uj]);
    }
  return D;
}

std::vector<SymMatrix> sample_K(const LKCertificate& c, int which, int count,
                                KernelWeights weights) {
  if (count < 2) throw std::invalid_argument("sample_K needs at least two samples");
  const double tau = which == 1 ? c.params.tau1 : c.params.tau2;
  std::vector<SymMatrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double s = i + 1 == count ? tau : tau * i / (count - 1);
    out.push_back(sym3(eval_K(c, which, s, weights)));
  }
  return out;
}

GenericVerdict check_generic_certificate(const DenseMatrix& A, const DenseMatrix& B1,
                                         const DenseMatrix& B2, const SymMatrix& H,
                                         const std::vector<SymMatrix>& K1_samples,
                                         const std::vector<SymMatrix>& K2_samples) {
  const int n = A.n;
  if (n < 1 || 3 * n > SymMatrix::kMaxDim) {
    throw std::invalid_argument("generic certificate supports dimensions 1..3");
  }
  auto dense_ok = [n](const DenseMatrix& m) {
    return m.n == n && m.a.size() == static_cast<std::size_t>(n * n);
  };
  if (!dense_ok(A) || !dense_ok(B1) || !dense_ok(B2) || H.dim() != n) {
    throw std::invalid_argument("generic certificate: dimension mismatch among A, B1, B2, H");
  }
  for (const auto* samples : {&K1_samples, &K2_samples}) {
    if (samples->size() < 2) {
      throw std::invalid_argument("generic certificate: need at least two K samples per delay");
    }
    for (const auto& k : *samples) {
      if (k.dim() != n) throw std::invalid_argument("generic certificate: K sample dimension mismatch");
    }
  }

  GenericVerdict v;
  v.min_eigenvalue_C = std::numeric_limits<double>::quiet_NaN();
  if (!is_positive_definite(H).positive_definite) {
    v.failed = "H not positive definite";
    return v;
  }
  const std::pair<const char*, const std::vector<SymMatrix>*> kernels[2] = {{"K1", &K1_samples},
                                                                            {"K2", &K2_samples}};
  for (const auto& [name, samples] : kernels) {
    for (std::size_t i = 0; i < samples->size(); ++i) {
      if (!is_positive_definite((*samples)[i]).positive_definite) {
        v.failed = std::string(name) + "(s) not positive definite at sample " + std::to_string(i);
        return v;
      }
    }
    for (std::size_t i = 0; i + 1 < samples->size(); ++i) {
      if (!is_positive_definite((*samples)[i] - (*samples)[i + 1]).positive_definite) {
        v.failed = std::string(name) + "(s) not strictly decreasing between samples " +
                   std::to_string(i) + " and " + std::to_string(i + 1);
        return v;
      }
    }
  }
  const SymMatrix C = block_matrix(A, B1, B2, H, K1_samples.front(), K1_samples.back(),
                                   K2_samples.front(), K2_samples.back());
  const DefinitenessResult pd = is_positive_definite(C);
  v.min_eigenvalue_C = pd.min_eigenvalue;
  if (!pd.positive_definite) {
    v.failed = "C not positive definite";
    return v;
  }
  v.pass = true;
  return v;
}

void write_certificate_report(std::ostream& os, const LKCertificate& c) {
  const auto old_precision = os.precision(17);
  auto mat = [&os](const char* name, const Mat3& m) {
    os << name << " =\n";
    for (const auto& row : m) os << "  " << row[0] << ' ' << row[1] << ' ' << row[2] << '\n';
  };
  os << "# Lyapunov-Krasovskii certificate for the plankton-only equilibrium\n";
  os << "# free choices: alpha = " << c.options.alpha << ", m_fraction = " << c.options.m_fraction
     << ", h33_factor = " << c.options.h33_factor << ", mu_fraction = " << c.options.mu_fraction
     << " (one admissible point; not optimized)\n";
  os << "x0 = " << c.lin.x0 << "\ny0 = " << c.lin.y0 << '\n';
  os << "e1 = " << c.params.e1 << "\ne2 = " << c.params.e2 << '\n';
  os << "tau1 = " << c.params.tau1 << "\ntau2 = " << c.params.tau2 << '\n';
  os << "alpha = " << c.alpha << "\nbeta = " << c.beta << '\n';
  os << "m1 = " << c.m1 << "\nm2 = " << c.m2 << '\n';
  os << "h11 = " << c.h11 << "\nh12 = " << c.h12 << "\nh22 = " << c.h22 << "\nh33 = " << c.h33
     << '\n';
  os << "h33_lower_bound = " << c.h33_lower_bound << '\n';
  os << "det_h_block = " << c.det_h_block() << '\n';
  os << "leading_minor_closed_form = " << c.leading_minor_closed_form << '\n';
  os << "sigma = " << c.sigma << "\nmu1 = " << c.mu1 << "\nmu2 = " << c.mu2 << '\n';
  os << "epsilon = " << c.epsilon << "\nq = " << c.q << '\n';
  mat("A", c.lin.A);
  mat("B1", c.lin.B1);
  mat("B2", c.lin.B2);
  mat("H", c.H);
  mat("H1", c.H1);
  mat("H2", c.H2);
  mat("Htilde1", c.Htilde1);
  mat("Htilde2", c.Htilde2);
  mat("L", c.L);
  const BlockMatrixResult strict = assemble_C(c, KernelWeights::Strict);
  const BlockMatrixResult functional = assemble_C(c, KernelWeights::Functional);
  os << "C_strict_positive_definite = " << (strict.positive_definite ? "true" : "false") << '\n';
  os << "C_strict_min_eigenvalue = " << strict.min_eigenvalue << '\n';
  os << "C_functional_min_eigenvalue = " << functional.min_eigenvalue
     << "  # R_k = mu_k H_k leaves a three-dimensional kernel\n";
  os.precision(old_precision);
}

}  // namespace plk

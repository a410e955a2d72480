#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "plk/model.hpp"
#include "plk/numlin.hpp"

namespace plk {

/// Free choices left open by the construction.  Defaults: alpha = 1, the
/// rates m1, m2 at half their admissible suprema, h33 at twice its lower
/// bound, mu1 = mu2 = sigma / 4.
struct CertificateOptions {
  double alpha = 1.0;
  double mu_fraction = 0.25;  // mu_k = mu_fraction * sigma, must be < 1/2
  double m_fraction = 0.5;    // fraction of the supremum of m1 and m2, in (0, 1)
  double h33_factor = 2.0;    // > 1

  void validate() const;
};

struct DecayRates {
  double m1 = 0.0;
  double m2 = 0.0;
  double m1_sup = 0.0;  // supremum of admissible m1
  double m2_sup = 0.0;  // supremum of admissible m2
};

/// Requires 0 < c1 y0 < 2 r x0 / K and 0 < e2 c2 y0 < d2 (CertificateError
/// Inapplicable naming the failed inequality) and tau1, tau2 > 0
/// (CertificateError Unsupported).
[[nodiscard]] DecayRates choose_rates(const ModelParams& p, double m_fraction = 0.5);

/// Which positive part R_k enters the kernels K_k(s) = e^{-m_k s}(w_k B_k^T B_k + R_k).
enum class KernelWeights {
  /// R1 = mu1 H1, R2 = mu2 H2.  Used by the functional V and the decay
  /// estimates; K1, K2 are only positive semidefinite.
  Functional,
  /// R1 = mu1 H, R2 = mu2 H.  Both kernels are positive definite and the
  /// block matrix C is positive definite; this is the linear-stability
  /// certificate.
  Strict,
};

struct LKCertificate {
  ModelParams params;
  LinearizedSystem lin;
  CertificateOptions options;

  double h11 = 0.0, h12 = 0.0, h22 = 0.0, h33 = 0.0;
  Mat3 H{}, H1{}, H2{};
  Mat3 Htilde1{}, Htilde2{};
  Mat3 L{};

  double alpha = 1.0;
  double beta = 0.0;
  double m1 = 0.0, m2 = 0.0;
  double mu1 = 0.0, mu2 = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double q = 0.0;

  double h33_lower_bound = 0.0;
  /// alpha e1^2 {(r x0/K)^2 e^{-m1 tau1} - (r x0/K - c1 y0)^2} l22.
  double leading_minor_closed_form = 0.0;

  /// h11 h22 - h12^2
  [[nodiscard]] double det_h_block() const noexcept { return h11 * h22 - h12 * h12; }
};

/// Throws CertificateError (see choose_rates) and, if a finished certificate
/// fails one of its own invariants, CertificateError Internal.
[[nodiscard]] LKCertificate build_certificate(const ModelParams& p,
                                              const CertificateOptions& opts = {});

/// L recomputed from its defining matrix expression
/// -(HA + A^T H + a B1^T B1 + b B2^T B2 + e^{m1 tau1}/a Ht1^T Ht1 + e^{m2 tau2}/b Ht2^T Ht2).
[[nodiscard]] Mat3 L_from_definition(const LKCertificate& cert);

/// K_which(s), which in {1, 2}, s in [0, tau_which] (DomainError otherwise).
[[nodiscard]] Mat3 eval_K(const LKCertificate& cert, int which, double s,
                          KernelWeights weights = KernelWeights::Functional);

struct BlockMatrixResult {
  SymMatrix C{9};
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
};

/// C = -[[HA + A^T H + K1(0) + K2(0), H B1, H B2], [B1^T H, -K1(tau1), 0],
///       [B2^T H, 0, -K2(tau2)]].
[[nodiscard]] BlockMatrixResult assemble_C(const LKCertificate& cert,
                                           KernelWeights weights = KernelWeights::Strict);

/// Block-diagonal lower bound diag(L - R1 - R2, e^{-m1 tau1} R1, e^{-m2 tau2} R2).
[[nodiscard]] SymMatrix C_lower_bound(const LKCertificate& cert,
                                      KernelWeights weights = KernelWeights::Strict);

/// Square matrix for the general two-delay framework (n <= 3).
struct DenseMatrix {
  int n = 0;
  std::vector<double> a;  // row-major

  DenseMatrix() = default;
  explicit DenseMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim * dim), 0.0) {}
  static DenseMatrix from_mat3(const Mat3& m);

  [[nodiscard]] double operator()(int i, int j) const noexcept {
    return a[static_cast<std::size_t>(i * n + j)];
  }
  double& operator()(int i, int j) noexcept { return a[static_cast<std::size_t>(i * n + j)]; }
};

struct GenericVerdict {
  bool pass = false;
  std::string failed;             // first violated condition, empty on pass
  double min_eigenvalue_C = 0.0;  // NaN when C was not reached
};

/// Sufficient stability test for y' = A y + B1 y(t - tau1) + B2 y(t - tau2):
/// H > 0, K_k(s) > 0 and strictly decreasing along the sample grids, C > 0.
/// K samples are taken on uniform grids over [0, tau_k]; first and last
/// samples are K_k(0) and K_k(tau_k).  std::invalid_argument on dimension
/// mismatch.
[[nodiscard]] GenericVerdict check_generic_certificate(const DenseMatrix& A,
                                                       const DenseMatrix& B1,
                                                       const DenseMatrix& B2,
                                                       const SymMatrix& H,
                                                       const std::vector<SymMatrix>& K1_samples,
                                                       const std::vector<SymMatrix>& K2_samples);

/// Uniform samples of K_which on [0, tau_which].
[[nodiscard]] std::vector<SymMatrix> sample_K(const LKCertificate& cert, int which, int count,
                                              KernelWeights weights);

/// Plain-text audit report with every scalar and matrix at 17 significant
/// digits.
void write_certificate_report(std::ostream& os, const LKCertificate& cert);

}  // namespace plk

#pragma once

#include <array>
#include <vector>

#include "plk/linalg3.hpp"

namespace plk {

/// Dense symmetric matrix of dimension n <= 9.  Every write goes to both
/// (i, j) and (j, i), so the storage is symmetric by construction.
class SymMatrix {
 public:
  static constexpr int kMaxDim = 9;

  explicit SymMatrix(int n);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(const std::vector<double>& d);
  /// Upper triangle of m is used; the lower triangle is ignored.
  static SymMatrix from_mat3(const Mat3& m);

  [[nodiscard]] int dim() const noexcept { return n_; }
  [[nodiscard]] double operator()(int i, int j) const noexcept {
    return a_[static_cast<std::size_t>(i * kMaxDim + j)];
  }
  void set(int i, int j, double v) noexcept;

  [[nodiscard]] double frobenius_norm() const noexcept;
  [[nodiscard]] double trace() const noexcept;
  [[nodiscard]] Mat3 to_mat3() const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);

 private:
  int n_;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

struct EigenDecomposition {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations.  Throws NumericalError after 100 sweeps.
[[nodiscard]] EigenDecomposition sym_eigen(const SymMatrix& m);

[[nodiscard]] inline double min_eigenvalue(const SymMatrix& m) {
  return sym_eigen(m).values.front();
}

struct DefinitenessResult {
  bool positive_definite = false;
  double min_pivot = 0.0;           // smallest pivot reached before stopping
  double min_eigenvalue = 0.0;      // for reporting
  std::vector<double> pivots;       // complete only when positive_definite
};

/// Unpivoted Cholesky; positive definite iff every pivot exceeds
/// 1e-13 * ||M||_F.
[[nodiscard]] DefinitenessResult is_positive_definite(const SymMatrix& m);

/// M^{-1/2} through the eigendecomposition.  DomainError unless M is
/// positive definite.
[[nodiscard]] SymMatrix inv_sqrt(const SymMatrix& m);

/// P * M * P for symmetric P, M.
[[nodiscard]] SymMatrix congruence(const SymMatrix& p, const SymMatrix& m);

}  // namespace plk

#include "plk/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "plk/errors.hpp"

namespace plk {

SymMatrix::SymMatrix(int n) : n_(n) {
  if (n < 1 || n > kMaxDim) {
    throw std::invalid_argument("SymMatrix dimension must be in [1, 9]");
  }
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
  return m;
}

SymMatrix SymMatrix::from_mat3(const Mat3& m) {
  SymMatrix s(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      s.set(i, j, m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  return s;
}

void SymMatrix::set(int i, int j, double v) noexcept {
  a_[static_cast<std::size_t>(i * kMaxDim + j)] = v;
  a_[static_cast<std::size_t>(j * kMaxDim + i)] = v;
}

double SymMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

double SymMatrix::trace() const noexcept {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

Mat3 SymMatrix::to_mat3() const {
  if (n_ != 3) throw std::invalid_argument("SymMatrix::to_mat3 needs dim 3");
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (*this)(i, j);
  return m;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("SymMatrix dimension mismatch");
  SymMatrix r(a.n_);
  for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = a.a_[k] + b.a_[k];
  return r;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("SymMatrix dimension mismatch");
  SymMatrix r(a.n_);
  for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = a.a_[k] - b.a_[k];
  return r;
}

SymMatrix operator*(double s, const SymMatrix& a) {
  SymMatrix r(a.n_);
  for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = s * a.a_[k];
  return r;
}

EigenDecomposition sym_eigen(const SymMatrix& m) {
  const int n = m.dim();
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n)));
  std::vector<std::vector<double>> v(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    for (int j = 0; j < n; ++j)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  };

  const double scale = m.frobenius_norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += 2.0 * at(i, j) * at(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < 100; ++sweep) {
    const double off = off_norm();
    if (off == 0.0 || off <= 1e-15 * scale) break;
    bool rotated = false;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        // Rotation would not change the diagonal in floating point.
        if (sweep > 3 && std::fabs(apq) * 1e-2 < 1e-17 * (std::fabs(app) + std::fabs(aqq))) {
          at(p, q) = at(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          auto& row = v[static_cast<std::size_t>(k)];
          const double vkp = row[static_cast<std::size_t>(p)];
          const double vkq = row[static_cast<std::size_t>(q)];
          row[static_cast<std::size_t>(p)] = c * vkp - s * vkq;
          row[static_cast<std::size_t>(q)] = s * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }
  if (off_norm() > 1e-12 * scale) {
    throw NumericalError("Jacobi eigensolver did not converge in 100 sweeps");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return at(i, i) < at(j, j); });

  EigenDecomposition out;
  out.sweeps = sweep;
  for (int k : order) {
    out.values.push_back(at(k, k));
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      col[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

DefinitenessResult is_positive_definite(const SymMatrix& m) {
  const int n = m.dim();
  const double tol = 1e-13 * m.frobenius_norm();
  DefinitenessResult res;
  res.min_eigenvalue = min_eigenvalue(m);

  // Lower-triangular factor, row-major.
  std::vector<double> l(static_cast<std::size_t>(n * n), 0.0);
  auto L = [&](int i, int j) -> double& { return l[static_cast<std::size_t>(i * n + j)]; };
  res.positive_definite = true;
  res.min_pivot = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (int k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
    res.min_pivot = std::min(res.min_pivot, pivot);
    if (!(pivot > tol)) {
      res.positive_definite = false;
      res.pivots.clear();
      return res;
    }
    res.pivots.push_back(pivot);
    const double d = std::sqrt(pivot);
    L(j, j) = d;
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / d;
    }
  }
  return res;
}

SymMatrix inv_sqrt(const SymMatrix& m) {
  if (!is_positive_definite(m).positive_definite) {
    throw DomainError("inv_sqrt requires a positive definite matrix");
  }
  const EigenDecomposition eig = sym_eigen(m);
  const int n = m.dim();
  SymMatrix r(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        const auto& vk = eig.vectors[static_cast<std::size_t>(k)];
        s += vk[static_cast<std::size_t>(i)] * vk[static_cast<std::size_t>(j)] /
             std::sqrt(eig.values[static_cast<std::size_t>(k)]);
      }
      r.set(i, j, s);
    }
  }
  return r;
}

SymMatrix congruence(const SymMatrix& p, const SymMatrix& m) {
  const int n = m.dim();
  if (p.dim() != n) throw std::invalid_argument("congruence dimension mismatch");
  std::vector<double> pm(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += p(i, k) * m(k, j);
      pm[static_cast<std::size_t>(i * n + j)] = s;
    }
  SymMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      // Average both triangles so rounding asymmetry does not bias the result.
      double sij = 0.0;
      double sji = 0.0;
      for (int k = 0; k < n; ++k) {
        sij += pm[static_cast<std::size_t>(i * n + k)] * p(k, j);
        sji += pm[static_cast<std::size_t>(j * n + k)] * p(k, i);
      }
      r.set(i, j, 0.5 * (sij + sji));
    }
  return r;
}

}  // namespace plk

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace plk {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

constexpr Mat3 zero_mat3() noexcept { return Mat3{}; }

constexpr Mat3 identity_mat3() noexcept {
  Mat3 m{};
  for (std::size_t i = 0; i < 3; ++i) m[i][i] = 1.0;
  return m;
}

constexpr Vec3 operator+(const Vec3& a, const Vec3& b) noexcept {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

constexpr Vec3 operator-(const Vec3& a, const Vec3& b) noexcept {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

constexpr Vec3 operator*(double s, const Vec3& a) noexcept {
  return {s * a[0], s * a[1], s * a[2]};
}

constexpr double dot(const Vec3& a, const Vec3& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }

constexpr Vec3 operator*(const Mat3& m, const Vec3& v) noexcept {
  Vec3 r{};
  for (std::size_t i = 0; i < 3; ++i)
    r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return r;
}

constexpr Mat3 operator*(const Mat3& a, const Mat3& b) noexcept {
  Mat3 r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

constexpr Mat3 operator+(const Mat3& a, const Mat3& b) noexcept {
  Mat3 r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

constexpr Mat3 operator-(const Mat3& a, const Mat3& b) noexcept {
  Mat3 r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

constexpr Mat3 operator*(double s, const Mat3& a) noexcept {
  Mat3 r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = s * a[i][j];
  return r;
}

constexpr Mat3 transpose(const Mat3& a) noexcept {
  Mat3 r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = a[j][i];
  return r;
}

/// <M v, v>
constexpr double quad_form(const Mat3& m, const Vec3& v) noexcept {
  return dot(m * v, v);
}

inline double max_abs(const Vec3& a) noexcept {
  return std::max({std::fabs(a[0]), std::fabs(a[1]), std::fabs(a[2])});
}

inline double max_abs(const Mat3& a) noexcept {
  double r = 0.0;
  for (const auto& row : a)
    for (double x : row) r = std::fmax(r, std::fabs(x));
  return r;
}

}  // namespace plk

// SPDX-License-Identifier: Apache-2.0
#ifndef WANGLS_VEC_HPP
#define WANGLS_VEC_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace wangls {

/// Fixed-size point/vector in tile coordinates.
template <int D>
struct Vec {
  static_assert(D == 2 || D == 3, "only 2D and 3D are supported");
  std::array<double, D> v{};

  constexpr double& operator[](std::size_t i) { return v[i]; }
  constexpr double operator[](std::size_t i) const { return v[i]; }

  constexpr Vec& operator+=(Vec const& o) {
    for (int i = 0; i < D; ++i) v[i] += o.v[i];
    return *this;
  }
  constexpr Vec& operator-=(Vec const& o) {
    for (int i = 0; i < D; ++i) v[i] -= o.v[i];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (int i = 0; i < D; ++i) v[i] *= s;
    return *this;
  }
  friend constexpr Vec operator+(Vec a, Vec const& b) { return a += b; }
  friend constexpr Vec operator-(Vec a, Vec const& b) { return a -= b; }
  friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
  friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
  friend constexpr bool operator==(Vec const&, Vec const&) = default;
};

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <int D>
constexpr double dot(Vec<D> const& a, Vec<D> const& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}

template <int D>
inline double norm(Vec<D> const& a) {
  return std::sqrt(dot(a, a));
}

/// Integer lattice offset (translations between tiles, neighbour positions).
template <int D>
using IVec = std::array<int, D>;

}  // namespace wangls

#endif  // WANGLS_VEC_HPP

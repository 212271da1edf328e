// SPDX-License-Identifier: Apache-2.0
#ifndef WANGLS_GEOMETRY_HPP
#define WANGLS_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <variant>
#include <vector>

#include "rng.hpp"
#include "vec.hpp"

namespace wangls {

struct Sphere {
  double radius;
};

/// Ellipse/ellipsoid with semi-axes sorted descending.  `axes[i]` is the unit
/// direction of semi-axis i in the tile frame.
template <int D>
struct Ellipsoid {
  std::array<double, D> semi_axes;
  std::array<Vec<D>, D> axes;
};

/// Star-shaped simple polygon, vertices relative to the centre, CCW.
struct Polygon {
  std::vector<Vec2> vertices;
};

template <int D>
using Shape = std::conditional_t<D == 2, std::variant<Sphere, Ellipsoid<2>, Polygon>,
                                 std::variant<Sphere, Ellipsoid<3>>>;

template <int D>
struct Particle {
  Shape<D> shape;
  Vec<D> center;
  /// Radius of the smallest circle/sphere about `center` enclosing the shape
  /// (an upper bound for sampled polygons).
  double circumscribed_radius;
};

class ShapeSamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Closest point on an axis-aligned ellipsoid to y, restricted to the first
// orthant.  e is sorted descending, y >= 0.  n is the number of active axes.
inline void closest_on_ellipsoid(double const* e, double const* y, int n, double* x) {
  if (n == 1) {
    x[0] = e[0];
    return;
  }
  int const k = n - 1;
  if (y[k] > 0.0) {
    // Solve sum_i (p_i / (u + d_i))^2 = 1 for u = t + e_k^2 > 0, where
    // d_i = e_i^2 - e_k^2.  Shifting by e_k^2 avoids cancellation for roots
    // close to the pole.  The function is convex and decreasing on the bracket.
    double p[3], dq[3];
    double sum_p2 = 0.0;
    for (int i = 0; i < n; ++i) {
      p[i] = e[i] * y[i];
      dq[i] = e[i] * e[i] - e[k] * e[k];
      sum_p2 += p[i] * p[i];
    }
    double lo = p[k];
    double hi = std::sqrt(sum_p2);
    double u = hi;
    for (int it = 0; it < 200; ++it) {
      double val = -1.0, der = 0.0;
      for (int i = 0; i < n; ++i) {
        double const inv = 1.0 / (u + dq[i]);
        double const r = p[i] * inv;
        val += r * r;
        der -= 2.0 * r * r * inv;
      }
      if (val == 0.0) break;
      if (val > 0.0) {
        lo = u;
      } else {
        hi = u;
      }
      double next = u - val / der;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == lo || next == hi || std::abs(next - u) <= 1e-16 * u) {
        u = next;
        break;
      }
      u = next;
    }
    for (int i = 0; i < n; ++i) x[i] = e[i] * p[i] / (u + dq[i]);
    return;
  }

  // y[k] == 0: either the closest point lies in the plane x_k = 0, or it
  // leaves the plane (points inside, close to the smallest axis).
  double xa[3];
  closest_on_ellipsoid(e, y, k, xa);
  xa[k] = 0.0;
  double best = 0.0;
  for (int i = 0; i < n; ++i) best += (xa[i] - y[i]) * (xa[i] - y[i]);
  std::copy(xa, xa + n, x);

  double xb[3];
  double s = 0.0;
  bool valid = true;
  for (int i = 0; i < k && valid; ++i) {
    double const denom = e[i] * e[i] - e[k] * e[k];
    if (y[i] == 0.0) {
      xb[i] = 0.0;
    } else if (denom <= 0.0) {
      valid = false;
    } else {
      xb[i] = e[i] * e[i] * y[i] / denom;
      s += (xb[i] / e[i]) * (xb[i] / e[i]);
    }
  }
  if (valid && s < 1.0) {
    xb[k] = e[k] * std::sqrt(1.0 - s);
    double d = 0.0;
    for (int i = 0; i < n; ++i) d += (xb[i] - y[i]) * (xb[i] - y[i]);
    if (d < best) std::copy(xb, xb + n, x);
  }
}

inline double segment_distance(Vec2 const& p, Vec2 const& a, Vec2 const& b) {
  Vec2 const ab = b - a;
  double const len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

// Crossing-number point-in-polygon test.
inline bool polygon_contains(std::vector<Vec2> const& v, Vec2 const& p) {
  bool inside = false;
  std::size_t const n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i][1] > p[1]) != (v[j][1] > p[1])) {
      double const xc = v[j][0] + (p[1] - v[j][1]) * (v[i][0] - v[j][0]) / (v[i][1] - v[j][1]);
      if (p[0] < xc) inside = !inside;
    }
  }
  return inside;
}

}  // namespace detail

/// Signed distance of the axis-aligned ellipsoid surface from local point y
/// (negative inside).
template <int D>
double ellipsoid_signed_distance(std::array<double, D> const& semi, Vec<D> const& y) {
  double ay[D], x[D];
  double inside = 0.0;
  for (int i = 0; i < D; ++i) {
    ay[i] = std::abs(y[i]);
    inside += (y[i] / semi[i]) * (y[i] / semi[i]);
  }
  detail::closest_on_ellipsoid(semi.data(), ay, D, x);
  double d2 = 0.0;
  for (int i = 0; i < D; ++i) d2 += (x[i] - ay[i]) * (x[i] - ay[i]);
  double const d = std::sqrt(d2);
  return inside < 1.0 ? -d : d;
}

/// Signed distance of the shape boundary from `rel` (a point relative to the
/// particle centre).
template <int D>
double shape_signed_distance(Shape<D> const& shape, Vec<D> const& rel) {
  return std::visit(
      [&](auto const& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Sphere>) {
          return norm(rel) - s.radius;
        } else if constexpr (std::is_same_v<S, Polygon>) {
          auto const& v = s.vertices;
          double d = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            d = std::min(d, detail::segment_distance(rel, v[j], v[i]));
          }
          return detail::polygon_contains(v, rel) ? -d : d;
        } else {
          Vec<D> y;
          for (int i = 0; i < D; ++i) y[i] = dot(rel, s.axes[i]);
          return ellipsoid_signed_distance<D>(s.semi_axes, y);
        }
      },
      shape);
}

template <int D>
double signed_distance(Particle<D> const& p, Vec<D> const& x) {
  return shape_signed_distance<D>(p.shape, x - p.center);
}

/// Point-in-shape test independent of the distance computation.
template <int D>
bool contains(Particle<D> const& p, Vec<D> const& x) {
  Vec<D> const rel = x - p.center;
  return std::visit(
      [&](auto const& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Sphere>) {
          return dot(rel, rel) < s.radius * s.radius;
        } else if constexpr (std::is_same_v<S, Polygon>) {
          // winding number
          auto const& v = s.vertices;
          int wn = 0;
          for (std::size_t i = 0; i < v.size(); ++i) {
            Vec2 const& a = v[i];
            Vec2 const& b = v[(i + 1) % v.size()];
            double const cross = (b[0] - a[0]) * (rel[1] - a[1]) - (rel[0] - a[0]) * (b[1] - a[1]);
            if (a[1] <= rel[1]) {
              if (b[1] > rel[1] && cross > 0) ++wn;
            } else if (b[1] <= rel[1] && cross < 0) {
              --wn;
            }
          }
          return wn != 0;
        } else {
          double q = 0.0;
          for (int i = 0; i < D; ++i) {
            double const c = dot(rel, s.axes[i]) / s.semi_axes[i];
            q += c * c;
          }
          return q < 1.0;
        }
      },
      p.shape);
}

template <int D>
Particle<D> translated(Particle<D> p, Vec<D> const& t) {
  p.center += t;
  return p;
}

// --- samplers --------------------------------------------------------------

struct DiskLaw {};

/// Randomly perturbed regular polygon.  The vertex count is a rounded normal
/// draw; every ray angle of the regular polygon is perturbed by a normal
/// draw; the vertex radius is a normal draw relative to the circumscribed
/// radius, capped.
struct PolygonLaw {
  double vertex_mean = 6.0;
  double vertex_sd = 0.5;
  double angle_sd = 0.5;
  double radial_mean = 0.95;
  double radial_sd = 0.05;
  double radial_cap = 1.0;
  int retries = 100;
};

/// Ellipse/ellipsoid with major semi-axis equal to the circumscribed radius;
/// the middle (2D: minor) and minor ratios are uniform draws.
struct EllipsoidLaw {
  double mid_lo = 0.7;
  double mid_hi = 0.9;
  double minor_lo = 0.6;
  double minor_hi = 0.7;
};

template <int D>
using ShapeLaw = std::conditional_t<D == 2, std::variant<DiskLaw, PolygonLaw, EllipsoidLaw>,
                                    std::variant<DiskLaw, EllipsoidLaw>>;

inline Particle<2> sample_polygon(Rng& rng, PolygonLaw const& law, double rbar,
                                  Vec2 const& center = {}) {
  for (int attempt = 0; attempt < law.retries; ++attempt) {
    long const n = std::lround(rng.normal(law.vertex_mean, law.vertex_sd));
    if (n < 3) continue;
    double const base = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> angles(n);
    for (long i = 0; i < n; ++i) {
      angles[i] = base + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n) +
                  rng.normal(0.0, law.angle_sd);
    }
    std::vector<Vec2> verts(n);
    bool ok = true;
    for (long i = 0; i < n; ++i) {
      double const r = std::min(rng.normal(law.radial_mean, law.radial_sd), law.radial_cap) * rbar;
      if (!(r > 0.0)) ok = false;
      verts[i] = Vec2{{r * std::cos(angles[i]), r * std::sin(angles[i])}};
    }
    if (!ok) continue;
    // Perturbed rays must keep their cyclic order with every gap below pi;
    // then the polygon is simple, star-shaped and contains its centre.
    for (long i = 0; i < n && ok; ++i) {
      double gap = i + 1 < n ? angles[i + 1] - angles[i] : angles[0] + 2.0 * std::numbers::pi - angles[i];
      if (!(gap > 1e-9 && gap < std::numbers::pi)) ok = false;
    }
    if (!ok) continue;
    // Polar-to-Cartesian rounding may push a capped vertex an ulp past rbar.
    double circ = rbar;
    for (auto const& v : verts) circ = std::max(circ, norm(v));
    return Particle<2>{Polygon{std::move(verts)}, center, circ};
  }
  throw ShapeSamplingError("polygon sampler exhausted its retry budget");
}

/// Uniform rotation: unit quaternion from three uniforms.
inline std::array<Vec3, 3> random_rotation(Rng& rng) {
  double const u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  double const a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  double const x = a * std::sin(2.0 * std::numbers::pi * u2);
  double const y = a * std::cos(2.0 * std::numbers::pi * u2);
  double const z = b * std::sin(2.0 * std::numbers::pi * u3);
  double const w = b * std::cos(2.0 * std::numbers::pi * u3);
  // Columns of the rotation matrix are the images of the unit axes.
  return {Vec3{{1 - 2 * (y * y + z * z), 2 * (x * y + w * z), 2 * (x * z - w * y)}},
          Vec3{{2 * (x * y - w * z), 1 - 2 * (x * x + z * z), 2 * (y * z + w * x)}},
          Vec3{{2 * (x * z + w * y), 2 * (y * z - w * x), 1 - 2 * (x * x + y * y)}}};
}

template <int D>
Particle<D> sample_ellipsoid(Rng& rng, EllipsoidLaw const& law, double rbar,
                             Vec<D> const& center = {}) {
  Ellipsoid<D> e;
  double const mid = rng.uniform(law.mid_lo, law.mid_hi);
  if constexpr (D == 2) {
    e.semi_axes = {rbar, rbar * mid};
    double const phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    e.axes = {Vec2{{std::cos(phi), std::sin(phi)}}, Vec2{{-std::sin(phi), std::cos(phi)}}};
  } else {
    double const minor = rng.uniform(law.minor_lo, law.minor_hi);
    e.semi_axes = {rbar, rbar * mid, rbar * std::min(minor, mid)};
    e.axes = random_rotation(rng);
  }
  return Particle<D>{e, center, rbar};
}

template <int D>
Particle<D> sample_shape(Rng& rng, ShapeLaw<D> const& law, double rbar, Vec<D> const& center = {}) {
  return std::visit(
      [&](auto const& l) -> Particle<D> {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, DiskLaw>) {
          return Particle<D>{Sphere{rbar}, center, rbar};
        } else if constexpr (std::is_same_v<L, PolygonLaw>) {
          return sample_polygon(rng, l, rbar, center);
        } else {
          return sample_ellipsoid<D>(rng, l, rbar, center);
        }
      },
      law);
}

}  // namespace wangls

#endif  // WANGLS_GEOMETRY_HPP

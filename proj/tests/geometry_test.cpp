// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wangls/geometry.hpp"

using namespace wangls;

namespace {

// Signed min over densely sampled boundary points; sign from the independent
// containment test.
double polygon_oracle(Particle<2> const& p, Vec2 const& x, int per_edge) {
  auto const& v = std::get<Polygon>(p.shape).vertices;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vec2 const a = v[i] + p.center, b = v[(i + 1) % v.size()] + p.center;
    for (int k = 0; k <= per_edge; ++k) {
      double const t = static_cast<double>(k) / per_edge;
      best = std::min(best, norm(x - (a + t * (b - a))));
    }
  }
  return contains(p, x) ? -best : best;
}

// Dense parametric sampling, then golden-section refinement around the best
// sample (the chord error of sampling alone is too large near the boundary).
double ellipse_oracle(Particle<2> const& p, Vec2 const& x, int samples) {
  auto const& e = std::get<Ellipsoid<2>>(p.shape);
  auto dist = [&](double th) {
    Vec2 const y = p.center + e.semi_axes[0] * std::cos(th) * e.axes[0] +
                   e.semi_axes[1] * std::sin(th) * e.axes[1];
    return norm(x - y);
  };
  double const step = 2.0 * std::numbers::pi / samples;
  double best = std::numeric_limits<double>::infinity(), arg = 0.0;
  for (int k = 0; k < samples; ++k) {
    double const d = dist(k * step);
    if (d < best) best = d, arg = k * step;
  }
  double a = arg - step, b = arg + step;
  double const g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    double const c = b - g * (b - a), d = a + g * (b - a);
    if (dist(c) < dist(d)) b = d; else a = c;
  }
  best = std::min(best, dist(0.5 * (a + b)));
  return contains(p, x) ? -best : best;
}

template <int D>
Vec<D> random_point(Rng& rng, double lo, double hi) {
  Vec<D> x;
  for (int i = 0; i < D; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

}  // namespace

TEST(SignedDistance, Disk) {
  Particle<2> const p{Sphere{0.1}, {}, 0.1};
  EXPECT_DOUBLE_EQ(signed_distance(p, Vec2{{0.3, 0.0}}), 0.2);
  EXPECT_DOUBLE_EQ(signed_distance(p, Vec2{}), -0.1);
}

TEST(SignedDistance, PolygonMatchesDenseBoundaryOracle) {
  Rng rng(1);
  auto const p = sample_polygon(rng, PolygonLaw{}, 0.1, Vec2{{0.2, -0.1}});
  for (int q = 0; q < 1000; ++q) {
    Vec2 const x = random_point<2>(rng, -0.1, 0.5) - Vec2{{0.0, 0.3}};
    ASSERT_NEAR(signed_distance(p, x), polygon_oracle(p, x, 100000), 1e-9) << q;
  }
}

TEST(SignedDistance, EllipseMatchesDenseBoundaryOracle) {
  Rng rng(2);
  for (int s = 0; s < 5; ++s) {
    auto const p = sample_ellipsoid<2>(rng, EllipsoidLaw{}, 0.1, Vec2{{0.1, 0.1}});
    for (int q = 0; q < 200; ++q) {
      Vec2 const x = random_point<2>(rng, -0.15, 0.35);
      ASSERT_NEAR(signed_distance(p, x), ellipse_oracle(p, x, 200000), 1e-9);
    }
    // Points on the principal axes exercise the degenerate branch.
    auto const& e = std::get<Ellipsoid<2>>(p.shape);
    for (double t : {0.0, 0.01, 0.05, 0.09, 0.2}) {
      for (int ax = 0; ax < 2; ++ax) {
        Vec2 const x = p.center + t * e.axes[ax];
        ASSERT_NEAR(signed_distance(p, x), ellipse_oracle(p, x, 200000), 1e-9) << t << " " << ax;
      }
    }
  }
}

TEST(SignedDistance, EllipsoidSliceMatchesEllipse) {
  // Outside the ellipsoid, points in the major/mid principal plane have their
  // closest point in that plane.  Inside, the minor axis may be closer.
  Ellipsoid<3> e{{0.1, 0.08, 0.06}, {Vec3{{1, 0, 0}}, Vec3{{0, 1, 0}}, Vec3{{0, 0, 1}}}};
  Particle<3> const p{e, {}, 0.1};
  Particle<2> const q{Ellipsoid<2>{{0.1, 0.08}, {Vec2{{1, 0}}, Vec2{{0, 1}}}}, {}, 0.1};
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    Vec2 const x = random_point<2>(rng, -0.2, 0.2);
    double const d3 = signed_distance(p, Vec3{{x[0], x[1], 0.0}});
    double const d2 = signed_distance(q, x);
    if (d2 > 0.0) {
      ASSERT_NEAR(d3, d2, 1e-12);
    } else {
      ASSERT_GE(d3, d2 - 1e-15);
      ASSERT_GE(d3, -0.06);
    }
  }
  // Centre lies at depth equal to the minor semi-axis.
  EXPECT_NEAR(signed_distance(p, Vec3{}), -0.06, 1e-15);
}

TEST(SignedDistance, EllipsoidSatisfiesDistanceProperties) {
  Rng rng(4);
  for (int s = 0; s < 20; ++s) {
    auto const p = sample_ellipsoid<3>(rng, EllipsoidLaw{}, 0.1, Vec3{{0.3, 0.2, 0.1}});
    auto const& e = std::get<Ellipsoid<3>>(p.shape);
    for (int q = 0; q < 200; ++q) {
      Vec3 const x = random_point<3>(rng, 0.0, 0.5);
      double const d = signed_distance(p, x);
      // The closest boundary point is at distance |d| and lies on the surface:
      // moving from x towards the centre never crosses the surface faster than
      // unit speed.  Check via sampled boundary points.
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 4000; ++k) {
        double const u = rng.uniform(-1.0, 1.0), th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double const r = std::sqrt(1.0 - u * u);
        Vec3 const y = p.center + e.semi_axes[0] * r * std::cos(th) * e.axes[0] +
                       e.semi_axes[1] * r * std::sin(th) * e.axes[1] + e.semi_axes[2] * u * e.axes[2];
        best = std::min(best, norm(x - y));
      }
      ASSERT_LE(std::abs(d), best + 1e-12);
      ASSERT_EQ(d < 0.0, contains(p, x));
      double const r = norm(x - p.center);
      ASSERT_GE(d, r - p.circumscribed_radius - 1e-15);
      ASSERT_LE(std::abs(d), r + p.circumscribed_radius);
    }
  }
}

TEST(SignedDistance, SignBoundAndTranslation) {
  Rng rng(5);
  std::vector<Particle<2>> shapes;
  for (int i = 0; i < 10; ++i) {
    shapes.push_back(sample_polygon(rng, PolygonLaw{}, 0.1));
    shapes.push_back(sample_ellipsoid<2>(rng, EllipsoidLaw{}, 0.1));
  }
  shapes.push_back(Particle<2>{Sphere{0.1}, {}, 0.1});
  for (auto const& p : shapes) {
    for (int q = 0; q < 500; ++q) {
      Vec2 const x = random_point<2>(rng, -0.2, 0.2);
      double const d = signed_distance(p, x);
      double const r = norm(x - p.center);
      ASSERT_GE(d, r - p.circumscribed_radius - 1e-15);
      ASSERT_LE(std::abs(d), r + p.circumscribed_radius);
      ASSERT_EQ(d < 0.0, contains(p, x));
      Vec2 const t{{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
      ASSERT_NEAR(signed_distance(translated(p, t), x + t), d, 1e-14);
    }
  }
}

TEST(SamplePolygon, ZeroVarianceGivesRegularHexagon) {
  PolygonLaw law;
  law.vertex_sd = 0.0;
  law.angle_sd = 0.0;
  law.radial_mean = 1.0;
  law.radial_sd = 0.0;
  Rng rng(6);
  auto const p = sample_polygon(rng, law, 0.1);
  auto const& v = std::get<Polygon>(p.shape).vertices;
  ASSERT_EQ(v.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(norm(v[i]), 0.1, 1e-15);
    EXPECT_NEAR(norm(v[(i + 1) % 6] - v[i]), 0.1, 1e-15);
  }
}

TEST(SamplePolygon, VertexCountsAndCap) {
  Rng rng(7);
  int in_range = 0;
  int const draws = 20000;
  for (int i = 0; i < draws; ++i) {
    auto const p = sample_polygon(rng, PolygonLaw{}, 0.1);
    auto const& v = std::get<Polygon>(p.shape).vertices;
    if (v.size() >= 4 && v.size() <= 8) ++in_range;
    for (auto const& x : v) ASSERT_LE(norm(x), p.circumscribed_radius);
    ASSERT_NEAR(p.circumscribed_radius, 0.1, 1e-16);
    ASSERT_TRUE(contains(p, p.center));
    ASSERT_LT(signed_distance(p, p.center), 0.0);
  }
  EXPECT_GE(in_range, static_cast<int>(0.999 * draws));
}

TEST(SamplePolygon, ExhaustedBudgetThrows) {
  PolygonLaw law;
  law.vertex_mean = 1.0;
  law.vertex_sd = 0.0;
  Rng rng(8);
  EXPECT_THROW(sample_polygon(rng, law, 0.1), ShapeSamplingError);
}

TEST(SampleEllipsoid, DegenerateLawsGiveSphere) {
  EllipsoidLaw law{1.0, 1.0, 1.0, 1.0};
  Rng rng(9);
  auto const p = sample_ellipsoid<3>(rng, law, 0.1);
  for (int q = 0; q < 200; ++q) {
    Vec3 const x = random_point<3>(rng, -0.3, 0.3);
    ASSERT_NEAR(signed_distance(p, x), norm(x) - 0.1, 1e-12);
  }
}

TEST(SampleEllipsoid, AxisOrderingAndRadius) {
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    auto const p = sample_ellipsoid<3>(rng, EllipsoidLaw{}, 0.1);
    auto const& e = std::get<Ellipsoid<3>>(p.shape);
    ASSERT_EQ(e.semi_axes[0], 0.1);
    ASSERT_EQ(p.circumscribed_radius, e.semi_axes[0]);
    ASSERT_LE(e.semi_axes[2], e.semi_axes[1]);
    ASSERT_LE(e.semi_axes[1], e.semi_axes[0]);
    ASSERT_GE(e.semi_axes[1], 0.07);
    ASSERT_LE(e.semi_axes[2], 0.07);
    for (int a = 0; a < 3; ++a) {
      ASSERT_NEAR(norm(e.axes[a]), 1.0, 1e-12);
      for (int b = a + 1; b < 3; ++b) ASSERT_NEAR(dot(e.axes[a], e.axes[b]), 0.0, 1e-12);
    }
  }
}

TEST(SampleEllipsoid, RotationsHaveNoAxisBias) {
  // Mean of the major-axis direction squared components is 1/3 each.
  Rng rng(11);
  std::array<double, 3> acc{};
  int const n = 20000;
  for (int i = 0; i < n; ++i) {
    auto const r = random_rotation(rng);
    for (int a = 0; a < 3; ++a) acc[a] += r[0][a] * r[0][a];
  }
  for (double s : acc) EXPECT_NEAR(s / n, 1.0 / 3.0, 0.01);
}

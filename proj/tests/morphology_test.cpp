// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "wangls/morphology.hpp"
#include "wangls/packing.hpp"

using namespace wangls;

namespace {

/// Fields of two equal disks in an isolated tile, evaluated analytically.
struct TwoDisks {
  GridSpec<2> grid{41};
  TileScalars ls1, ls2, ls3;
  TwoDisks() {
    ls1.assign(1, std::vector<double>(grid.size()));
    ls2 = ls1;
    ls3 = ls1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto const x = grid.node(grid.multi(i));
      double const a = norm(x - Vec2{-0.2, 0.0}) - 0.1;
      double const b = norm(x - Vec2{0.2, 0.0}) - 0.1;
      ls1[0][i] = std::min(a, b);
      ls2[0][i] = std::max(a, b);
      ls3[0][i] = 10.0;
    }
  }
  std::size_t idx(double x, double y) const {
    return grid.index({static_cast<int>(std::lround((x + 0.5) * 40)), static_cast<int>(std::lround((y + 0.5) * 40))});
  }
};

std::size_t solid_count(TilePhase const& p) {
  std::size_t n = 0;
  for (auto const& t : p) {
    for (auto v : t) n += v;
  }
  return n;
}

PackingParams<2> foam_params(std::uint64_t seed) {
  PackingParams<2> p;
  p.schedule = {Phase{0.1, 0.01, 0.03}};
  p.track_ls3 = true;
  p.seed = seed;
  return p;
}

}  // namespace

TEST(Morph, OffsetIdentityAndDiskDilation) {
  TwoDisks s;
  EXPECT_EQ(offset(s.ls1, 0.0), s.ls1);
  auto const grown = offset(s.ls1, -0.02);
  auto const shrunk = offset(s.ls1, 0.02);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    double const r = norm(s.grid.node(s.grid.multi(i)) - Vec2{-0.2, 0.0});
    if (s.grid.node(s.grid.multi(i))[0] > 0.0) continue;
    EXPECT_EQ(grown[0][i] <= 0.0, r <= 0.12 + 1e-12) << r;
    EXPECT_EQ(shrunk[0][i] <= 0.0, r <= 0.08 + 1e-12) << r;
  }
}

TEST(Morph, ClosedFoamWallsSitBetweenParticles) {
  TwoDisks s;
  auto const fc = closed_foam(s.ls1, s.ls2, 0.015);
  EXPECT_DOUBLE_EQ(fc[0][s.idx(0.0, 0.0)], -0.015);
  EXPECT_GT(fc[0][s.idx(-0.2, 0.0)], 0.0);
  for (double v : fc[0]) EXPECT_GE(v, -0.015 - 1e-15);
}

TEST(Morph, OpenFoamLigamentCoreAtTriplePoint) {
  TileScalars const l{{0.3}};
  EXPECT_DOUBLE_EQ(open_foam(l, l, l, 0.02)[0][0], -0.02);
  TwoDisks s;
  EXPECT_GT(open_foam(s.ls1, s.ls2, s.ls3, 0.02)[0][s.idx(0.0, 0.0)], 0.0);
}

TEST(Morph, CombineIsUnionOfSolids) {
  TwoDisks s;
  auto const fc = closed_foam(s.ls1, s.ls2, 0.02);
  TileScalars const inf(1, std::vector<double>(s.grid.size(), INFINITY));
  EXPECT_EQ(combine(fc, inf), fc);
  TileScalars fo = offset(s.ls1, 0.0);
  auto const f = combine(fc, fo);
  auto const pc = extract_phase(fc), po = extract_phase(fo), pf = extract_phase(f);
  for (std::size_t i = 0; i < s.grid.size(); ++i) EXPECT_EQ(pf[0][i], pc[0][i] | po[0][i]);
}

TEST(Morph, ExtractPhaseThresholds) {
  EXPECT_EQ(solid_count(extract_phase({std::vector<double>(25, -1.0)})), 25u);
  EXPECT_EQ(solid_count(extract_phase({std::vector<double>(25, 1.0)})), 0u);
  GridSpec<2> const g(41);
  TileScalars f(1, std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) f[0][i] = g.node(g.multi(i))[0];
  // Antisymmetric about x = 0: 20 columns solid plus the zero column.
  EXPECT_EQ(solid_count(extract_phase(f)), 21u * 41u);
}

TEST(Morph, ZeroThicknessLeavesOnlyInterfaces) {
  auto const pk = pack(make_periodic<2>(), GridSpec<2>(101), foam_params(1));
  auto const& ls = pk.fields().ls;
  double const h = pk.fields().grid.h();
  auto const pc = extract_phase(closed_foam(ls[0], ls[1], 0.0));
  auto const po = extract_phase(open_foam(ls[0], ls[1], ls[2], 0.0));
  std::size_t near_wall = 0, near_ligament = 0;
  for (std::size_t i = 0; i < ls[0][0].size(); ++i) {
    near_wall += ls[1][0][i] - ls[0][0][i] <= 2.0 * h;
    near_ligament += 0.5 * (ls[2][0][i] + ls[1][0][i]) - ls[0][0][i] <= 2.0 * h;
  }
  EXPECT_LE(solid_count(pc), near_wall);
  EXPECT_LE(solid_count(po), near_ligament);
  EXPECT_LT(solid_count(pc), ls[0][0].size() / 10);
}

TEST(Morph, ThicknessIsMonotone) {
  auto const pk = pack(make_periodic<2>(), GridSpec<2>(61), foam_params(2));
  auto const& ls = pk.fields().ls;
  std::size_t prev_c = 0, prev_o = 0;
  for (double t : {0.0, 0.005, 0.01, 0.02, 0.04}) {
    auto const c = solid_count(extract_phase(closed_foam(ls[0], ls[1], t)));
    auto const o = solid_count(extract_phase(open_foam(ls[0], ls[1], ls[2], t)));
    EXPECT_GE(c, prev_c);
    EXPECT_GE(o, prev_o);
    prev_c = c;
    prev_o = o;
  }
}

TEST(Morph, LigamentsThickenAtWallJunctions) {
  GridSpec<2> const grid(201);
  auto const pk = pack(make_periodic<2>(), grid, foam_params(3));
  auto const& ls = pk.fields().ls;
  MorphParams mp;
  mp.t_c = 0.015;
  mp.t_o = 0.020;
  auto const solid = extract_phase(morph(pk.fields(), mp))[0];
  double const h = grid.h();
  int const n = grid.n();
  auto local_fraction = [&](IVec<2> c) {
    int s = 0, k = 0;
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        if (dx * dx + dy * dy > 4) continue;
        IVec<2> q{c[0] + dx, c[1] + dy};
        if (q[0] < 0 || q[1] < 0 || q[0] >= n || q[1] >= n) continue;
        s += solid[grid.index(q)];
        ++k;
      }
    }
    return static_cast<double>(s) / k;
  };
  double junction = 0.0, wall = 0.0;
  int nj = 0, nw = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double const d21 = ls[1][0][i] - ls[0][0][i];
    double const d31 = ls[2][0][i] - ls[0][0][i];
    if (d31 <= h) {
      junction += local_fraction(grid.multi(i));
      ++nj;
    } else if (d21 <= 0.5 * h && d31 >= 0.1) {
      wall += local_fraction(grid.multi(i));
      ++nw;
    }
  }
  ASSERT_GT(nj, 0);
  ASSERT_GT(nw, 0);
  EXPECT_GT(junction / nj, wall / nw);
}

TEST(Morph, RefusesUntrackedThirdField) {
  auto const pk = pack(make_periodic<2>(), GridSpec<2>(21), PackingParams<2>{{Phase{0.1, 0.01}}});
  MorphParams mp;
  mp.t_o = 0.03;
  EXPECT_THROW(morph(pk.fields(), mp), MorphError);
  mp.t_o = -1.0;
  mp.t_c = 0.02;
  EXPECT_NO_THROW(morph(pk.fields(), mp));
  EXPECT_THROW(closed_foam(pk.fields().ls[0], {}, 0.02), MorphError);
}

TEST(Morph, GammaOnlyOffsetsNearestField) {
  auto const pk = pack(make_periodic<2>(), GridSpec<2>(21), PackingParams<2>{{Phase{0.1, 0.01}}});
  MorphParams mp;
  mp.gamma = -0.02;
  auto const f = morph(pk.fields(), mp);
  EXPECT_EQ(f, offset(pk.fields().ls[0], -0.02));
}

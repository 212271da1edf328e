// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "wangls/tileset.hpp"

using namespace wangls;

namespace {

// Every class of every mask equals the copy-propagation fixpoint of any of
// its members.
template <int D>
void expect_matches_oracle(TileSet<D> const& set) {
  auto const an = analyze_codes(set);
  for (unsigned mask = 1; mask < static_cast<unsigned>(kNumMasks<D>); ++mask) {
    std::size_t covered = 0;
    for (int cls = 0; cls < an.num_classes(mask); ++cls) {
      auto const& members = an.members(mask, cls);
      covered += members.size();
      std::set<EntityRef> const expected(members.begin(), members.end());
      ASSERT_EQ(oracle::copy_fixpoint(set, mask, members.front()), expected)
          << "mask " << mask << " class " << cls;
    }
    EXPECT_EQ(covered, static_cast<std::size_t>(set.size()) * mask_subsets(mask).size());
  }
}

int vertex_code_sw(TileCodes<2> const& t) { return t[kSouth] / 2; }

}  // namespace

TEST(TileSet, RejectsDuplicatesNamingIndices) {
  try {
    TileSet<2>({{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}}, {2, 2});
    FAIL() << "expected TileSetError";
  } catch (TileSetError const& e) {
    EXPECT_NE(std::string(e.what()).find("0 and 2"), std::string::npos) << e.what();
  }
}

TEST(TileSet, RejectsOutOfRangeCodesAndEmptySets) {
  EXPECT_THROW(TileSet<2>({{0, 2, 0, 0}}, {2, 2}), TileSetError);
  EXPECT_THROW(TileSet<2>({}, {1, 1}), TileSetError);
}

TEST(AnalyzeCodes, VertexClassCounts) {
  EXPECT_EQ(analyze_codes(make_c16()).num_vertex_classes(), 1);
  EXPECT_EQ(analyze_codes(make_v16()).num_vertex_classes(), 2);
  auto const puc = analyze_codes(make_periodic<2>());
  ASSERT_EQ(puc.num_vertex_classes(), 1);
  EXPECT_EQ(puc.members(3, 0).size(), 4u);
}

TEST(AnalyzeCodes, PeriodicCubeHasOneClassPerEntityType) {
  auto const an = analyze_codes(make_periodic<3>());
  EXPECT_EQ(an.num_vertex_classes(), 1);
  EXPECT_EQ(an.members(7, 0).size(), 8u);
  for (int axis = 0; axis < 3; ++axis) EXPECT_EQ(an.num_edge_classes(axis), 1);
}

TEST(AnalyzeCodes, MatchesCopyPropagationOracle) {
  expect_matches_oracle(make_c16());
  expect_matches_oracle(make_v16());
  expect_matches_oracle(make_periodic<2>());
  expect_matches_oracle(make_cubes16());
  Rng rng(7);
  for (int i = 0; i < 100; ++i) expect_matches_oracle(oracle::random_tileset<2>(rng, 20, 4));
  for (int i = 0; i < 20; ++i) expect_matches_oracle(oracle::random_tileset<3>(rng, 20, 3));
}

TEST(AnalyzeCodes, VertexMappingRecoversVertexCodes) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    int const vc = 2 + static_cast<int>(rng.below(2));
    std::set<std::array<int, 4>> uniq;
    int const n = 1 + static_cast<int>(rng.below(20));
    for (int i = 0; i < n; ++i) {
      std::array<int, 4> v{};
      for (auto& x : v) x = static_cast<int>(rng.below(vc));
      uniq.insert(v);
    }
    std::vector<std::array<int, 4>> tiles(uniq.begin(), uniq.end());
    auto const set = from_vertex_codes(tiles, vc);
    auto const an = analyze_codes(set);
    // Corner bits: bit0 = east, bit1 = north.  (NW, NE, SE, SW) ordering.
    auto vertex_of = [&](int t, unsigned bits) {
      bool const east = bits & 1u, north = bits & 2u;
      if (north) return east ? tiles[t][1] : tiles[t][0];
      return east ? tiles[t][2] : tiles[t][3];
    };
    // Classes never mix vertex codes.
    for (int cls = 0; cls < an.num_vertex_classes(); ++cls) {
      auto const& m = an.members(3, cls);
      for (auto const& r : m) EXPECT_EQ(vertex_of(r.tile, r.bits), vertex_of(m[0].tile, m[0].bits));
    }
  }
  // The complete vertex set recovers exactly one class per vertex code.
  for (int vc = 2; vc <= 3; ++vc) {
    std::vector<std::array<int, 4>> all;
    for (int k = 0; k < vc * vc * vc * vc; ++k) {
      all.push_back({k % vc, (k / vc) % vc, (k / vc / vc) % vc, (k / vc / vc / vc) % vc});
    }
    EXPECT_EQ(analyze_codes(from_vertex_codes(all, vc)).num_vertex_classes(), vc);
  }
}

TEST(ValidateStochastic, C16EveryPairHasFourTiles) {
  auto const rep = validate_stochastic(make_c16());
  EXPECT_TRUE(rep.is_stochastic);
  int full = 0;
  for (auto const& c : rep.combinations) {
    if (c.codes[0] >= 0 && c.codes[1] >= 0) {
      EXPECT_EQ(c.count, 4);
      ++full;
    }
  }
  EXPECT_EQ(full, 4);
  EXPECT_TRUE(rep.warnings.empty());
}

TEST(ValidateStochastic, V16IsStochastic) {
  auto const rep = validate_stochastic(make_v16());
  EXPECT_TRUE(rep.is_stochastic);
  // Only pairs sharing the north-west vertex code are realizable; each then
  // leaves the south-east vertex free.
  int full = 0;
  for (auto const& c : rep.combinations) {
    if (c.codes[0] >= 0 && c.codes[1] >= 0) {
      // north = (NW, NE), west = (NW, SW): both lead with the NW vertex.
      EXPECT_EQ(c.codes[0] / 2, c.codes[1] / 2);
      EXPECT_EQ(c.count, 2);
      ++full;
    }
  }
  EXPECT_EQ(full, 8);
}

TEST(ValidateStochastic, RemovingATileReducesItsCombination) {
  auto tiles = make_c16().tiles();
  tiles.erase(tiles.begin() + 5);
  auto const rep = validate_stochastic(TileSet<2>(tiles, {2, 2}));
  EXPECT_TRUE(rep.is_stochastic);
  int threes = 0;
  for (auto const& c : rep.combinations) {
    if (c.codes[0] >= 0 && c.codes[1] >= 0 && c.count == 3) ++threes;
  }
  EXPECT_EQ(threes, 1);
}

TEST(ValidateStochastic, DetectsDeficientSets) {
  // East code 1 is produced but no tile accepts it on the west.
  TileSet<2> set({{0, 1, 0, 0}}, {2, 1});
  auto const rep = validate_stochastic(set);
  EXPECT_FALSE(rep.is_stochastic);
  EXPECT_FALSE(rep.deficient.empty());
}

TEST(ValidateStochastic, Cubes16IsStochasticWithTwoPerTriple) {
  auto const rep = validate_stochastic(make_cubes16());
  EXPECT_TRUE(rep.is_stochastic);
  for (auto const& c : rep.combinations) {
    if (c.codes[0] >= 0 && c.codes[1] >= 0 && c.codes[2] >= 0) EXPECT_EQ(c.count, 2);
  }
}

TEST(NeighborGrids, PeriodicTileFillsEveryCell) {
  auto const set = make_periodic<2>();
  auto const grids = build_neighbor_grids(set, analyze_codes(set));
  for (auto const& cell : grids[0].cells) EXPECT_EQ(cell, std::vector<int>{0});
}

TEST(NeighborGrids, C16EastCellHasEightTiles) {
  auto const set = make_c16();
  auto const grids = build_neighbor_grids(set, analyze_codes(set));
  for (int t = 0; t < set.size(); ++t) {
    auto const& east = grids[t].at({1, 0});
    EXPECT_EQ(east.size(), 8u);
    for (int u : east) EXPECT_EQ(set[u][kWest], set[t][kEast]);
    EXPECT_EQ(grids[t].at({0, 0}), std::vector<int>{t});
    EXPECT_EQ(grids[t].at({1, 1}).size(), 16u);  // single vertex class
  }
}

TEST(NeighborGrids, V16DiagonalFollowsVertexClass) {
  auto const set = make_v16();
  auto const grids = build_neighbor_grids(set, analyze_codes(set));
  for (int t = 0; t < set.size(); ++t) {
    if (set[t] != TileCodes<2>{0, 0, 0, 0}) continue;
    auto const& ne = grids[t].at({1, 1});
    std::vector<int> expected;
    for (int u = 0; u < set.size(); ++u) {
      if (vertex_code_sw(set[u]) == 0) expected.push_back(u);
    }
    EXPECT_EQ(ne, expected);
    EXPECT_EQ(ne.size(), 8u);
  }
}

TEST(NeighborGrids, EdgeAndFaceCellsMatchCodes) {
  auto const set = make_cubes16();
  auto const grids = build_neighbor_grids(set, analyze_codes(set));
  for (int t = 0; t < set.size(); ++t) {
    for (int a = 0; a < 3; ++a) {
      IVec<3> o{};
      o[a] = -1;
      for (int u : grids[t].at(o)) EXPECT_EQ(set.code(u, a, true), set.code(t, a, false));
    }
  }
}

TEST(Assemble, PeriodicSetFillsWithZero) {
  auto const t = assemble(make_periodic<2>(), {4, 4}, 3);
  EXPECT_EQ(t.cells, std::vector<int>(16, 0));
}

TEST(Assemble, V16TilingIsCompatible) {
  auto const set = make_v16();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto const t = assemble(set, {10, 10}, seed);
    EXPECT_EQ(t.count(), 100u);
    // 2 * 10 * 9 = 180 abutting pairs, all checked.
    EXPECT_FALSE(check_tiling(set, t).has_value());
  }
}

TEST(Assemble, SameSeedSameTiling) {
  auto const set = make_c16();
  EXPECT_EQ(assemble(set, {2, 2}, 99), assemble(set, {2, 2}, 99));
  auto const a = assemble(set, {20, 20}, 1), b = assemble(set, {20, 20}, 2);
  EXPECT_NE(a.cells, b.cells);
}

TEST(Assemble, CubesAreCompatible) {
  auto const set = make_cubes16();
  auto const t = assemble(set, IVec<3>{5, 5, 3}, 4);
  EXPECT_EQ(t.count(), 75u);
  EXPECT_FALSE(check_tiling(set, t).has_value());
}

TEST(Assemble, ThrowsWhenNoCandidate) {
  TileSet<2> set({{0, 1, 0, 0}}, {2, 1});
  EXPECT_THROW(assemble(set, {4, 1}, 0), NoCandidateError);
}

TEST(TileSetFormat, RoundTripsAndReportsLines) {
  std::ostringstream out;
  write_tileset(out, make_v16());
  std::istringstream in(out.str());
  auto const parsed = parse_tileset(in);
  ASSERT_TRUE(std::holds_alternative<TileSet<2>>(parsed));
  EXPECT_EQ(std::get<TileSet<2>>(parsed).tiles(), make_v16().tiles());

  std::istringstream bad("dimension = 2\ncodes_x = 2\ncodes_y = 2\n0: 0 0 0\n");
  try {
    parse_tileset(bad);
    FAIL();
  } catch (ParseError const& e) {
    EXPECT_EQ(e.line(), 4);
  }
  std::istringstream cubes("# cube\ndimension=3\ncodes_x=1\ncodes_y=1\ncodes_z=1\n0: 0 0 0 0 0 0\n");
  EXPECT_TRUE(std::holds_alternative<TileSet<3>>(parse_tileset(cubes)));
}

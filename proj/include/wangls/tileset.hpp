// SPDX-License-Identifier: Apache-2.0
#ifndef WANGLS_TILESET_HPP
#define WANGLS_TILESET_HPP

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "rng.hpp"
#include "vec.hpp"

namespace wangls {

class TileSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoCandidateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tile set text with a line number attached.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, std::string const& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Sides are indexed 2 * axis + (high ? 1 : 0):
//   0 = west (x-), 1 = east (x+), 2 = south (y-), 3 = north (y+),
//   4 = bottom (z-), 5 = top (z+).
constexpr int side_index(int axis, bool high) { return 2 * axis + (high ? 1 : 0); }

enum Side2 : int { kWest = 0, kEast = 1, kSouth = 2, kNorth = 3 };
enum Side3 : int { kBottom = 4, kTop = 5 };

/// Number of boundary entities of a D-cube keyed by an axis mask: the mask
/// selects the axes on which the entity sits at the boundary, the bits (a
/// subset of the mask) choose the high side.  |mask| = 1 are edges (2D) or
/// faces (3D); |mask| = D are vertices; |mask| = 2 in 3D are cube edges.
template <int D>
constexpr int kNumMasks = 1 << D;

constexpr int popcount(unsigned x) {
  int n = 0;
  for (; x; x &= x - 1) ++n;
  return n;
}

/// A tile is its code tuple, one code per side.
template <int D>
using TileCodes = std::array<int, 2 * D>;

template <int D>
class TileSet {
 public:
  TileSet(std::vector<TileCodes<D>> tiles, std::array<int, D> code_counts)
      : tiles_(std::move(tiles)), code_counts_(code_counts) {
    if (tiles_.empty()) throw TileSetError("tile set is empty");
    for (int a = 0; a < D; ++a) {
      if (code_counts_[a] < 1) throw TileSetError("code count must be positive");
    }
    for (std::size_t t = 0; t < tiles_.size(); ++t) {
      for (int s = 0; s < 2 * D; ++s) {
        int const c = tiles_[t][s];
        if (c < 0 || c >= code_counts_[s / 2]) {
          std::ostringstream ss;
          ss << "tile " << t << " side " << s << " code " << c << " out of range [0, "
             << code_counts_[s / 2] << ")";
          throw TileSetError(ss.str());
        }
      }
    }
    std::map<TileCodes<D>, std::size_t> seen;
    for (std::size_t t = 0; t < tiles_.size(); ++t) {
      auto [it, inserted] = seen.emplace(tiles_[t], t);
      if (!inserted) {
        throw TileSetError("duplicate tiles " + std::to_string(it->second) + " and " +
                           std::to_string(t));
      }
    }
  }

  static constexpr int dimension = D;

  int size() const { return static_cast<int>(tiles_.size()); }
  TileCodes<D> const& operator[](int t) const { return tiles_[t]; }
  std::vector<TileCodes<D>> const& tiles() const { return tiles_; }
  std::array<int, D> const& code_counts() const { return code_counts_; }

  int code(int tile, int axis, bool high) const { return tiles_[tile][side_index(axis, high)]; }

 private:
  std::vector<TileCodes<D>> tiles_;
  std::array<int, D> code_counts_;
};

/// Reference to one boundary entity instance: a tile plus (mask, bits).
struct EntityRef {
  int tile;
  unsigned bits;
  friend bool operator==(EntityRef const&, EntityRef const&) = default;
  friend auto operator<=>(EntityRef const&, EntityRef const&) = default;
};

/// Translation (in tile units) carrying a point near entity `from` to the
/// corresponding point near entity `to`; both on the same mask.
template <int D>
IVec<D> entity_translation(unsigned mask, unsigned from_bits, unsigned to_bits) {
  IVec<D> t{};
  for (int a = 0; a < D; ++a) {
    if (mask & (1u << a)) {
      t[a] = static_cast<int>((to_bits >> a) & 1u) - static_cast<int>((from_bits >> a) & 1u);
    }
  }
  return t;
}

/// Connectivity classes of every boundary entity type.
///
/// For each mask, the graph nodes are face-codes restricted to a part of the
/// face (the half of an edge in 2D, the corner of a face for cube vertices),
/// arcs are entity instances. Connected components are the classes.
template <int D>
class ConnectivityAnalysis {
 public:
  int num_classes(unsigned mask) const { return static_cast<int>(members_[mask].size()); }

  int class_of(unsigned mask, int tile, unsigned bits) const {
    return class_of_[mask][static_cast<std::size_t>(tile) * kNumMasks<D> + bits];
  }

  std::vector<EntityRef> const& members(unsigned mask, int cls) const {
    return members_[mask][cls];
  }

  /// Vertex classes (mask with all axes set).
  int num_vertex_classes() const { return num_classes(kNumMasks<D> - 1); }

  /// Cube-edge classes along `axis` (3D only).
  int num_edge_classes(int axis) const {
    static_assert(D == 3);
    return num_classes((kNumMasks<D> - 1) & ~(1u << axis));
  }

  int tile_count() const { return tile_count_; }

 private:
  template <int DD>
  friend ConnectivityAnalysis<DD> analyze_codes(TileSet<DD> const& set);

  int tile_count_ = 0;
  std::array<std::vector<int>, kNumMasks<D>> class_of_;
  std::array<std::vector<std::vector<EntityRef>>, kNumMasks<D>> members_;
};

/// All bit patterns of `mask` (subsets of mask), ascending.
inline std::vector<unsigned> mask_subsets(unsigned mask) {
  std::vector<unsigned> out;
  for (unsigned b = 0;; b = (b - mask) & mask) {
    out.push_back(b);
    if (b == mask) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <int D>
ConnectivityAnalysis<D> analyze_codes(TileSet<D> const& set) {
  ConnectivityAnalysis<D> out;
  int const n = set.size();
  out.tile_count_ = n;
  for (unsigned mask = 1; mask < static_cast<unsigned>(kNumMasks<D>); ++mask) {
    // node key: (axis, code, bits of the other mask axes)
    std::map<std::tuple<int, int, unsigned>, int> node_ids;
    std::vector<int> node_axis;
    struct Arc {
      EntityRef ref;
      std::vector<int> nodes;
    };
    std::vector<Arc> arcs;
    auto const subsets = mask_subsets(mask);
    for (int t = 0; t < n; ++t) {
      for (unsigned bits : subsets) {
        Arc arc{{t, bits}, {}};
        for (int a = 0; a < D; ++a) {
          if (!(mask & (1u << a))) continue;
          bool const high = (bits >> a) & 1u;
          auto key = std::make_tuple(a, set.code(t, a, high), bits & ~(1u << a));
          auto [it, inserted] = node_ids.emplace(key, static_cast<int>(node_axis.size()));
          if (inserted) node_axis.push_back(a);
          arc.nodes.push_back(it->second);
        }
        // Bipartite (multipartite in 3D): an arc never joins two nodes of one axis.
        for (std::size_t i = 0; i < arc.nodes.size(); ++i) {
          for (std::size_t j = i + 1; j < arc.nodes.size(); ++j) {
            if (node_axis[arc.nodes[i]] == node_axis[arc.nodes[j]]) {
              throw std::logic_error("connectivity graph is not multipartite");
            }
          }
        }
        arcs.push_back(std::move(arc));
      }
    }

    std::vector<std::vector<int>> node_arcs(node_axis.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      for (int nd : arcs[i].nodes) node_arcs[nd].push_back(static_cast<int>(i));
    }

    // Iterative depth-first search over nodes.
    std::vector<int> component(node_axis.size(), -1);
    int num_components = 0;
    std::vector<int> stack;
    for (std::size_t start = 0; start < node_axis.size(); ++start) {
      if (component[start] >= 0) continue;
      component[start] = num_components;
      stack.push_back(static_cast<int>(start));
      while (!stack.empty()) {
        int const nd = stack.back();
        stack.pop_back();
        for (int ai : node_arcs[nd]) {
          for (int other : arcs[ai].nodes) {
            if (component[other] < 0) {
              component[other] = num_components;
              stack.push_back(other);
            }
          }
        }
      }
      ++num_components;
    }

    // Renumber classes by first appearance in (tile, bits) order.
    std::vector<int> renumber(num_components, -1);
    int next = 0;
    auto& class_of = out.class_of_[mask];
    class_of.assign(static_cast<std::size_t>(n) * kNumMasks<D>, -1);
    auto& members = out.members_[mask];
    for (auto const& arc : arcs) {
      int& cls = renumber[component[arc.nodes.front()]];
      if (cls < 0) {
        cls = next++;
        members.emplace_back();
      }
      class_of[static_cast<std::size_t>(arc.ref.tile) * kNumMasks<D> + arc.ref.bits] = cls;
      members[cls].push_back(arc.ref);
    }
  }
  return out;
}

struct StochasticReport {
  struct Combination {
    // constraint codes per already-placed side; -1 when unconstrained
    std::vector<int> codes;
    int count;
  };
  bool is_stochastic = true;
  std::vector<Combination> combinations;
  std::vector<Combination> deficient;  // count == 0
  std::vector<Combination> warnings;   // count == 1
};

namespace detail {

// Scanline constraint sides for a new cell: north (y+), west (x-) and in 3D
// top (z+).  The candidate's own side code must equal the placed neighbour's
// opposite code.
template <int D>
constexpr std::array<int, D> constraint_sides() {
  if constexpr (D == 2) {
    return {kNorth, kWest};
  } else {
    return {kNorth, kWest, kTop};
  }
}

template <int D>
bool has_code(TileSet<D> const& set, int side, int code) {
  for (auto const& t : set.tiles()) {
    if (t[side] == code) return true;
  }
  return false;
}

// (n, w) realizable in the plane spanned by axes (ay, ax): a placed tile above
// with low-ay code n, a placed tile to the left with high-ax code w, and a
// diagonal tile compatible with both.
template <int D>
bool pair_realizable(TileSet<D> const& set, int ax, int ay, int w, int n) {
  int const sz = set.size();
  for (int above = 0; above < sz; ++above) {
    if (set.code(above, ay, false) != n) continue;
    for (int left = 0; left < sz; ++left) {
      if (set.code(left, ax, true) != w) continue;
      for (int diag = 0; diag < sz; ++diag) {
        if (set.code(diag, ax, true) == set.code(above, ax, false) &&
            set.code(diag, ay, false) == set.code(left, ay, true)) {
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace detail

/// Counts compatible tiles for every constraint combination that can occur
/// during scanline assembly (including first row/column cells with fewer
/// constraints).
template <int D>
StochasticReport validate_stochastic(TileSet<D> const& set) {
  StochasticReport rep;
  auto const sides = detail::constraint_sides<D>();
  // The placed neighbour across `side` exposes the opposite code, so
  // realizable constraint values are codes present on the opposite side.
  std::array<std::vector<int>, D> values;
  for (int i = 0; i < D; ++i) {
    int const side = sides[i];
    int const opposite = side ^ 1;
    values[i].push_back(-1);
    for (int c = 0; c < set.code_counts()[side / 2]; ++c) {
      if (detail::has_code(set, opposite, c)) values[i].push_back(c);
    }
  }
  std::array<std::size_t, D> idx{};
  while (true) {
    std::vector<int> combo(D);
    for (int i = 0; i < D; ++i) combo[i] = values[i][idx[i]];
    // Pairwise realizability of every constrained pair.
    bool realizable = true;
    for (int i = 0; i < D && realizable; ++i) {
      for (int j = i + 1; j < D && realizable; ++j) {
        if (combo[i] < 0 || combo[j] < 0) continue;
        // side[i] is the "above" role on its axis (low side of the candidate is
        // high side of the neighbour) unless it is the west constraint.
        int const si = sides[i], sj = sides[j];
        // West is the only constraint on a low side; normalise so `ax` is the
        // axis whose placed neighbour sits at the low coordinate.
        auto role = [](int s) { return s == kWest; };
        int ax, ay, w, n;
        if (role(si)) {
          ax = si / 2, w = combo[i], ay = sj / 2, n = combo[j];
        } else if (role(sj)) {
          ax = sj / 2, w = combo[j], ay = si / 2, n = combo[i];
        } else {
          // north/top: both placed neighbours at high coordinates.  Mirror the
          // first axis so the same helper applies.
          realizable = false;
          int const sz = set.size();
          for (int a = 0; a < sz && !realizable; ++a) {
            if (set.code(a, si / 2, false) != combo[i]) continue;
            for (int b = 0; b < sz && !realizable; ++b) {
              if (set.code(b, sj / 2, false) != combo[j]) continue;
              for (int dgl = 0; dgl < sz; ++dgl) {
                if (set.code(dgl, sj / 2, false) == set.code(a, sj / 2, true) &&
                    set.code(dgl, si / 2, false) == set.code(b, si / 2, true)) {
                  realizable = true;
                  break;
                }
              }
            }
          }
          continue;
        }
        realizable = detail::pair_realizable(set, ax, ay, w, n);
      }
    }
    if (realizable) {
      int count = 0;
      for (auto const& t : set.tiles()) {
        bool ok = true;
        for (int i = 0; i < D; ++i) {
          if (combo[i] >= 0 && t[sides[i]] != combo[i]) ok = false;
        }
        if (ok) ++count;
      }
      StochasticReport::Combination c{combo, count};
      rep.combinations.push_back(c);
      if (count == 0) {
        rep.is_stochastic = false;
        rep.deficient.push_back(c);
      } else if (count == 1) {
        rep.warnings.push_back(c);
      }
    }
    int k = 0;
    while (k < D && ++idx[k] == values[k].size()) idx[k++] = 0;
    if (k == D) break;
  }
  return rep;
}

/// Relative neighbour position o in {-1,0,1}^D <-> cell index.
template <int D>
constexpr int neighbor_cell(IVec<D> const& o) {
  int idx = 0, stride = 1;
  for (int a = 0; a < D; ++a) {
    idx += (o[a] + 1) * stride;
    stride *= 3;
  }
  return idx;
}

template <int D>
constexpr IVec<D> neighbor_offset(int cell) {
  IVec<D> o{};
  for (int a = 0; a < D; ++a) {
    o[a] = cell % 3 - 1;
    cell /= 3;
  }
  return o;
}

template <int D>
constexpr int kNeighborCells = D == 2 ? 9 : 27;

/// Tiles that may occupy each relative position around one tile.
template <int D>
struct NeighborGrid {
  std::array<std::vector<int>, kNeighborCells<D>> cells;
  std::vector<int> const& at(IVec<D> const& o) const { return cells[neighbor_cell<D>(o)]; }
};

/// Entity (mask, bits) of a tile touched by offset o, and the matching entity
/// of a tile sitting at o.
template <int D>
struct OffsetEntity {
  unsigned mask = 0;
  unsigned own_bits = 0;
  unsigned other_bits = 0;
};

template <int D>
OffsetEntity<D> offset_entity(IVec<D> const& o) {
  OffsetEntity<D> e;
  for (int a = 0; a < D; ++a) {
    if (o[a] == 0) continue;
    e.mask |= 1u << a;
    if (o[a] > 0) {
      e.own_bits |= 1u << a;
    } else {
      e.other_bits |= 1u << a;
    }
  }
  return e;
}

template <int D>
std::vector<NeighborGrid<D>> build_neighbor_grids(TileSet<D> const& set,
                                                  ConnectivityAnalysis<D> const& analysis) {
  if (analysis.tile_count() != set.size()) {
    throw std::invalid_argument("analysis does not belong to this tile set");
  }
  std::vector<NeighborGrid<D>> grids(set.size());
  for (int t = 0; t < set.size(); ++t) {
    for (int cell = 0; cell < kNeighborCells<D>; ++cell) {
      auto const o = neighbor_offset<D>(cell);
      auto const e = offset_entity<D>(o);
      auto& list = grids[t].cells[cell];
      if (e.mask == 0) {
        list.push_back(t);
        continue;
      }
      int const cls = analysis.class_of(e.mask, t, e.own_bits);
      for (int u = 0; u < set.size(); ++u) {
        if (analysis.class_of(e.mask, u, e.other_bits) == cls) list.push_back(u);
      }
    }
  }
  return grids;
}

/// Assembled tile-index grid.  Cell (i0, i1[, i2]) holds a tile whose origin
/// sits at (i0, -i1[, -i2]) in tile units: columns run east, rows run south
/// and layers run down, so scanline order starts at the north-west(-top)
/// corner with x fastest.
template <int D>
struct Tiling {
  IVec<D> dims{};
  std::vector<int> cells;
  std::uint64_t seed = 0;

  std::size_t index(IVec<D> const& c) const {
    std::size_t idx = 0, stride = 1;
    for (int a = 0; a < D; ++a) {
      idx += static_cast<std::size_t>(c[a]) * stride;
      stride *= static_cast<std::size_t>(dims[a]);
    }
    return idx;
  }
  int at(IVec<D> const& c) const { return cells[index(c)]; }
  std::size_t count() const { return cells.size(); }
  friend bool operator==(Tiling const&, Tiling const&) = default;
};

/// Checks every abutting pair; returns the first mismatch description if any.
template <int D>
std::optional<std::string> check_tiling(TileSet<D> const& set, Tiling<D> const& tiling) {
  IVec<D> c{};
  for (std::size_t k = 0; k < tiling.count(); ++k) {
    std::size_t rem = k;
    for (int a = 0; a < D; ++a) {
      c[a] = static_cast<int>(rem % tiling.dims[a]);
      rem /= tiling.dims[a];
    }
    int const t = tiling.at(c);
    for (int a = 0; a < D; ++a) {
      if (c[a] + 1 >= tiling.dims[a]) continue;
      IVec<D> nb = c;
      ++nb[a];
      int const u = tiling.at(nb);
      // x increases east; rows/layers increase towards lower y/z.
      bool const ok = a == 0 ? set.code(t, 0, true) == set.code(u, 0, false)
                             : set.code(t, a, false) == set.code(u, a, true);
      if (!ok) {
        std::ostringstream ss;
        ss << "code mismatch between cell " << k << " and its neighbour along axis " << a;
        return ss.str();
      }
    }
  }
  return std::nullopt;
}

/// Stochastic scanline assembly.  Each cell draws from its own stream
/// derived from (seed, cell index).
template <int D>
Tiling<D> assemble(TileSet<D> const& set, std::type_identity_t<IVec<D>> const& dims,
                   std::uint64_t seed) {
  Tiling<D> tiling;
  tiling.dims = dims;
  tiling.seed = seed;
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) {
    if (dims[a] < 1) throw std::invalid_argument("tiling dimensions must be positive");
    total *= static_cast<std::size_t>(dims[a]);
  }
  tiling.cells.assign(total, -1);
  std::vector<int> candidates;
  IVec<D> c{};
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    for (int a = 0; a < D; ++a) {
      c[a] = static_cast<int>(rem % dims[a]);
      rem /= dims[a];
    }
    candidates.clear();
    for (int t = 0; t < set.size(); ++t) {
      bool ok = true;
      for (int a = 0; a < D && ok; ++a) {
        if (c[a] == 0) continue;
        IVec<D> nb = c;
        --nb[a];
        int const u = tiling.at(nb);
        ok = a == 0 ? set.code(u, 0, true) == set.code(t, 0, false)
                    : set.code(u, a, false) == set.code(t, a, true);
      }
      if (ok) candidates.push_back(t);
    }
    if (candidates.empty()) {
      throw NoCandidateError("no compatible tile for cell " + std::to_string(k));
    }
    Rng rng(derive_seed(seed, k));
    tiling.cells[k] = candidates[rng.below(candidates.size())];
  }
  return tiling;
}

// --- construction helpers --------------------------------------------------

/// Builds an edge-coded set from 2D vertex codes given per tile as
/// (NW, NE, SE, SW).  An edge code is the ordered pair of its vertex codes:
/// horizontal edges (left, right), vertical edges (top, bottom).
inline TileSet<2> from_vertex_codes(std::vector<std::array<int, 4>> const& vertex_tiles,
                                    int vertex_codes) {
  std::vector<TileCodes<2>> tiles;
  auto pair = [&](int a, int b) { return a * vertex_codes + b; };
  for (auto const& v : vertex_tiles) {
    int const nw = v[0], ne = v[1], se = v[2], sw = v[3];
    TileCodes<2> t{};
    t[kNorth] = pair(nw, ne);
    t[kSouth] = pair(sw, se);
    t[kWest] = pair(nw, sw);
    t[kEast] = pair(ne, se);
    tiles.push_back(t);
  }
  int const c = vertex_codes * vertex_codes;
  return TileSet<2>(std::move(tiles), {c, c});
}

namespace detail {
// Canonical order: lexicographic by (N, E, S, W[, T, B]).
template <int D>
void sort_canonical(std::vector<TileCodes<D>>& tiles) {
  auto key = [](TileCodes<D> const& t) {
    std::array<int, 2 * D> k{};
    k[0] = t[kNorth];
    k[1] = t[kEast];
    k[2] = t[kSouth];
    k[3] = t[kWest];
    if constexpr (D == 3) {
      k[4] = t[kTop];
      k[5] = t[kBottom];
    }
    return k;
  };
  std::sort(tiles.begin(), tiles.end(),
            [&](auto const& a, auto const& b) { return key(a) < key(b); });
}
}  // namespace detail

/// Complete edge-based set over two codes per orientation.
inline TileSet<2> make_c16() {
  std::vector<TileCodes<2>> tiles;
  for (int k = 0; k < 16; ++k) {
    TileCodes<2> t{};
    t[kNorth] = (k >> 3) & 1;
    t[kEast] = (k >> 2) & 1;
    t[kSouth] = (k >> 1) & 1;
    t[kWest] = k & 1;
    tiles.push_back(t);
  }
  detail::sort_canonical<2>(tiles);
  return TileSet<2>(std::move(tiles), {2, 2});
}

/// Complete vertex-based set over two vertex codes.
inline TileSet<2> make_v16() {
  std::vector<std::array<int, 4>> v;
  for (int k = 0; k < 16; ++k) v.push_back({(k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1});
  auto set = from_vertex_codes(v, 2);
  auto tiles = set.tiles();
  detail::sort_canonical<2>(tiles);
  return TileSet<2>(std::move(tiles), {4, 4});
}

/// Single periodic tile.
template <int D>
TileSet<D> make_periodic() {
  std::array<int, D> counts;
  counts.fill(1);
  return TileSet<D>({TileCodes<D>{}}, counts);
}

/// 16 Wang cubes over two codes per face orientation: for every (N, W, T)
/// constraint triple two cubes with complementary (S, E, B) codes, so every
/// code is equally frequent on every face.
inline TileSet<3> make_cubes16() {
  std::vector<TileCodes<3>> tiles;
  for (int k = 0; k < 8; ++k) {
    int const n = (k >> 2) & 1, w = (k >> 1) & 1, t = k & 1;
    for (int flip = 0; flip < 2; ++flip) {
      TileCodes<3> c{};
      c[kNorth] = n;
      c[kWest] = w;
      c[kTop] = t;
      c[kSouth] = (n ^ w) ^ flip;
      c[kEast] = (w ^ t) ^ flip;
      c[kBottom] = (t ^ n ^ 1) ^ flip;
      tiles.push_back(c);
    }
  }
  detail::sort_canonical<3>(tiles);
  return TileSet<3>(std::move(tiles), {2, 2, 2});
}

using AnyTileSet = std::variant<TileSet<2>, TileSet<3>>;

/// Built-in sets: c16, v16, puc, puc3, cubes16.
inline std::optional<AnyTileSet> builtin_tileset(std::string const& name) {
  if (name == "c16") return AnyTileSet{make_c16()};
  if (name == "v16") return AnyTileSet{make_v16()};
  if (name == "puc") return AnyTileSet{make_periodic<2>()};
  if (name == "puc3") return AnyTileSet{make_periodic<3>()};
  if (name == "cubes16") return AnyTileSet{make_cubes16()};
  return std::nullopt;
}

// --- text format -----------------------------------------------------------
//
//   # comment
//   dimension = 2
//   codes_x = 2
//   codes_y = 2
//   codes_z = 2          (3D only)
//   0: N E S W           (3D: N E S W T B)
//
// Tile indices must be 0..n-1, each exactly once, in any order.

namespace detail {
inline std::string trim(std::string const& s) {
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto const e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline int parse_int(std::string const& s, int line) {
  try {
    std::size_t pos = 0;
    int const v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (std::exception const&) {
    throw ParseError(line, "expected integer, got '" + s + "'");
  }
}
}  // namespace detail

inline AnyTileSet parse_tileset(std::istream& in) {
  int dimension = 0;
  std::array<int, 3> counts{0, 0, 0};
  std::map<int, std::pair<std::vector<int>, int>> rows;  // index -> (codes, line)
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto const hash = raw.find('#');
    std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (auto eq = s.find('='); eq != std::string::npos) {
      std::string const key = detail::trim(s.substr(0, eq));
      int const v = detail::parse_int(detail::trim(s.substr(eq + 1)), line);
      if (key == "dimension") {
        if (v != 2 && v != 3) throw ParseError(line, "dimension must be 2 or 3");
        dimension = v;
      } else if (key == "codes_x") {
        counts[0] = v;
      } else if (key == "codes_y") {
        counts[1] = v;
      } else if (key == "codes_z") {
        counts[2] = v;
      } else {
        throw ParseError(line, "unknown key '" + key + "'");
      }
      continue;
    }
    auto const colon = s.find(':');
    if (colon == std::string::npos) throw ParseError(line, "expected 'index: codes'");
    int const index = detail::parse_int(detail::trim(s.substr(0, colon)), line);
    std::istringstream rest(s.substr(colon + 1));
    std::vector<int> codes;
    std::string tok;
    while (rest >> tok) codes.push_back(detail::parse_int(tok, line));
    if (index < 0) throw ParseError(line, "negative tile index");
    if (!rows.emplace(index, std::make_pair(codes, line)).second) {
      throw ParseError(line, "tile index " + std::to_string(index) + " repeated");
    }
  }
  if (dimension == 0) throw ParseError(line, "missing 'dimension'");
  if (rows.empty()) throw ParseError(line, "no tiles");
  int expect = 0;
  for (auto const& [index, row] : rows) {
    if (index != expect++) throw ParseError(row.second, "tile indices must be contiguous from 0");
    if (static_cast<int>(row.first.size()) != 2 * dimension) {
      throw ParseError(row.second, "expected " + std::to_string(2 * dimension) + " codes");
    }
  }
  auto build = [&]<int D>() -> TileSet<D> {
    std::vector<TileCodes<D>> tiles;
    for (auto const& [index, row] : rows) {
      auto const& c = row.first;
      TileCodes<D> t{};
      t[kNorth] = c[0];
      t[kEast] = c[1];
      t[kSouth] = c[2];
      t[kWest] = c[3];
      if constexpr (D == 3) {
        t[kTop] = c[4];
        t[kBottom] = c[5];
      }
      tiles.push_back(t);
    }
    std::array<int, D> cc{};
    for (int a = 0; a < D; ++a) {
      if (counts[a] < 1) throw ParseError(line, "missing or invalid codes count for axis " + std::to_string(a));
      cc[a] = counts[a];
    }
    try {
      return TileSet<D>(std::move(tiles), cc);
    } catch (TileSetError const& e) {
      throw ParseError(line, e.what());
    }
  };
  if (dimension == 2) return build.template operator()<2>();
  return build.template operator()<3>();
}

template <int D>
void write_tileset(std::ostream& out, TileSet<D> const& set) {
  out << "dimension = " << D << "\n";
  out << "codes_x = " << set.code_counts()[0] << "\n";
  out << "codes_y = " << set.code_counts()[1] << "\n";
  if constexpr (D == 3) out << "codes_z = " << set.code_counts()[2] << "\n";
  out << (D == 2 ? "# index: N E S W\n" : "# index: N E S W T B\n");
  for (int t = 0; t < set.size(); ++t) {
    auto const& c = set[t];
    out << t << ": " << c[kNorth] << " " << c[kEast] << " " << c[kSouth] << " " << c[kWest];
    if constexpr (D == 3) out << " " << c[kTop] << " " << c[kBottom];
    out << "\n";
  }
}

}  // namespace wangls

#endif  // WANGLS_TILESET_HPP

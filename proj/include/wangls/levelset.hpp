// SPDX-License-Identifier: Apache-2.0
#ifndef WANGLS_LEVELSET_HPP
#define WANGLS_LEVELSET_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"
#include "tileset.hpp"
#include "vec.hpp"

namespace wangls {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Regular grid of N points per axis over the tile [-0.5, 0.5]^D.
///
/// Node coordinates are computed from integer indices only, also for indices
/// outside [0, N-1]; a node of one tile and the coinciding node of a
/// neighbour therefore evaluate to the same double once both are expressed
/// in a common frame.
template <int D>
class GridSpec {
 public:
  explicit GridSpec(int n) : n_(n) {
    if (n < 3 || n % 2 == 0) throw GridError("grid points per axis must be odd and >= 3");
    size_ = 1;
    for (int a = 0; a < D; ++a) size_ *= static_cast<std::size_t>(n);
  }

  int n() const { return n_; }
  double h() const { return 1.0 / (n_ - 1); }
  std::size_t size() const { return size_; }
  std::size_t row_count() const { return size_ / static_cast<std::size_t>(n_); }

  double coord(long g) const {
    return static_cast<double>(2 * g - (n_ - 1)) / static_cast<double>(2 * (n_ - 1));
  }

  std::size_t index(IVec<D> const& i) const {
    std::size_t idx = 0;
    for (int a = D - 1; a >= 0; --a) idx = idx * n_ + static_cast<std::size_t>(i[a]);
    return idx;
  }

  IVec<D> multi(std::size_t idx) const {
    IVec<D> i{};
    for (int a = 0; a < D; ++a) {
      i[a] = static_cast<int>(idx % n_);
      idx /= n_;
    }
    return i;
  }

  Vec<D> node(IVec<D> const& i) const {
    Vec<D> x;
    for (int a = 0; a < D; ++a) x[a] = coord(i[a]);
    return x;
  }

  friend bool operator==(GridSpec const&, GridSpec const&) = default;

 private:
  int n_;
  std::size_t size_;
};

/// Per-tile LS1, LS2 (and optionally LS3) plus the artificial field ~LS.
template <int D>
struct TileFields {
  GridSpec<D> grid;
  int tiles = 0;
  bool track_ls3 = true;
  double sentinel = 0.0;
  /// ls[k][tile][node]; ls[2] is empty when LS3 is not tracked.
  std::array<std::vector<std::vector<double>>, 3> ls;
  std::vector<std::vector<double>> artificial;

  static constexpr int kBlock = 8;
  /// Max of the deepest tracked field per block of kBlock^D nodes, used to
  /// cull blocks during updates.  Kept current by update_with_particle.
  std::vector<std::vector<double>> block_max;

  int depth() const { return track_ls3 ? 3 : 2; }
  bool tracked(int k) const { return k >= 0 && k < depth(); }
  int blocks_per_axis() const { return (grid.n() + kBlock - 1) / kBlock; }

  void refresh_block_max() {
    int const nb = blocks_per_axis();
    auto const& deep = ls[depth() - 1];
    for (int t = 0; t < tiles; ++t) {
      std::fill(block_max[t].begin(), block_max[t].end(), -std::numeric_limits<double>::infinity());
      for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        auto const i = grid.multi(idx);
        std::size_t b = 0;
        for (int a = D - 1; a >= 0; --a) b = b * nb + static_cast<std::size_t>(i[a] / kBlock);
        block_max[t][b] = std::max(block_max[t][b], deep[t][idx]);
      }
    }
  }
};

template <int D>
TileFields<D> init_fields(int tiles, GridSpec<D> const& grid, bool track_ls3) {
  TileFields<D> f{grid};
  f.tiles = tiles;
  f.track_ls3 = track_ls3;
  f.sentinel = 10.0 * std::sqrt(static_cast<double>(D));
  for (int k = 0; k < f.depth(); ++k) {
    f.ls[k].assign(tiles, std::vector<double>(grid.size(), f.sentinel));
  }
  f.artificial.assign(tiles, std::vector<double>(grid.size(), f.sentinel));
  std::size_t blocks = 1;
  for (int a = 0; a < D; ++a) blocks *= static_cast<std::size_t>(f.blocks_per_axis());
  f.block_max.assign(tiles, std::vector<double>(blocks, f.sentinel));
  return f;
}

template <int D>
TileFields<D> init_fields(TileSet<D> const& set, GridSpec<D> const& grid, bool track_ls3) {
  return init_fields<D>(set.size(), grid, track_ls3);
}

// --- copy inducers -----------------------------------------------------------

enum class InducerKind { tile, edge, vertex, face, cube_edge };

inline char const* to_string(InducerKind k) {
  switch (k) {
    case InducerKind::tile: return "tile";
    case InducerKind::edge: return "edge";
    case InducerKind::vertex: return "vertex";
    case InducerKind::face: return "face";
    case InducerKind::cube_edge: return "cube_edge";
  }
  return "?";
}

/// Boundary entity hit by a particle: axis mask plus the side bit per axis.
struct EntityHit {
  unsigned mask;
  unsigned bits;
  friend bool operator==(EntityHit const&, EntityHit const&) = default;
  friend auto operator<=>(EntityHit const&, EntityHit const&) = default;
};

/// Slack on the side test so that exact contact survives rounding.
inline constexpr double kInducerTolerance = 1e-9;

template <int D>
struct CopyInducer {
  InducerKind kind = InducerKind::tile;
  /// Every entity whose inset region meets the circumscribed disk/sphere.
  std::vector<EntityHit> hits;
};

/// Classifies the boundary entities met by the circumscribed disk/sphere of
/// radius rbar about `center`, against the boundary inset inward by
/// `inset`.  A side is met when the sphere reaches its inset plane
/// (touching counts, with a small tolerance).  A higher-order entity is met
/// when every side bounding it is met, so a particle crossing two edges near
/// a corner is a vertex particle even if it misses the corner point.
template <int D>
CopyInducer<D> find_copy_inducer(Vec<D> const& center, double rbar, double inset) {
  double const reach = rbar + kInducerTolerance;
  std::array<std::array<bool, 2>, D> side{};
  for (int a = 0; a < D; ++a) {
    side[a][0] = center[a] - (-0.5 + inset) <= reach;
    side[a][1] = (0.5 - inset) - center[a] <= reach;
  }
  CopyInducer<D> out;
  int order = 0;
  for (unsigned mask = 1; mask < static_cast<unsigned>(kNumMasks<D>); ++mask) {
    for (unsigned bits : mask_subsets(mask)) {
      bool met = true;
      for (int a = 0; a < D; ++a) {
        if (mask & (1u << a)) met &= side[a][(bits >> a) & 1u];
      }
      if (met) {
        out.hits.push_back({mask, bits});
        order = std::max(order, popcount(mask));
      }
    }
  }
  if constexpr (D == 2) {
    constexpr InducerKind kinds[] = {InducerKind::tile, InducerKind::edge, InducerKind::vertex};
    out.kind = kinds[order];
  } else {
    constexpr InducerKind kinds[] = {InducerKind::tile, InducerKind::face, InducerKind::cube_edge,
                                     InducerKind::vertex};
    out.kind = kinds[order];
  }
  return out;
}

/// Particle image: a copy of the particle in `tile`, displaced by
/// `translation` tile widths from the original centre.
template <int D>
struct Image {
  int tile;
  IVec<D> translation;
  friend bool operator==(Image const&, Image const&) = default;
  friend auto operator<=>(Image const&, Image const&) = default;
};

/// Images generated by the inducer: faces copy to every tile carrying the
/// matching code on the opposite face, higher-order entities copy to every
/// instance of their connectivity class.  Sorted, without duplicates and
/// without the original itself.
template <int D>
std::vector<Image<D>> propagate_copies(CopyInducer<D> const& inducer, int source_tile,
                                       ConnectivityAnalysis<D> const& analysis,
                                       TileSet<D> const& set) {
  std::set<Image<D>> out;
  for (auto const& hit : inducer.hits) {
    if (popcount(hit.mask) == 1) {
      int const axis = std::countr_zero(hit.mask);
      bool const high = hit.bits != 0;
      int const code = set.code(source_tile, axis, high);
      IVec<D> t{};
      t[axis] = high ? -1 : 1;
      for (int u = 0; u < set.size(); ++u) {
        if (set.code(u, axis, !high) == code) out.insert({u, t});
      }
    } else {
      int const cls = analysis.class_of(hit.mask, source_tile, hit.bits);
      for (auto const& m : analysis.members(hit.mask, cls)) {
        IVec<D> const t = entity_translation<D>(hit.mask, hit.bits, m.bits);
        if (m.tile == source_tile && t == IVec<D>{}) continue;
        out.insert({m.tile, t});
      }
    }
  }
  out.erase({source_tile, IVec<D>{}});
  return {out.begin(), out.end()};
}

// --- field updates -----------------------------------------------------------

/// Translations already applied to each tile during one insertion.
template <int D>
struct BookKeeping {
  std::vector<std::set<IVec<D>>> applied;
  explicit BookKeeping(int tiles) : applied(tiles) {}
  bool insert(int tile, IVec<D> const& t) { return applied[tile].insert(t).second; }
};

struct UpdateOptions {
  bool use_patch = true;
  bool prescreen = true;
  /// Patch half-width; non-positive selects rbar + 6h.
  double patch_half_width = 0.0;
  int threads = 1;
};

struct UpdateReport {
  /// Particle-image applications to a tile (one per distinct image per tile).
  std::size_t applications = 0;
  /// Exact signed-distance evaluations (patch hits count once).
  std::size_t evaluations = 0;
  /// Per tile, nodes where LS1 or LS2 changed (may repeat).
  std::vector<std::vector<std::uint32_t>> changed;
};

namespace detail {

/// Distance of one particle at nodes of the source-tile frame, indexed by
/// integer node coordinates (possibly outside the tile).  Values inside the
/// patch are cached.
template <int D>
class DistanceSampler {
 public:
  DistanceSampler(Particle<D> const& p, GridSpec<D> const& grid, bool use_patch, double half_width)
      : p_(p), grid_(grid) {
    if (!use_patch) return;
    width_ = 2 * static_cast<int>(std::ceil(half_width / grid.h())) + 1;
    std::size_t cells = 1;
    for (int a = 0; a < D; ++a) {
      lo_[a] = static_cast<long>(std::lround((p.center[a] + 0.5) * (grid.n() - 1))) - width_ / 2;
      cells *= static_cast<std::size_t>(width_);
    }
    cache_.assign(cells, std::numeric_limits<double>::quiet_NaN());
  }

  Vec<D> rel(std::array<long, D> const& g) const {
    Vec<D> r;
    for (int a = 0; a < D; ++a) r[a] = grid_.coord(g[a]) - p_.center[a];
    return r;
  }

  double operator()(std::array<long, D> const& g, Vec<D> const& r, std::size_t& evals) {
    if (!cache_.empty()) {
      std::size_t idx = 0;
      bool inside = true;
      for (int a = D - 1; a >= 0; --a) {
        long const k = g[a] - lo_[a];
        if (k < 0 || k >= width_) {
          inside = false;
          break;
        }
        idx = idx * width_ + static_cast<std::size_t>(k);
      }
      if (inside) {
        double& c = cache_[idx];
        if (std::isnan(c)) {
          c = shape_signed_distance<D>(p_.shape, r);
          ++evals;
        }
        return c;
      }
    }
    ++evals;
    return shape_signed_distance<D>(p_.shape, r);
  }

 private:
  Particle<D> const& p_;
  GridSpec<D> const& grid_;
  std::array<long, D> lo_{};
  int width_ = 0;
  std::vector<double> cache_;
};

template <typename F>
void for_each_tile(int tiles, int threads, F&& f) {
  if (threads <= 1 || tiles <= 1) {
    for (int t = 0; t < tiles; ++t) f(t);
    return;
  }
  std::vector<std::jthread> pool;
  int const nt = std::min(threads, tiles);
  for (int w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      for (int t = w; t < tiles; t += nt) f(t);
    });
  }
}

// Safety margin for lower-bound culling: a skipped node must provably leave
// the cascade unchanged despite rounding in the exact distance evaluation.
inline constexpr double kCullMargin = 1e-9;

}  // namespace detail

/// Inserts one particle (original in `source_tile` plus its images) into the
/// fields of every tile.  Each tile receives every occurrence found in the
/// tiles of its neighbour grid, shifted by the neighbour offset; occurrences
/// that land on an already applied translation are skipped.
template <int D>
UpdateReport update_with_particle(TileFields<D>& fields, std::vector<NeighborGrid<D>> const& grids,
                                  Particle<D> const& particle, int source_tile,
                                  std::vector<Image<D>> const& images, UpdateOptions const& opt = {}) {
  auto const& grid = fields.grid;
  int const n = grid.n();
  int const depth = fields.depth();
  double const rbar = particle.circumscribed_radius;

  std::vector<std::vector<IVec<D>>> occ(fields.tiles);
  occ[source_tile].push_back(IVec<D>{});
  for (auto const& im : images) occ[im.tile].push_back(im.translation);

  double const w = opt.patch_half_width > 0.0 ? opt.patch_half_width : rbar + 6.0 * grid.h();
  detail::DistanceSampler<D> shared(particle, grid, opt.use_patch, w);

  UpdateReport report;
  report.changed.resize(fields.tiles);
  BookKeeping<D> book(fields.tiles);
  std::vector<std::size_t> apps(fields.tiles, 0), evals(fields.tiles, 0);

  auto apply = [&](int tile, IVec<D> const& t, detail::DistanceSampler<D>& dist) {
    auto& l1 = fields.ls[0][tile];
    auto& l2 = fields.ls[1][tile];
    double* l3 = depth == 3 ? fields.ls[2][tile].data() : nullptr;
    auto& deep = fields.ls[depth - 1][tile];
    auto& bmax = fields.block_max[tile];
    auto& changed = report.changed[tile];
    int const nb = fields.blocks_per_axis();
    int constexpr B = TileFields<D>::kBlock;
    std::size_t blocks = 1;
    for (int a = 0; a < D; ++a) blocks *= static_cast<std::size_t>(nb);

    for (std::size_t b = 0; b < blocks; ++b) {
      IVec<D> bi{}, lo{}, hi{};
      std::size_t rem = b;
      for (int a = 0; a < D; ++a) {
        bi[a] = static_cast<int>(rem % nb);
        rem /= nb;
        lo[a] = bi[a] * B;
        hi[a] = std::min(lo[a] + B, n) - 1;
      }
      if (opt.prescreen) {
        double s = 0.0;
        for (int a = 0; a < D; ++a) {
          long const off = static_cast<long>(t[a]) * (n - 1);
          double const x0 = grid.coord(lo[a] - off), x1 = grid.coord(hi[a] - off);
          double const c = particle.center[a];
          double const g = c < x0 ? x0 - c : (c > x1 ? c - x1 : 0.0);
          s += g * g;
        }
        if (std::sqrt(s) - rbar - detail::kCullMargin >= bmax[b]) continue;
      }
      bool touched = false;
      IVec<D> i = lo;
      while (true) {
        std::array<long, D> g{};
        for (int a = 0; a < D; ++a) g[a] = i[a] - static_cast<long>(t[a]) * (n - 1);
        std::size_t const idx = grid.index(i);
        Vec<D> const r = dist.rel(g);
        bool skip = false;
        if (opt.prescreen) skip = norm(r) - rbar - detail::kCullMargin >= deep[idx];
        if (!skip) {
          double const d = dist(g, r, evals[tile]);
          if (d < l1[idx]) {
            if (l3) l3[idx] = l2[idx];
            l2[idx] = l1[idx];
            l1[idx] = d;
            changed.push_back(static_cast<std::uint32_t>(idx));
            touched = true;
          } else if (d < l2[idx]) {
            if (l3) l3[idx] = l2[idx];
            l2[idx] = d;
            changed.push_back(static_cast<std::uint32_t>(idx));
            touched = true;
          } else if (l3 && d < l3[idx]) {
            l3[idx] = d;
            touched = true;
          }
        }
        int a = 0;
        for (; a < D; ++a) {
          if (++i[a] <= hi[a]) break;
          i[a] = lo[a];
        }
        if (a == D) break;
      }
      if (touched) {
        double m = -std::numeric_limits<double>::infinity();
        i = lo;
        while (true) {
          m = std::max(m, deep[grid.index(i)]);
          int a = 0;
          for (; a < D; ++a) {
            if (++i[a] <= hi[a]) break;
            i[a] = lo[a];
          }
          if (a == D) break;
        }
        bmax[b] = m;
      }
    }
    ++apps[tile];
  };

  auto per_tile = [&](int tile) {
    // With several workers, each owns a private patch so that no cache is
    // shared between threads; values are identical either way.
    detail::DistanceSampler<D> local(particle, grid, opt.use_patch, w);
    auto& dist = opt.threads > 1 ? local : shared;
    for (int cell = 0; cell < kNeighborCells<D>; ++cell) {
      IVec<D> const o = neighbor_offset<D>(cell);
      for (int u : grids[tile].cells[cell]) {
        for (auto const& tu : occ[u]) {
          IVec<D> t;
          for (int a = 0; a < D; ++a) t[a] = tu[a] + o[a];
          if (book.insert(tile, t)) apply(tile, t, dist);
        }
      }
    }
  };
  detail::for_each_tile(fields.tiles, opt.threads, per_tile);

  for (int t = 0; t < fields.tiles; ++t) {
    report.applications += apps[t];
    report.evaluations += evals[t];
  }
  return report;
}

// --- artificial field ---------------------------------------------------------

/// Boundary-communication field ~LS.  Nodes within `width` of a tile side lie
/// in that side's strip; corner and cube-edge regions are the intersections
/// of strips.  At a node, ~LS is the minimum of LS1 over the tile itself and
/// every tile whose entity of the same class and orientation covers the node,
/// matched at the same node index.
template <int D>
class ArtificialField {
 public:
  static constexpr int kZones = D == 2 ? 9 : 27;

  ArtificialField(TileSet<D> const& set, ConnectivityAnalysis<D> const& analysis,
                  GridSpec<D> const& grid, double width)
      : grid_(grid), tiles_(set.size()) {
    strip_ = static_cast<int>(std::floor(width / grid.h() + 1e-9));
    if (2 * strip_ >= grid.n() - 1) throw GridError("artificial-field strip width must be below half a tile");
    peers_.assign(static_cast<std::size_t>(tiles_) * kZones, {});
    for (int t = 0; t < tiles_; ++t) {
      for (int z = 0; z < kZones; ++z) {
        unsigned strips = 0, bits = 0;
        int rem = z;
        for (int a = 0; a < D; ++a) {
          int const s = rem % 3;
          rem /= 3;
          if (s != 1) strips |= 1u << a;
          if (s == 2) bits |= 1u << a;
        }
        std::set<int> peers{t};
        for (unsigned mask = 1; mask < static_cast<unsigned>(kNumMasks<D>); ++mask) {
          if ((mask & strips) != mask) continue;
          int const cls = analysis.class_of(mask, t, bits & mask);
          for (int u = 0; u < tiles_; ++u) {
            if (analysis.class_of(mask, u, bits & mask) == cls) peers.insert(u);
          }
        }
        peers_[static_cast<std::size_t>(t) * kZones + z].assign(peers.begin(), peers.end());
      }
    }
    zone_.resize(grid.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      auto const i = grid.multi(idx);
      int z = 0;
      for (int a = D - 1; a >= 0; --a) {
        int const s = i[a] <= strip_ ? 0 : (i[a] >= grid.n() - 1 - strip_ ? 2 : 1);
        z = z * 3 + s;
      }
      zone_[idx] = static_cast<std::uint8_t>(z);
    }
    mark_.assign(tiles_, std::vector<std::uint8_t>(grid.size(), 0));
  }

  int strip_nodes() const { return strip_; }
  std::vector<int> const& peers(int tile, int zone) const {
    return peers_[static_cast<std::size_t>(tile) * kZones + zone];
  }
  int zone(std::size_t idx) const { return zone_[idx]; }

  double value(TileFields<D> const& f, int tile, std::size_t idx) const {
    double m = f.ls[0][tile][idx];
    for (int u : peers(tile, zone_[idx])) m = std::min(m, f.ls[0][u][idx]);
    return m;
  }

  void build(TileFields<D>& f) const {
    for (int t = 0; t < tiles_; ++t) {
      for (std::size_t idx = 0; idx < grid_.size(); ++idx) f.artificial[t][idx] = value(f, t, idx);
    }
  }

  /// Recomputes ~LS wherever it may depend on a changed LS1 node.  Returns
  /// the recomputed nodes per tile (unique).
  std::vector<std::vector<std::uint32_t>> refresh(
      TileFields<D>& f, std::vector<std::vector<std::uint32_t>> const& changed) const {
    std::vector<std::vector<std::uint32_t>> touched(tiles_);
    for (int t = 0; t < tiles_; ++t) {
      for (std::uint32_t idx : changed[t]) {
        for (int u : peers(t, zone_[idx])) {
          if (!mark_[u][idx]) {
            mark_[u][idx] = 1;
            touched[u].push_back(idx);
          }
        }
      }
    }
    for (int u = 0; u < tiles_; ++u) {
      std::sort(touched[u].begin(), touched[u].end());
      for (std::uint32_t idx : touched[u]) {
        f.artificial[u][idx] = value(f, u, idx);
        mark_[u][idx] = 0;
      }
    }
    return touched;
  }

 private:
  GridSpec<D> grid_;
  int tiles_;
  int strip_ = 0;
  std::vector<std::vector<int>> peers_;
  std::vector<std::uint8_t> zone_;
  mutable std::vector<std::vector<std::uint8_t>> mark_;
};

template <int D>
void build_artificial_field(TileFields<D>& fields, TileSet<D> const& set,
                            ConnectivityAnalysis<D> const& analysis, double width) {
  ArtificialField<D>(set, analysis, fields.grid, width).build(fields);
}

// --- admissible mask -----------------------------------------------------------

struct MaskParams {
  double rbar = 0.1;
  double kappa = 0.0;
  double rho = std::numeric_limits<double>::infinity();
  double sigma = std::numeric_limits<double>::infinity();
  bool exclude_vertices = false;
};

/// Admissible centre nodes of every tile with per-row counts for uniform
/// selection over the union of all tiles.
template <int D>
class AdmissibleMask {
 public:
  AdmissibleMask(TileFields<D> const& f, MaskParams const& p) : grid_(f.grid), params_(p) {
    int const tiles = f.tiles;
    mask_.assign(tiles, std::vector<std::uint8_t>(grid_.size(), 0));
    rows_.assign(tiles, std::vector<std::uint32_t>(grid_.row_count(), 0));
    tile_count_.assign(tiles, 0);
    art_finite_.assign(tiles, 0);
    ls2_finite_.assign(tiles, 0);
    excluded_.assign(grid_.size(), 0);
    if (p.exclude_vertices) {
      for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
        Vec<D> const x = grid_.node(grid_.multi(idx));
        for (unsigned c = 0; c < (1u << D); ++c) {
          double s = 0.0;
          for (int a = 0; a < D; ++a) {
            double const d = x[a] - (((c >> a) & 1u) ? 0.5 : -0.5);
            s += d * d;
          }
          if (s <= p.rbar * p.rbar) excluded_[idx] = 1;
        }
      }
    }
    for (int t = 0; t < tiles; ++t) {
      art_finite_[t] = any_below(f.artificial[t], f.sentinel);
      ls2_finite_[t] = any_below(f.ls[1][t], f.sentinel);
      rebuild_tile(f, t);
    }
  }

  MaskParams const& params() const { return params_; }
  bool at(int tile, std::size_t idx) const { return mask_[tile][idx] != 0; }
  std::vector<std::uint8_t> const& tile_mask(int tile) const { return mask_[tile]; }
  std::size_t count() const {
    std::size_t s = 0;
    for (auto c : tile_count_) s += c;
    return s;
  }
  std::size_t count(int tile) const { return tile_count_[tile]; }

  /// Re-evaluates the given nodes; a tile whose upper-bound constraints just
  /// became active is re-evaluated entirely.
  void refresh(TileFields<D> const& f, std::vector<std::vector<std::uint32_t>> const& touched) {
    for (int t = 0; t < f.tiles; ++t) {
      bool flipped = false;
      if (!art_finite_[t] || !ls2_finite_[t]) {
        for (std::uint32_t idx : touched[t]) {
          if (!art_finite_[t] && f.artificial[t][idx] < f.sentinel) art_finite_[t] = 1, flipped = true;
          if (!ls2_finite_[t] && f.ls[1][t][idx] < f.sentinel) ls2_finite_[t] = 1, flipped = true;
        }
      }
      if (flipped) {
        rebuild_tile(f, t);
        continue;
      }
      for (std::uint32_t idx : touched[t]) set(t, idx, evaluate(f, t, idx));
    }
  }

  /// k-th admissible node (tile-major, then node index), k < count().
  std::pair<int, std::size_t> select(std::size_t k) const {
    for (int t = 0; t < static_cast<int>(mask_.size()); ++t) {
      if (k >= tile_count_[t]) {
        k -= tile_count_[t];
        continue;
      }
      std::size_t const n = static_cast<std::size_t>(grid_.n());
      for (std::size_t r = 0; r < rows_[t].size(); ++r) {
        if (k >= rows_[t][r]) {
          k -= rows_[t][r];
          continue;
        }
        for (std::size_t idx = r * n;; ++idx) {
          if (mask_[t][idx] && k-- == 0) return {t, idx};
        }
      }
    }
    throw std::out_of_range("admissible node index out of range");
  }

 private:
  static bool any_below(std::vector<double> const& v, double s) {
    return std::any_of(v.begin(), v.end(), [s](double x) { return x < s; });
  }

  bool evaluate(TileFields<D> const& f, int t, std::size_t idx) const {
    double const a = f.artificial[t][idx];
    if (!(a >= params_.rbar + params_.kappa)) return false;
    if (art_finite_[t] && std::isfinite(params_.rho) && a > params_.rbar + params_.rho) return false;
    if (ls2_finite_[t] && std::isfinite(params_.sigma) && f.ls[1][t][idx] > params_.rbar + params_.sigma) {
      return false;
    }
    return !excluded_[idx];
  }

  void set(int t, std::size_t idx, bool v) {
    auto& m = mask_[t][idx];
    if (static_cast<bool>(m) == v) return;
    m = v;
    std::size_t const r = idx / static_cast<std::size_t>(grid_.n());
    if (v) {
      ++rows_[t][r];
      ++tile_count_[t];
    } else {
      --rows_[t][r];
      --tile_count_[t];
    }
  }

  void rebuild_tile(TileFields<D> const& f, int t) {
    for (std::size_t idx = 0; idx < grid_.size(); ++idx) set(t, idx, evaluate(f, t, idx));
  }

  GridSpec<D> grid_;
  MaskParams params_;
  std::vector<std::vector<std::uint8_t>> mask_;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<std::size_t> tile_count_;
  std::vector<std::uint8_t> art_finite_, ls2_finite_, excluded_;
};

template <int D>
AdmissibleMask<D> admissible_mask(TileFields<D> const& fields, MaskParams const& params) {
  return AdmissibleMask<D>(fields, params);
}

/// Continuous centre near an admissible node.  Among the 2^D quadrants
/// (octants) around the node, those whose corner nodes are all admissible
/// are candidates; the centre is drawn uniformly in one of them, chosen
/// uniformly.  Disabled (node returned) unless h <= rbar / 5.
template <int D>
Vec<D> jitter_center(AdmissibleMask<D> const& mask, GridSpec<D> const& grid, int tile,
                     std::size_t idx, Rng& rng, double rbar) {
  IVec<D> const i = grid.multi(idx);
  Vec<D> x = grid.node(i);
  double const h = grid.h();
  if (h > rbar / 5.0) return x;
  std::vector<unsigned> ok;
  for (unsigned q = 0; q < (1u << D); ++q) {
    bool good = true;
    for (unsigned c = 0; c < (1u << D) && good; ++c) {
      IVec<D> j = i;
      for (int a = 0; a < D; ++a) {
        if (!((c >> a) & 1u)) continue;
        j[a] += ((q >> a) & 1u) ? 1 : -1;
        if (j[a] < 0 || j[a] >= grid.n()) good = false;
      }
      if (good && !mask.at(tile, grid.index(j))) good = false;
    }
    if (good) ok.push_back(q);
  }
  if (ok.empty()) return x;
  unsigned const q = ok[rng.below(ok.size())];
  for (int a = 0; a < D; ++a) {
    double const s = rng.uniform(0.0, h);
    x[a] += ((q >> a) & 1u) ? s : -s;
  }
  return x;
}

}  // namespace wangls

#endif  // WANGLS_LEVELSET_HPP

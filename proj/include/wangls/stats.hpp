// SPDX-License-Identifier: Apache-2.0
#ifndef WANGLS_STATS_HPP
#define WANGLS_STATS_HPP

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "levelset.hpp"
#include "tileset.hpp"

namespace wangls {

class ContinuityViolation : public std::runtime_error {
 public:
  ContinuityViolation(std::vector<int> node, std::string const& what)
      : std::runtime_error(describe(node, what)), node_(std::move(node)) {}
  std::vector<int> const& node() const { return node_; }

 private:
  static std::string describe(std::vector<int> const& node, std::string const& what) {
    std::string s = "continuity violation at global node (";
    for (std::size_t a = 0; a < node.size(); ++a) s += (a ? "," : "") + std::to_string(node[a]);
    return s + "): " + what;
  }
  std::vector<int> node_;
};

/// Field over the assembled domain.  Node (0, 0[, 0]) is the top-left
/// (front) corner: x grows with the tiling column, y and z grow with the
/// tiling row/layer index, i.e. downward in tile coordinates.  Storage is
/// row-major with x fastest.
template <int D, class T>
struct GlobalField {
  IVec<D> dims{};
  int tile_nodes = 0;  // N
  std::vector<T> data;

  std::size_t index(IVec<D> const& g) const {
    std::size_t idx = 0, stride = 1;
    for (int a = 0; a < D; ++a) {
      idx += static_cast<std::size_t>(g[a]) * stride;
      stride *= static_cast<std::size_t>(dims[a]);
    }
    return idx;
  }
  T const& at(IVec<D> const& g) const { return data[index(g)]; }
  std::size_t size() const { return data.size(); }
};

template <int D>
using GlobalImage = GlobalField<D, std::uint8_t>;

/// Global node of tile node `i` in tiling cell `cell`.
template <int D>
IVec<D> global_node(IVec<D> const& cell, IVec<D> const& i, int n) {
  IVec<D> g;
  for (int a = 0; a < D; ++a) g[a] = cell[a] * (n - 1) + (a == 0 ? i[a] : n - 1 - i[a]);
  return g;
}

/// Block copy of per-tile fields with one shared node layer between
/// neighbours.  Shared nodes must hold identical values.
template <int D, class T>
GlobalField<D, T> render(Tiling<D> const& tiling, GridSpec<D> const& grid,
                         std::vector<std::vector<T>> const& tiles) {
  int const n = grid.n();
  GlobalField<D, T> out;
  out.tile_nodes = n;
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) {
    out.dims[a] = tiling.dims[a] * (n - 1) + 1;
    total *= static_cast<std::size_t>(out.dims[a]);
  }
  out.data.assign(total, T{});
  std::vector<std::uint8_t> written(total, 0);
  for (std::size_t c = 0; c < tiling.count(); ++c) {
    IVec<D> cell;
    std::size_t rem = c;
    for (int a = 0; a < D; ++a) {
      cell[a] = static_cast<int>(rem % tiling.dims[a]);
      rem /= tiling.dims[a];
    }
    int const tile = tiling.cells[c];
    if (tile < 0 || tile >= static_cast<int>(tiles.size()) || tiles[tile].size() != grid.size()) {
      throw std::invalid_argument("tiling refers to a tile without a field");
    }
    auto const& f = tiles[tile];
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      auto const i = grid.multi(idx);
      auto const g = global_node<D>(cell, i, n);
      std::size_t const k = out.index(g);
      if (written[k]) {
        if (!(out.data[k] == f[idx])) {
          throw ContinuityViolation(std::vector<int>(g.begin(), g.end()), "tile " + std::to_string(tile) + " disagrees with its neighbour");
        }
        continue;
      }
      out.data[k] = f[idx];
      written[k] = 1;
    }
  }
  return out;
}

/// Two-point probability over lag vectors, lags stored like the image
/// (periodic, index 0 is zero lag).
template <int D>
struct S2Field {
  IVec<D> dims{};
  std::vector<double> values;
  double phi = 0.0;

  std::size_t index(IVec<D> const& lag) const {
    std::size_t idx = 0, stride = 1;
    for (int a = 0; a < D; ++a) {
      int const l = ((lag[a] % dims[a]) + dims[a]) % dims[a];
      idx += static_cast<std::size_t>(l) * stride;
      stride *= static_cast<std::size_t>(dims[a]);
    }
    return idx;
  }
  double at(IVec<D> const& lag) const { return values[index(lag)]; }
};

/// Periodic autocorrelation of the indicator of `phase` via FFT.  The
/// correlation counts are integers, so the transform result is rounded to
/// the nearest count before normalising.
template <int D>
S2Field<D> s2_fft(GlobalImage<D> const& img, std::uint8_t phase = 1) {
  if (img.data.empty()) throw std::invalid_argument("empty image");
  std::size_t const total = img.size();
  int rank_dims[D];
  for (int a = 0; a < D; ++a) rank_dims[a] = img.dims[D - 1 - a];
  int const last = img.dims[0];
  std::size_t const half = total / static_cast<std::size_t>(last) * static_cast<std::size_t>(last / 2 + 1);

  double* in = fftw_alloc_real(total);
  fftw_complex* spec = fftw_alloc_complex(half);
  fftw_plan fwd = fftw_plan_dft_r2c(D, rank_dims, in, spec, FFTW_ESTIMATE);
  fftw_plan inv = fftw_plan_dft_c2r(D, rank_dims, spec, in, FFTW_ESTIMATE);

  std::size_t count = 0;
  for (std::size_t i = 0; i < total; ++i) {
    bool const on = img.data[i] == phase;
    in[i] = on ? 1.0 : 0.0;
    count += on;
  }
  fftw_execute(fwd);
  for (std::size_t i = 0; i < half; ++i) {
    spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
    spec[i][1] = 0.0;
  }
  fftw_execute(inv);

  S2Field<D> out;
  out.dims = img.dims;
  out.values.resize(total);
  double const n = static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) out.values[i] = std::max(0.0, std::nearbyint(in[i] / n)) / n;
  out.phi = static_cast<double>(count) / n;

  fftw_destroy_plan(fwd);
  fftw_destroy_plan(inv);
  fftw_free(in);
  fftw_free(spec);
  return out;
}

template <int D>
struct Peak {
  IVec<D> tile_lag{};  // integer multiple of the tile pitch
  IVec<D> node_lag{};  // node lag where the neighbourhood maximum sits
  double normalized = 0.0;
};

template <int D>
struct PeakReport {
  std::vector<Peak<D>> peaks;
  double max_secondary = 0.0;  // largest normalized peak
  double phi = 0.0;
  bool degenerate = false;     // phi is 0 or 1
};

/// Samples S2 at every nonzero integer tile lag inside the half domain,
/// taking the maximum over the surrounding +-1 node block, normalized by
/// phi^2.
template <int D>
PeakReport<D> secondary_peaks(S2Field<D> const& s2, int tile_pitch) {
  if (tile_pitch <= 0) throw std::invalid_argument("tile pitch must be positive");
  PeakReport<D> rep;
  rep.phi = s2.phi;
  rep.degenerate = s2.phi <= 0.0 || s2.phi >= 1.0;
  IVec<D> lim;
  for (int a = 0; a < D; ++a) lim[a] = (s2.dims[a] / 2) / tile_pitch;
  double const norm2 = s2.phi * s2.phi;
  IVec<D> m;
  for (int a = 0; a < D; ++a) m[a] = -lim[a];
  while (true) {
    bool zero = true;
    for (int a = 0; a < D; ++a) zero &= m[a] == 0;
    // Half domain: last nonzero component positive.
    bool upper = false;
    for (int a = D - 1; a >= 0; --a) {
      if (m[a] != 0) {
        upper = m[a] > 0;
        break;
      }
    }
    if (!zero && upper) {
      Peak<D> pk;
      pk.tile_lag = m;
      double best = -1.0;
      int const cube = D == 2 ? 9 : 27;
      for (int c = 0; c < cube; ++c) {
        IVec<D> lag;
        int r = c;
        for (int a = 0; a < D; ++a) {
          lag[a] = m[a] * tile_pitch + (r % 3 - 1);
          r /= 3;
        }
        double const v = s2.at(lag);
        if (v > best) {
          best = v;
          pk.node_lag = lag;
        }
      }
      pk.normalized = norm2 > 0.0 ? best / norm2 : 0.0;
      rep.max_secondary = std::max(rep.max_secondary, pk.normalized);
      rep.peaks.push_back(pk);
    }
    int a = 0;
    while (a < D && ++m[a] > lim[a]) {
      m[a] = -lim[a];
      ++a;
    }
    if (a == D) break;
  }
  return rep;
}

/// Strict local maxima of S2 over all lags, excluding lags
/// shorter than `min_lag` nodes, strongest first.
template <int D>
std::vector<std::pair<IVec<D>, double>> local_maxima(S2Field<D> const& s2, double min_lag, std::size_t count) {
  std::vector<std::pair<IVec<D>, double>> out;
  IVec<D> lag;
  for (std::size_t idx = 0; idx < s2.values.size(); ++idx) {
    std::size_t rem = idx;
    double len2 = 0.0;
    for (int a = 0; a < D; ++a) {
      int l = static_cast<int>(rem % s2.dims[a]);
      rem /= s2.dims[a];
      if (l > s2.dims[a] / 2) l -= s2.dims[a];
      lag[a] = l;
      len2 += static_cast<double>(l) * l;
    }
    if (len2 < min_lag * min_lag) continue;
    double const v = s2.values[idx];
    bool is_max = true;
    int const cube = D == 2 ? 9 : 27;
    for (int c = 0; c < cube && is_max; ++c) {
      IVec<D> q;
      int r = c;
      bool self = true;
      for (int a = 0; a < D; ++a) {
        int const d = r % 3 - 1;
        r /= 3;
        q[a] = lag[a] + d;
        self &= d == 0;
      }
      if (self) continue;
      double const w = s2.at(q);
      // Ties broken by index so plateaus report one node.
      is_max = v > w || (v == w && idx < s2.index(q));
    }
    if (is_max) out.push_back({lag, v});
  }
  std::stable_sort(out.begin(), out.end(), [](auto const& a, auto const& b) { return a.second > b.second; });
  if (out.size() > count) out.resize(count);
  return out;
}

}  // namespace wangls

#endif  // WANGLS_STATS_HPP

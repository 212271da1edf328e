// SPDX-License-Identifier: Apache-2.0
#ifndef WANGLS_MORPHOLOGY_HPP
#define WANGLS_MORPHOLOGY_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "levelset.hpp"

namespace wangls {

class MorphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thickness controls.  A negative t disables that foam kind; gamma is the
/// constant offset applied to the resulting field.
struct MorphParams {
  double t_c = -1.0;
  double t_o = -1.0;
  double gamma = 0.0;

  bool closed() const { return t_c >= 0.0; }
  bool open() const { return t_o >= 0.0; }
};

/// Per-tile scalar field on the packing grid; solid where F <= 0.
using TileScalars = std::vector<std::vector<double>>;
using TilePhase = std::vector<std::vector<std::uint8_t>>;

inline TileScalars offset(TileScalars f, double gamma) {
  for (auto& t : f) {
    for (auto& v : t) v += gamma;
  }
  return f;
}

inline TileScalars closed_foam(TileScalars const& ls1, TileScalars const& ls2, double t_c) {
  if (ls2.size() != ls1.size()) throw MorphError("closed foam needs LS2");
  TileScalars out(ls1.size());
  for (std::size_t t = 0; t < ls1.size(); ++t) {
    out[t].resize(ls1[t].size());
    for (std::size_t i = 0; i < ls1[t].size(); ++i) out[t][i] = ls2[t][i] - ls1[t][i] - t_c;
  }
  return out;
}

inline TileScalars open_foam(TileScalars const& ls1, TileScalars const& ls2, TileScalars const& ls3,
                             double t_o) {
  if (ls2.size() != ls1.size() || ls3.size() != ls1.size()) throw MorphError("open foam needs LS3");
  TileScalars out(ls1.size());
  for (std::size_t t = 0; t < ls1.size(); ++t) {
    out[t].resize(ls1[t].size());
    for (std::size_t i = 0; i < ls1[t].size(); ++i) {
      out[t][i] = 0.5 * (ls3[t][i] + ls2[t][i]) - ls1[t][i] - t_o;
    }
  }
  return out;
}

inline TileScalars combine(TileScalars const& a, TileScalars const& b) {
  if (a.size() != b.size()) throw MorphError("fields differ in tile count");
  TileScalars out(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].size() != b[t].size()) throw MorphError("fields differ in node count");
    out[t].resize(a[t].size());
    for (std::size_t i = 0; i < a[t].size(); ++i) out[t][i] = std::min(a[t][i], b[t][i]);
  }
  return out;
}

inline TilePhase extract_phase(TileScalars const& f) {
  TilePhase out(f.size());
  for (std::size_t t = 0; t < f.size(); ++t) {
    out[t].resize(f[t].size());
    for (std::size_t i = 0; i < f[t].size(); ++i) out[t][i] = f[t][i] <= 0.0;
  }
  return out;
}

/// Full morph of packed fields.  Without t_c and t_o the result is the
/// offset particle field LS1 + gamma.
template <int D>
TileScalars morph(TileFields<D> const& fields, MorphParams const& p) {
  if (p.closed() && fields.depth() < 2) throw MorphError("closed foam requested but LS2 is not tracked");
  if (p.open() && fields.depth() < 3) throw MorphError("open foam requested but LS3 is not tracked");
  TileScalars f;
  if (p.closed() && p.open()) {
    f = combine(closed_foam(fields.ls[0], fields.ls[1], p.t_c),
                open_foam(fields.ls[0], fields.ls[1], fields.ls[2], p.t_o));
  } else if (p.closed()) {
    f = closed_foam(fields.ls[0], fields.ls[1], p.t_c);
  } else if (p.open()) {
    f = open_foam(fields.ls[0], fields.ls[1], fields.ls[2], p.t_o);
  } else {
    f = fields.ls[0];
  }
  return p.gamma == 0.0 ? f : offset(std::move(f), p.gamma);
}

}  // namespace wangls

#endif  // WANGLS_MORPHOLOGY_HPP

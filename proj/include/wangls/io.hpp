// SPDX-License-Identifier: Apache-2.0
#ifndef WANGLS_IO_HPP
#define WANGLS_IO_HPP

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "levelset.hpp"
#include "packing.hpp"
#include "stats.hpp"
#include "tileset.hpp"

namespace wangls {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- raw field dumps --------------------------------------------------------
//
// 64-byte ASCII header, space padded, last byte '\n':
//   wangls-field 1 dim=<D> n=<N> tiles=<T> tile=<t> field=<name>
// followed by N^D little-endian IEEE-754 doubles, x fastest.

inline constexpr std::size_t kDumpHeader = 64;

struct DumpInfo {
  int dim = 0;
  int n = 0;
  int tiles = 0;
  int tile = 0;
  std::string field;
};

namespace detail {
inline void put_le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<char const*>(b), 8);
}

inline double get_le(unsigned char const* b) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_dump(std::ostream& out, DumpInfo const& info, std::vector<double> const& values) {
  std::string h = "wangls-field 1 dim=" + std::to_string(info.dim) + " n=" + std::to_string(info.n) +
                  " tiles=" + std::to_string(info.tiles) + " tile=" + std::to_string(info.tile) +
                  " field=" + info.field;
  if (h.size() > kDumpHeader - 1) throw FormatError("dump header too long");
  h.resize(kDumpHeader - 1, ' ');
  h += '\n';
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (double v : values) detail::put_le(out, v);
}

inline std::pair<DumpInfo, std::vector<double>> read_dump(std::istream& in) {
  char h[kDumpHeader];
  if (!in.read(h, kDumpHeader)) throw FormatError("truncated dump header");
  std::istringstream hs(std::string(h, kDumpHeader));
  std::string magic, tok;
  int version = 0;
  hs >> magic >> version;
  if (magic != "wangls-field" || version != 1) throw FormatError("not a field dump");
  DumpInfo info;
  while (hs >> tok) {
    auto const eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("bad header token '" + tok + "'");
    std::string const k = tok.substr(0, eq), v = tok.substr(eq + 1);
    if (k == "field") {
      info.field = v;
      continue;
    }
    int const x = std::stoi(v);
    if (k == "dim") info.dim = x;
    else if (k == "n") info.n = x;
    else if (k == "tiles") info.tiles = x;
    else if (k == "tile") info.tile = x;
    else throw FormatError("unknown header key '" + k + "'");
  }
  if ((info.dim != 2 && info.dim != 3) || info.n < 3) throw FormatError("bad dump dimensions");
  std::size_t count = 1;
  for (int a = 0; a < info.dim; ++a) count *= static_cast<std::size_t>(info.n);
  std::vector<unsigned char> raw(count * 8);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw FormatError("truncated dump body");
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = detail::get_le(raw.data() + 8 * i);
  return {info, values};
}

inline std::string dump_name(std::string const& field, int tile) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_tile%03d.bin", field.c_str(), tile);
  return buf;
}

// --- particle lists ---------------------------------------------------------
//
// One occurrence per line:
//   tile kind center... R params... provenance
// kind: disk (params: radius), ellipse/ellipsoid (semi-axes, then the axis
// directions row by row), polygon (vertex count, then x y per vertex).  R is
// the circumscribed radius.  provenance: p<k>:orig:phase=<i>:inducer=<kind>
// or p<k>:image:<dx>,<dy>[,<dz>] for an image translated by whole tiles.

template <int D>
void write_particles(std::ostream& out, std::vector<PlacedParticle<D>> const& placed) {
  out << "# wangls particles dim=" << D << " count=" << placed.size() << "\n";
  auto shape_text = [](Particle<D> const& p) {
    std::string s;
    std::visit(
        [&](auto const& sh) {
          using S = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<S, Sphere>) {
            s = "disk";
          } else if constexpr (std::is_same_v<S, Polygon>) {
            s = "polygon";
          } else {
            s = D == 2 ? "ellipse" : "ellipsoid";
          }
          for (int a = 0; a < D; ++a) s += " " + detail::fmt(p.center[a]);
          s += " " + detail::fmt(p.circumscribed_radius);
          if constexpr (std::is_same_v<S, Sphere>) {
            s += " " + detail::fmt(sh.radius);
          } else if constexpr (std::is_same_v<S, Polygon>) {
            s += " " + std::to_string(sh.vertices.size());
            for (auto const& v : sh.vertices) s += " " + detail::fmt(v[0]) + " " + detail::fmt(v[1]);
          } else {
            for (int a = 0; a < D; ++a) s += " " + detail::fmt(sh.semi_axes[a]);
            for (int a = 0; a < D; ++a) {
              for (int b = 0; b < D; ++b) s += " " + detail::fmt(sh.axes[a][b]);
            }
          }
        },
        p.shape);
    return s;
  };
  for (std::size_t k = 0; k < placed.size(); ++k) {
    auto const& p = placed[k];
    out << p.tile << " " << shape_text(p.particle) << " p" << k << ":orig:phase=" << p.phase
        << ":inducer=" << to_string(p.inducer) << "\n";
    for (auto const& im : p.images) {
      Vec<D> t;
      for (int a = 0; a < D; ++a) t[a] = im.translation[a];
      out << im.tile << " " << shape_text(translated(p.particle, t)) << " p" << k << ":image:";
      for (int a = 0; a < D; ++a) out << (a ? "," : "") << im.translation[a];
      out << "\n";
    }
  }
}

inline InducerKind parse_inducer(std::string const& s) {
  for (auto k : {InducerKind::tile, InducerKind::edge, InducerKind::vertex, InducerKind::face,
                 InducerKind::cube_edge}) {
    if (s == to_string(k)) return k;
  }
  throw FormatError("unknown inducer '" + s + "'");
}

template <int D>
std::vector<PlacedParticle<D>> read_particles(std::istream& in) {
  std::vector<PlacedParticle<D>> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.empty() || raw[0] == '#') continue;
    auto fail = [&](std::string const& why) {
      return FormatError("particle list line " + std::to_string(line) + ": " + why);
    };
    std::istringstream ls(raw);
    int tile = 0;
    std::string kind;
    if (!(ls >> tile >> kind)) throw fail("expected tile and kind");
    Particle<D> p{};
    for (int a = 0; a < D; ++a) {
      if (!(ls >> p.center[a])) throw fail("bad centre");
    }
    if (!(ls >> p.circumscribed_radius)) throw fail("bad circumscribed radius");
    if (kind == "disk") {
      Sphere s{};
      if (!(ls >> s.radius)) throw fail("bad radius");
      p.shape = s;
    } else if (kind == (D == 2 ? "ellipse" : "ellipsoid")) {
      Ellipsoid<D> e{};
      for (int a = 0; a < D; ++a) ls >> e.semi_axes[a];
      for (int a = 0; a < D; ++a) {
        for (int b = 0; b < D; ++b) ls >> e.axes[a][b];
      }
      if (!ls) throw fail("bad ellipsoid parameters");
      p.shape = e;
    } else if (kind == "polygon") {
      if constexpr (D == 2) {
        std::size_t n = 0;
        Polygon poly;
        if (!(ls >> n) || n < 3) throw fail("bad vertex count");
        poly.vertices.resize(n);
        for (auto& v : poly.vertices) ls >> v[0] >> v[1];
        if (!ls) throw fail("bad polygon vertices");
        p.shape = poly;
      } else {
        throw fail("polygons are two-dimensional");
      }
    } else {
      throw fail("unknown shape kind '" + kind + "'");
    }
    std::string prov;
    if (!(ls >> prov)) throw fail("missing provenance");
    std::vector<std::string> parts;
    std::stringstream ps(prov);
    for (std::string part; std::getline(ps, part, ':');) parts.push_back(part);
    if (parts.size() < 2 || parts[0].size() < 2 || parts[0][0] != 'p') throw fail("bad provenance");
    std::size_t const k = std::stoul(parts[0].substr(1));
    if (parts[1] == "orig") {
      if (k != out.size() || parts.size() != 4) throw fail("originals must be numbered in order");
      PlacedParticle<D> pp{tile, p, 0, InducerKind::tile, {}};
      if (parts[2].rfind("phase=", 0) != 0 || parts[3].rfind("inducer=", 0) != 0) throw fail("bad provenance");
      pp.phase = std::stoi(parts[2].substr(6));
      pp.inducer = parse_inducer(parts[3].substr(8));
      out.push_back(std::move(pp));
    } else if (parts[1] == "image") {
      if (k + 1 != out.size() || parts.size() != 3) throw fail("image must follow its original");
      Image<D> im{tile, {}};
      std::stringstream ts(parts[2]);
      std::string v;
      for (int a = 0; a < D; ++a) {
        if (!std::getline(ts, v, ',')) throw fail("bad translation");
        im.translation[a] = std::stoi(v);
      }
      out.back().images.push_back(im);
    } else {
      throw fail("bad provenance");
    }
  }
  return out;
}

// --- tilings -----------------------------------------------------------------
//
//   dims = nx ny [nz]
//   seed = <u64>
//   then one tile index per cell, x fastest, whitespace separated.

template <int D>
void write_tiling(std::ostream& out, Tiling<D> const& t) {
  out << "dims =";
  for (int a = 0; a < D; ++a) out << " " << t.dims[a];
  out << "\nseed = " << t.seed << "\n";
  for (std::size_t k = 0; k < t.cells.size(); ++k) {
    out << t.cells[k] << ((k + 1) % static_cast<std::size_t>(t.dims[0]) == 0 ? "\n" : " ");
  }
}

template <int D>
Tiling<D> read_tiling(std::istream& in) {
  Tiling<D> t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("dims =", 0) != 0) throw FormatError("tiling: missing dims");
  std::istringstream ds(line.substr(6));
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) {
    if (!(ds >> t.dims[a]) || t.dims[a] < 1) throw FormatError("tiling: bad dims");
    total *= static_cast<std::size_t>(t.dims[a]);
  }
  if (!std::getline(in, line) || line.rfind("seed =", 0) != 0) throw FormatError("tiling: missing seed");
  t.seed = std::stoull(line.substr(6));
  t.cells.resize(total);
  for (auto& c : t.cells) {
    if (!(in >> c)) throw FormatError("tiling: too few cells");
  }
  return t;
}

// --- images ------------------------------------------------------------------

/// 8-bit grayscale PNG, solid (1) black, void white, one node per pixel.
inline void write_png(std::string const& path, GlobalImage<2> const& img) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw FormatError("cannot open " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw FormatError("PNG encoding failed for " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.dims[0]), static_cast<png_uint_32>(img.dims[1]), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(img.dims[0]));
  for (int y = 0; y < img.dims[1]; ++y) {
    for (int x = 0; x < img.dims[0]; ++x) row[x] = img.at({x, y}) ? 0 : 255;
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

/// Reads an 8-bit grayscale PNG written by write_png back into a phase image.
inline GlobalImage<2> read_png(std::string const& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw FormatError("cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw FormatError("PNG decoding failed for " + path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw FormatError("expected 8-bit grayscale PNG");
  }
  GlobalImage<2> img;
  img.dims = {static_cast<int>(png_get_image_width(png, info)), static_cast<int>(png_get_image_height(png, info))};
  img.data.resize(static_cast<std::size_t>(img.dims[0]) * img.dims[1]);
  std::vector<png_byte> row(static_cast<std::size_t>(img.dims[0]));
  for (int y = 0; y < img.dims[1]; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < img.dims[0]; ++x) img.data[img.index({x, y})] = row[x] < 128;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return img;
}

/// Legacy ASCII VTK structured points.  Points are written in tile-frame
/// orientation (y and z upward), so the image rows are reversed.
inline void write_vtk(std::ostream& out, GlobalImage<3> const& img, double spacing) {
  out << "# vtk DataFile Version 3.0\nwangls phase\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << img.dims[0] << " " << img.dims[1] << " " << img.dims[2] << "\n";
  out << "ORIGIN 0 0 0\nSPACING " << detail::fmt(spacing) << " " << detail::fmt(spacing) << " "
      << detail::fmt(spacing) << "\n";
  out << "POINT_DATA " << img.size() << "\nSCALARS phase unsigned_char 1\nLOOKUP_TABLE default\n";
  for (int z = img.dims[2] - 1; z >= 0; --z) {
    for (int y = img.dims[1] - 1; y >= 0; --y) {
      for (int x = 0; x < img.dims[0]; ++x) out << int(img.at({x, y, z})) << (x + 1 < img.dims[0] ? " " : "\n");
    }
  }
}

// --- CSV -----------------------------------------------------------------------

/// Every lag in the centred window [-d/2, d/2) per axis.
template <int D>
void write_s2_csv(std::ostream& out, S2Field<D> const& s2) {
  static char const* names[] = {"lag_x", "lag_y", "lag_z"};
  for (int a = 0; a < D; ++a) out << names[a] << ",";
  out << "S2,normalized\n";
  double const n2 = s2.phi * s2.phi;
  IVec<D> lo, lag;
  for (int a = 0; a < D; ++a) lo[a] = -(s2.dims[a] / 2);
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) total *= static_cast<std::size_t>(s2.dims[a]);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    for (int a = 0; a < D; ++a) {
      lag[a] = lo[a] + static_cast<int>(rem % s2.dims[a]);
      rem /= s2.dims[a];
    }
    double const v = s2.at(lag);
    for (int a = 0; a < D; ++a) out << lag[a] << ",";
    out << detail::fmt(v) << "," << detail::fmt(n2 > 0.0 ? v / n2 : 0.0) << "\n";
  }
}

template <int D>
void write_peaks_header(std::ostream& out) {
  static char const* m[] = {"m_x", "m_y", "m_z"};
  static char const* l[] = {"lag_x", "lag_y", "lag_z"};
  out << "realization,seed,phi";
  for (int a = 0; a < D; ++a) out << "," << m[a];
  for (int a = 0; a < D; ++a) out << "," << l[a];
  out << ",normalized,is_max\n";
}

template <int D>
void write_peaks_rows(std::ostream& out, int realization, std::uint64_t seed, PeakReport<D> const& rep) {
  for (auto const& p : rep.peaks) {
    out << realization << "," << seed << "," << detail::fmt(rep.phi);
    for (int a = 0; a < D; ++a) out << "," << p.tile_lag[a];
    for (int a = 0; a < D; ++a) out << "," << p.node_lag[a];
    out << "," << detail::fmt(p.normalized) << "," << (p.normalized == rep.max_secondary ? 1 : 0) << "\n";
  }
}

// --- run configuration -------------------------------------------------------
//
//   # comment
//   key = value             global keys
//   [phase]                 starts a new schedule phase
//   key = value             phase keys (rbar, kappa, rho, sigma, steps, target)

struct RunConfig {
  std::string tileset = "v16";
  int n = 101;
  std::string shape = "disk";
  std::uint64_t seed = 0;
  std::optional<double> inset;
  bool exclude_vertices = false;
  bool track_ls3 = false;
  std::vector<Phase> schedule;
  double t_c = -1.0;
  double t_o = -1.0;
  double gamma = 0.0;
  std::vector<int> tiling;  // assembly dims
  int realizations = 1;
  int threads = 1;
  std::string out = "out";
  std::string base_dir;  // directory of the config file, for relative paths
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string const& msg)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg) {}
};

namespace detail {
inline double parse_real(std::string const& v, int line) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    double const x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (std::exception const&) {
    throw ConfigError(line, "expected a number, got '" + v + "'");
  }
}

inline long parse_long(std::string const& v, int line) {
  try {
    std::size_t pos = 0;
    long const x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (std::exception const&) {
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  }
}

inline bool parse_bool(std::string const& v, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(line, "expected true or false, got '" + v + "'");
}
}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string raw;
  int line = 0;
  bool in_phase = false;
  while (std::getline(in, raw)) {
    ++line;
    auto const hash = raw.find('#');
    std::string const s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s != "[phase]") throw ConfigError(line, "unknown section " + s);
      c.schedule.emplace_back();
      in_phase = true;
      continue;
    }
    auto const eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    std::string const k = detail::trim(s.substr(0, eq));
    std::string const v = detail::trim(s.substr(eq + 1));
    if (in_phase) {
      Phase& p = c.schedule.back();
      if (k == "rbar") p.rbar = detail::parse_real(v, line);
      else if (k == "kappa") p.kappa = detail::parse_real(v, line);
      else if (k == "rho") p.rho = detail::parse_real(v, line);
      else if (k == "sigma") p.sigma = detail::parse_real(v, line);
      else if (k == "steps") p.max_steps = detail::parse_long(v, line);
      else if (k == "target") p.target_fraction = detail::parse_real(v, line);
      else throw ConfigError(line, "unknown phase key '" + k + "'");
      continue;
    }
    if (k == "tileset") c.tileset = v;
    else if (k == "n") c.n = static_cast<int>(detail::parse_long(v, line));
    else if (k == "shape") c.shape = v;
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(detail::parse_long(v, line));
    else if (k == "inset") c.inset = detail::parse_real(v, line);
    else if (k == "exclude_vertices") c.exclude_vertices = detail::parse_bool(v, line);
    else if (k == "track_ls3") c.track_ls3 = detail::parse_bool(v, line);
    else if (k == "t_c") c.t_c = detail::parse_real(v, line);
    else if (k == "t_o") c.t_o = detail::parse_real(v, line);
    else if (k == "gamma") c.gamma = detail::parse_real(v, line);
    else if (k == "realizations") c.realizations = static_cast<int>(detail::parse_long(v, line));
    else if (k == "threads") c.threads = static_cast<int>(detail::parse_long(v, line));
    else if (k == "out") c.out = v;
    else if (k == "tiling") {
      c.tiling.clear();
      std::string part;
      std::stringstream ts(v);
      while (std::getline(ts, part, 'x')) c.tiling.push_back(static_cast<int>(detail::parse_long(detail::trim(part), line)));
    } else {
      throw ConfigError(line, "unknown key '" + k + "'");
    }
  }
  if (c.shape != "disk" && c.shape != "polygon" && c.shape != "ellipsoid") {
    throw ConfigError(0, "shape must be disk, polygon or ellipsoid");
  }
  if (c.n < 3 || c.n % 2 == 0) throw ConfigError(0, "n must be odd and at least 3");
  if (c.realizations < 0) throw ConfigError(0, "realizations must be non-negative");
  if (c.threads < 1) throw ConfigError(0, "threads must be positive");
  for (int d : c.tiling) {
    if (d < 1) throw ConfigError(0, "tiling dimensions must be positive");
  }
  return c;
}

template <int D>
PackingParams<D> packing_params(RunConfig const& c) {
  PackingParams<D> p;
  p.schedule = c.schedule;
  if (c.shape == "disk") p.shape = DiskLaw{};
  else if (c.shape == "ellipsoid") p.shape = EllipsoidLaw{};
  else if constexpr (D == 2) p.shape = PolygonLaw{};
  else throw ConfigError(0, "polygons are two-dimensional");
  p.inset = c.inset;
  p.exclude_vertices = c.exclude_vertices;
  p.track_ls3 = c.track_ls3;
  p.seed = c.seed;
  p.update.threads = c.threads;
  return p;
}

}  // namespace wangls

#endif  // WANGLS_IO_HPP

// SPDX-License-Identifier: Apache-2.0
// File-based pipeline behind the command-line front end.  Every step reads
// the run configuration plus the artifacts of earlier steps from the output
// directory and writes its own artifacts there.
#ifndef WANGLS_PIPELINE_HPP
#define WANGLS_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"
#include "morphology.hpp"
#include "packing.hpp"
#include "stats.hpp"
#include "tileset.hpp"

namespace wangls {

/// Invalid user input that is not a parse error (missing artifacts, bad
/// parameter combinations).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;

inline RunConfig load_config(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path);
  RunConfig c = parse_config(in);
  c.base_dir = fs::path(path).parent_path().string();
  return c;
}

inline AnyTileSet load_tileset(std::string const& spec, std::string const& base_dir = {}) {
  if (auto b = builtin_tileset(spec)) return *b;
  fs::path p(spec);
  if (!fs::exists(p) && !base_dir.empty() && p.is_relative()) p = fs::path(base_dir) / p;
  std::ifstream in(p);
  if (!in) throw InputError("unknown tile set '" + spec + "'");
  return parse_tileset(in);
}

inline void write_text(fs::path const& path, std::string const& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

inline std::string read_text(fs::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("missing " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <int D>
void save_tile_fields(fs::path const& dir, std::string const& name, GridSpec<D> const& grid,
                      std::vector<std::vector<double>> const& tiles) {
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    std::ofstream out(dir / dump_name(name, static_cast<int>(t)), std::ios::binary);
    if (!out) throw InputError("cannot write dumps in " + dir.string());
    write_dump(out, {D, grid.n(), static_cast<int>(tiles.size()), static_cast<int>(t), name}, tiles[t]);
  }
}

/// Reads `name` dumps for every tile; returns empty when the first is absent.
template <int D>
std::vector<std::vector<double>> load_tile_fields(fs::path const& dir, std::string const& name, int tiles,
                                                  GridSpec<D> const& grid) {
  std::vector<std::vector<double>> out;
  if (!fs::exists(dir / dump_name(name, 0))) return out;
  for (int t = 0; t < tiles; ++t) {
    std::ifstream in(dir / dump_name(name, t), std::ios::binary);
    if (!in) throw InputError("missing " + dump_name(name, t));
    auto [info, values] = read_dump(in);
    if (info.dim != D || info.n != grid.n() || info.tiles != tiles || info.tile != t || info.field != name) {
      throw InputError(dump_name(name, t) + " does not match the configuration");
    }
    out.push_back(std::move(values));
  }
  return out;
}

// --- analyze -----------------------------------------------------------------

template <int D>
std::string analyze_report(TileSet<D> const& set) {
  std::ostringstream os;
  auto const an = analyze_codes(set);
  os << "dimension: " << D << "\n";
  os << "tiles: " << set.size() << "\n";
  os << "codes:";
  for (int a = 0; a < D; ++a) os << " " << set.code_counts()[a];
  os << "\n";
  unsigned const vmask = kNumMasks<D> - 1;
  int const vc = an.num_vertex_classes();
  os << vc << (vc == 1 ? " vertex class\n" : " vertex classes\n");
  for (int c = 0; c < vc; ++c) os << "  vertex class " << c << ": " << an.members(vmask, c).size() << " corners\n";
  if constexpr (D == 3) {
    static char const* axis[] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
      int const ec = an.num_edge_classes(a);
      os << ec << (ec == 1 ? " edge class" : " edge classes") << " along " << axis[a] << "\n";
    }
  }
  auto const rep = validate_stochastic(set);
  os << "stochastic: " << (rep.is_stochastic ? "yes" : "no") << "\n";
  os << "constraint combinations: " << rep.combinations.size() << ", without candidates: " << rep.deficient.size()
     << ", with a single candidate: " << rep.warnings.size() << "\n";
  return os.str();
}

// --- pack --------------------------------------------------------------------

template <int D>
void pack_step(RunConfig const& c, TileSet<D> const& set, fs::path const& dir, std::ostream& log) {
  if (c.schedule.empty()) throw InputError("config has no [phase] section");
  GridSpec<D> const grid(c.n);
  auto pk = pack(set, grid, packing_params<D>(c));
  fs::create_directories(dir);
  {
    std::ostringstream ps;
    write_particles(ps, pk.particles());
    write_text(dir / "particles.txt", ps.str());
  }
  auto const& f = pk.fields();
  save_tile_fields<D>(dir, "ls1", grid, f.ls[0]);
  save_tile_fields<D>(dir, "ls2", grid, f.ls[1]);
  if (f.track_ls3) save_tile_fields<D>(dir, "ls3", grid, f.ls[2]);
  std::ostringstream st;
  st << "status: " << pk.status() << "\n";
  st << "particles: " << pk.particles().size() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", pk.solid_fraction());
  st << "solid_fraction: " << buf << "\n";
  for (std::size_t p = 0; p < pk.phase_stats().size(); ++p) {
    auto const& s = pk.phase_stats()[p];
    st << "phase " << p << ": placed " << s.placed << ", admissible at start " << s.admissible_at_start
       << (s.exhausted ? ", exhausted" : "") << "\n";
  }
  write_text(dir / "pack.txt", st.str());
  log << st.str();
}

// --- morph -------------------------------------------------------------------

template <int D>
void morph_step(RunConfig const& c, TileSet<D> const& set, fs::path const& dir, std::ostream& log) {
  GridSpec<D> const grid(c.n);
  TileFields<D> f = init_fields(set, grid, false);
  f.ls[0] = load_tile_fields<D>(dir, "ls1", set.size(), grid);
  f.ls[1] = load_tile_fields<D>(dir, "ls2", set.size(), grid);
  if (f.ls[0].empty() || f.ls[1].empty()) throw InputError("no packed fields in " + dir.string() + "; run pack first");
  auto ls3 = load_tile_fields<D>(dir, "ls3", set.size(), grid);
  if (!ls3.empty()) {
    f.track_ls3 = true;
    f.ls[2] = std::move(ls3);
  }
  MorphParams const mp{c.t_c, c.t_o, c.gamma};
  TileScalars field;
  try {
    field = morph(f, mp);
  } catch (MorphError const& e) {
    throw InputError(e.what());
  }
  auto const phase = extract_phase(field);
  save_tile_fields<D>(dir, "morph", grid, field);
  std::vector<std::vector<double>> ph(phase.size());
  std::size_t solid = 0, total = 0;
  for (std::size_t t = 0; t < phase.size(); ++t) {
    ph[t].assign(phase[t].begin(), phase[t].end());
    for (auto v : phase[t]) solid += v;
    total += phase[t].size();
  }
  save_tile_fields<D>(dir, "phase", grid, ph);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(solid) / static_cast<double>(total));
  log << "morph: t_c=" << c.t_c << " t_o=" << c.t_o << " gamma=" << c.gamma << " solid_fraction: " << buf << "\n";
}

/// Per-tile binary phase: the morph output when present, else LS1 <= 0.
template <int D>
TilePhase load_phase(RunConfig const& c, TileSet<D> const& set, fs::path const& dir) {
  GridSpec<D> const grid(c.n);
  auto f = load_tile_fields<D>(dir, "phase", set.size(), grid);
  bool const binary = !f.empty();
  if (!binary) f = load_tile_fields<D>(dir, "ls1", set.size(), grid);
  if (f.empty()) throw InputError("no phase or packed fields in " + dir.string());
  TilePhase out(f.size());
  for (std::size_t t = 0; t < f.size(); ++t) {
    out[t].resize(f[t].size());
    for (std::size_t i = 0; i < f[t].size(); ++i) out[t][i] = binary ? f[t][i] != 0.0 : f[t][i] <= 0.0;
  }
  return out;
}

// --- assemble / render -------------------------------------------------------

/// Seed of assembly realization r.  Realization 0 is the `assemble` tiling.
inline std::uint64_t tiling_seed(std::uint64_t seed, int r) { return derive_seed(seed, 1 + static_cast<std::uint64_t>(r)); }

template <int D>
IVec<D> tiling_dims(RunConfig const& c) {
  if (static_cast<int>(c.tiling.size()) != D) throw InputError("tiling needs " + std::to_string(D) + " extents");
  IVec<D> d;
  for (int a = 0; a < D; ++a) d[a] = c.tiling[a];
  return d;
}

template <int D>
void assemble_step(RunConfig const& c, TileSet<D> const& set, fs::path const& dir, std::ostream& log) {
  auto const t = assemble(set, tiling_dims<D>(c), tiling_seed(c.seed, 0));
  fs::create_directories(dir);
  std::ostringstream os;
  write_tiling(os, t);
  write_text(dir / "tiling.txt", os.str());
  log << "tiling: " << t.count() << " cells\n";
}

template <int D>
void render_step(RunConfig const& c, TileSet<D> const& set, fs::path const& dir, std::ostream& log) {
  std::istringstream in(read_text(dir / "tiling.txt"));
  auto const t = read_tiling<D>(in);
  if (auto bad = check_tiling(set, t)) throw InputError("tiling.txt: " + *bad);
  GridSpec<D> const grid(c.n);
  auto const img = render(t, grid, load_phase(c, set, dir));
  if constexpr (D == 2) {
    write_png((dir / "render.png").string(), img);
    log << "render.png: " << img.dims[0] << "x" << img.dims[1] << "\n";
  } else {
    std::ostringstream os;
    write_vtk(os, img, grid.h());
    write_text(dir / "render.vtk", os.str());
    log << "render.vtk: " << img.dims[0] << "x" << img.dims[1] << "x" << img.dims[2] << "\n";
  }
}

// --- stats -------------------------------------------------------------------

/// Drops the closing node layer of every axis so the image tiles the
/// periodic FFT domain exactly.
template <int D>
GlobalImage<D> periodic_crop(GlobalImage<D> const& img) {
  GlobalImage<D> out;
  out.tile_nodes = img.tile_nodes;
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) {
    out.dims[a] = img.dims[a] - 1;
    total *= static_cast<std::size_t>(out.dims[a]);
  }
  out.data.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    IVec<D> g;
    std::size_t rem = k;
    for (int a = 0; a < D; ++a) {
      g[a] = static_cast<int>(rem % out.dims[a]);
      rem /= out.dims[a];
    }
    out.data[k] = img.at(g);
  }
  return out;
}

struct RealizationStats {
  std::uint64_t seed;
  double phi;
  double max_secondary;
};

template <int D>
std::vector<RealizationStats> stats_step(RunConfig const& c, TileSet<D> const& set, fs::path const& dir,
                                         std::ostream& log) {
  if (c.realizations < 1) throw InputError("realizations must be at least 1");
  GridSpec<D> const grid(c.n);
  auto const phase = load_phase(c, set, dir);
  auto const dims = tiling_dims<D>(c);
  std::ostringstream peaks, summary;
  write_peaks_header<D>(peaks);
  summary << "realization,seed,phi,max_normalized\n";
  std::vector<RealizationStats> out;
  S2Field<D> mean;
  for (int r = 0; r < c.realizations; ++r) {
    std::uint64_t const seed = tiling_seed(c.seed, r);
    auto const t = assemble(set, dims, seed);
    auto const s2 = s2_fft(periodic_crop(render(t, grid, phase)));
    auto const rep = secondary_peaks(s2, grid.n() - 1);
    write_peaks_rows(peaks, r, seed, rep);
    summary << r << "," << seed << "," << detail::fmt(rep.phi) << "," << detail::fmt(rep.max_secondary) << "\n";
    out.push_back({seed, rep.phi, rep.max_secondary});
    if (r == 0) {
      mean = s2;
    } else {
      for (std::size_t i = 0; i < s2.values.size(); ++i) mean.values[i] += s2.values[i];
      mean.phi += s2.phi;
    }
  }
  for (auto& v : mean.values) v /= c.realizations;
  mean.phi /= c.realizations;
  fs::create_directories(dir);
  std::ostringstream s2csv;
  write_s2_csv(s2csv, mean);
  write_text(dir / "s2.csv", s2csv.str());
  write_text(dir / "peaks.csv", peaks.str());
  write_text(dir / "peaks_summary.csv", summary.str());
  std::vector<double> m;
  for (auto const& s : out) m.push_back(s.max_secondary);
  std::sort(m.begin(), m.end());
  double const median = m.size() % 2 ? m[m.size() / 2] : 0.5 * (m[m.size() / 2 - 1] + m[m.size() / 2]);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", median);
  log << "realizations: " << out.size() << ", median max secondary peak: " << buf << "\n";
  return out;
}

}  // namespace wangls

#endif  // WANGLS_PIPELINE_HPP

// SPDX-License-Identifier: Apache-2.0
// wangls: command-line front end.  Exit codes: 0 ok, 2 invalid input,
// 3 consistency violation.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "wangls/pipeline.hpp"

using namespace wangls;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kInconsistent = 3 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
};

struct Overrides {
  std::string tileset;
  std::string tiling;
  std::optional<int> realizations;
};

RunConfig resolve(Globals const& g, Overrides const& o) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (g.threads) {
    if (*g.threads < 1) throw InputError("--threads must be positive");
    c.threads = *g.threads;
  }
  if (!g.out.empty()) {
    c.out = g.out;
  } else if (!c.base_dir.empty() && fs::path(c.out).is_relative()) {
    c.out = (fs::path(c.base_dir) / c.out).string();
  }
  if (!o.tileset.empty()) c.tileset = o.tileset;
  if (!o.tiling.empty()) {
    std::istringstream in("tiling = " + o.tiling + "\nn = " + std::to_string(c.n));
    c.tiling = parse_config(in).tiling;
  }
  if (o.realizations) c.realizations = *o.realizations;
  return c;
}

template <class F>
int dispatch(RunConfig const& c, F&& f) {
  auto const set = load_tileset(c.tileset, c.base_dir);
  std::visit([&](auto const& s) { f(s); }, set);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wang-tile level-set microstructure generator"};
  app.require_subcommand(1);
  Globals g;
  Overrides o;
  app.add_option("--config", g.config, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads");

  auto* analyze = app.add_subcommand("analyze", "Connectivity and stochastic checks of a tile set");
  analyze->add_option("tileset", o.tileset, "Builtin name or tile-set file");
  auto* pack_cmd = app.add_subcommand("pack", "Pack particles into every tile");
  pack_cmd->add_option("--tileset", o.tileset, "Builtin name or tile-set file");
  auto* morph_cmd = app.add_subcommand("morph", "Foam morphology from packed fields");
  morph_cmd->add_option("--tileset", o.tileset, "Builtin name or tile-set file");
  auto* assemble_cmd = app.add_subcommand("assemble", "Stochastic tiling of a domain");
  assemble_cmd->add_option("--tileset", o.tileset, "Builtin name or tile-set file");
  assemble_cmd->add_option("--tiling", o.tiling, "Extents such as 10x5");
  auto* render_cmd = app.add_subcommand("render", "Global image of the assembled tiling");
  render_cmd->add_option("--tileset", o.tileset, "Builtin name or tile-set file");
  auto* stats_cmd = app.add_subcommand("stats", "Two-point statistics over tiling realizations");
  stats_cmd->add_option("--tileset", o.tileset, "Builtin name or tile-set file");
  stats_cmd->add_option("--tiling", o.tiling, "Extents such as 10x5");
  stats_cmd->add_option("--realizations", o.realizations, "Number of tilings");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    RunConfig const c = resolve(g, o);
    fs::path const dir(c.out);
    if (*analyze) return dispatch(c, [&](auto const& s) { std::cout << analyze_report(s); });
    if (*pack_cmd) return dispatch(c, [&](auto const& s) { pack_step(c, s, dir, std::cout); });
    if (*morph_cmd) return dispatch(c, [&](auto const& s) { morph_step(c, s, dir, std::cout); });
    if (*assemble_cmd) return dispatch(c, [&](auto const& s) { assemble_step(c, s, dir, std::cout); });
    if (*render_cmd) return dispatch(c, [&](auto const& s) { render_step(c, s, dir, std::cout); });
    if (*stats_cmd) return dispatch(c, [&](auto const& s) { stats_step(c, s, dir, std::cout); });
  } catch (ContinuityViolation const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInconsistent;
  } catch (ParseError const& e) {
    std::cerr << "error: tile set " << e.what() << "\n";
    return kInvalid;
  } catch (ConfigError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (InputError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (FormatError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (TileSetError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (NoCandidateError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (ShapeSamplingError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (std::invalid_argument const& e) {
    // PackingError, MorphError, GridError
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInconsistent;
  }
  return kOk;
}

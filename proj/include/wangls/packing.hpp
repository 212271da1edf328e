// SPDX-License-Identifier: Apache-2.0
#ifndef WANGLS_PACKING_HPP
#define WANGLS_PACKING_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "levelset.hpp"
#include "rng.hpp"
#include "tileset.hpp"

namespace wangls {

class PackingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One stage of the schedule.  A phase ends after `max_steps` placements,
/// when the solid node fraction reaches `target_fraction`, or when no
/// admissible node is left.  Negative values disable a criterion.
struct Phase {
  double rbar = 0.1;
  double kappa = 0.0;
  double rho = std::numeric_limits<double>::infinity();
  double sigma = std::numeric_limits<double>::infinity();
  long max_steps = -1;
  double target_fraction = -1.0;
};

template <int D>
struct PackingParams {
  std::vector<Phase> schedule;
  ShapeLaw<D> shape = DiskLaw{};
  /// Virtual boundary inset; unset selects the phase radius in foam mode
  /// (LS3 tracked) and 0 otherwise.
  std::optional<double> inset;
  bool exclude_vertices = false;
  bool track_ls3 = false;
  std::uint64_t seed = 0;
  UpdateOptions update;

  void validate() const {
    if (schedule.empty()) throw PackingError("schedule has no phases");
    for (auto const& p : schedule) {
      if (!(p.rbar > 0.0)) throw PackingError("phase radius must be positive");
      if (!(p.kappa >= 0.0)) throw PackingError("kappa must be non-negative");
      if (!(p.rho > 0.0) || !(p.sigma > 0.0)) throw PackingError("rho and sigma must be positive");
    }
    if (inset && !(*inset >= 0.0)) throw PackingError("inset must be non-negative");
  }

  double inset_for(Phase const& p) const { return inset ? *inset : (track_ls3 ? p.rbar : 0.0); }
};

template <int D>
struct PlacedParticle {
  int tile;
  Particle<D> particle;
  int phase;
  InducerKind inducer;
  std::vector<Image<D>> images;
};

struct PhaseStats {
  long placed = 0;
  std::size_t admissible_at_start = 0;
  bool exhausted = false;
};

/// Random sequential addition over a whole tile set.
template <int D>
class Packer {
 public:
  Packer(TileSet<D> set, GridSpec<D> const& grid, PackingParams<D> params)
      : set_(std::move(set)),
        analysis_(analyze_codes(set_)),
        grids_(build_neighbor_grids(set_, analysis_)),
        params_(std::move(params)),
        fields_(init_fields(set_, grid, params_.track_ls3)),
        rng_(params_.seed) {
    params_.validate();
    if (!validate_stochastic(set_).is_stochastic) throw PackingError("tile set is not stochastic");
    stats_.resize(params_.schedule.size());
    solid_.assign(set_.size(), std::vector<std::uint8_t>(grid.size(), 0));
  }

  TileSet<D> const& set() const { return set_; }
  ConnectivityAnalysis<D> const& analysis() const { return analysis_; }
  std::vector<NeighborGrid<D>> const& grids() const { return grids_; }
  PackingParams<D> const& params() const { return params_; }
  TileFields<D> const& fields() const { return fields_; }
  TileFields<D>& fields() { return fields_; }
  std::vector<PlacedParticle<D>> const& particles() const { return particles_; }
  std::vector<PhaseStats> const& phase_stats() const { return stats_; }
  int phase() const { return phase_; }
  long steps() const { return static_cast<long>(particles_.size()); }
  bool finished() const { return phase_ >= static_cast<int>(params_.schedule.size()); }
  AdmissibleMask<D> const* mask() const { return mask_.get(); }

  double solid_fraction() const {
    return static_cast<double>(solid_count_) /
           static_cast<double>(fields_.grid.size() * static_cast<std::size_t>(set_.size()));
  }

  /// Places one particle.  Returns false once the schedule is complete.
  bool step() {
    while (!finished()) {
      Phase const& ph = params_.schedule[phase_];
      auto& st = stats_[phase_];
      if (!mask_) begin_phase();
      bool const steps_done = ph.max_steps >= 0 && st.placed >= ph.max_steps;
      bool const target_done = ph.target_fraction >= 0.0 && solid_fraction() >= ph.target_fraction;
      if (steps_done || target_done) {
        next_phase();
        continue;
      }
      if (mask_->count() == 0) {
        st.exhausted = true;
        next_phase();
        continue;
      }
      place(ph);
      ++st.placed;
      return true;
    }
    return false;
  }

  void run() {
    while (step()) {
    }
  }

  /// "exhausted" when the last phase ran out of admissible nodes, otherwise
  /// "complete".
  std::string status() const {
    if (!stats_.empty() && stats_.back().exhausted) return "exhausted";
    return "complete";
  }

 private:
  void begin_phase() {
    Phase const& ph = params_.schedule[phase_];
    double const inset = params_.inset_for(ph);
    art_ = std::make_unique<ArtificialField<D>>(set_, analysis_, fields_.grid, ph.rbar + inset);
    art_->build(fields_);
    rebuild_mask(ph);
    stats_[phase_].admissible_at_start = mask_->count();
  }

  /// The second-neighbour cap needs two distinct particles; the images of a
  /// single one make LS2 finite but can never satisfy it.
  void rebuild_mask(Phase const& ph) {
    double const sigma = particles_.size() >= 2 ? ph.sigma : std::numeric_limits<double>::infinity();
    mask_ = std::make_unique<AdmissibleMask<D>>(
        fields_, MaskParams{ph.rbar, ph.kappa, ph.rho, sigma, params_.exclude_vertices});
  }

  void next_phase() {
    ++phase_;
    mask_.reset();
    art_.reset();
  }

  void place(Phase const& ph) {
    auto const [tile, idx] = mask_->select(rng_.below(mask_->count()));
    Vec<D> const center = jitter_center(*mask_, fields_.grid, tile, idx, rng_, ph.rbar);
    Particle<D> p = sample_shape<D>(rng_, params_.shape, ph.rbar, center);
    auto const inducer = find_copy_inducer<D>(center, ph.rbar, params_.inset_for(ph));
    auto images = propagate_copies(inducer, tile, analysis_, set_);
    UpdateOptions opt = params_.update;
    if (opt.patch_half_width <= 0.0) {
      double m = 2.0 * fields_.grid.h();
      if (std::isfinite(ph.rho)) m = std::max(m, ph.rho);
      if (std::isfinite(ph.sigma)) m = std::max(m, ph.sigma);
      opt.patch_half_width = ph.rbar + m + 4.0 * fields_.grid.h();
    }
    auto const rep = update_with_particle(fields_, grids_, p, tile, images, opt);
    mask_->refresh(fields_, art_->refresh(fields_, rep.changed));
    for (int t = 0; t < set_.size(); ++t) {
      for (auto i : rep.changed[t]) {
        std::uint8_t const s = fields_.ls[0][t][i] <= 0.0;
        if (s != solid_[t][i]) {
          solid_[t][i] = s;
          solid_count_ += s ? 1 : -1;
        }
      }
    }
    particles_.push_back({tile, std::move(p), phase_, inducer.kind, std::move(images)});
    if (particles_.size() == 2 && std::isfinite(ph.sigma)) rebuild_mask(ph);
  }

  TileSet<D> set_;
  ConnectivityAnalysis<D> analysis_;
  std::vector<NeighborGrid<D>> grids_;
  PackingParams<D> params_;
  TileFields<D> fields_;
  Rng rng_;
  int phase_ = 0;
  std::vector<PhaseStats> stats_;
  std::vector<PlacedParticle<D>> particles_;
  std::unique_ptr<ArtificialField<D>> art_;
  std::unique_ptr<AdmissibleMask<D>> mask_;
  std::vector<std::vector<std::uint8_t>> solid_;
  long solid_count_ = 0;
};

template <int D>
Packer<D> pack(TileSet<D> set, GridSpec<D> const& grid, PackingParams<D> params) {
  Packer<D> p(std::move(set), grid, std::move(params));
  p.run();
  return p;
}

/// Every occurrence (original and images) of every particle, grouped by
/// tile, with the centre expressed in that tile's frame.
template <int D>
struct Occurrence {
  int tile;
  std::size_t particle;  // index into the placed list
  bool original;
  Particle<D> shape;     // centre in tile frame
};

template <int D>
std::vector<Occurrence<D>> occurrences(std::vector<PlacedParticle<D>> const& placed) {
  std::vector<Occurrence<D>> out;
  for (std::size_t k = 0; k < placed.size(); ++k) {
    auto const& p = placed[k];
    out.push_back({p.tile, k, true, p.particle});
    for (auto const& im : p.images) {
      Vec<D> t;
      for (int a = 0; a < D; ++a) t[a] = im.translation[a];
      out.push_back({im.tile, k, false, translated(p.particle, t)});
    }
  }
  return out;
}

}  // namespace wangls

#endif  // WANGLS_PACKING_HPP

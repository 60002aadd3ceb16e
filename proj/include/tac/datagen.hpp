#ifndef TAC_DATAGEN_HPP
#define TAC_DATAGEN_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "tac/amr.hpp"

namespace tac {

// Synthetic stand-in for unavailable simulation snapshots: a smooth field of
// clustered Gaussian bumps over low-amplitude noise, refined into an AMR
// hierarchy by per-level block-maximum thresholds.
struct GenSpec {
  uint64_t seed = 1;
  int finest_side = 64;
  int num_levels = 2;
  int unit_block_size = 16;
  ValueType value_type = ValueType::f32;
  double target_finest_density = 0.25;
  double smoothness = 2.0; // Gaussian smoothing radius in cells; 0 = white noise
  std::pair<double, double> value_range{0.0, 1.0};

  void validate() const;
};

// Deterministic for a fixed seed. Bump widths scale with smoothness, so
// smoothness 0 degenerates to (near) white noise.
std::vector<double> generate_uniform_field(const GenSpec &spec);

struct GenReport {
  std::vector<double> level_densities; // finest -> coarsest
  double finest_threshold = 0.0;
  bool density_target_met = false; // within +-2 percentage points
  int bisection_iterations = 0;
};

// Assigns unit-block-aligned regions to the finest level whose block-maximum
// threshold they meet; the finest threshold is bisected until the finest
// density lands within 2pp of the target (or 50 iterations pass, in which
// case the achieved density is reported). Coarse values are footprint means
// of the fine field, so the partition invariant always holds.
AMRDataset refine_to_amr(const std::vector<double> &field, const GenSpec &spec,
                         GenReport *report = nullptr);

AMRDataset generate_dataset(const GenSpec &spec, GenReport *report = nullptr);

} // namespace tac

#endif

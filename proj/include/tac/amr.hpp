#ifndef TAC_AMR_HPP
#define TAC_AMR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tac/common.hpp"

namespace tac {

// Occupancy over unit blocks. A set bit means the block holds defined data.
struct BlockMask {
  Index3 dims{0, 0, 0};
  std::vector<uint8_t> bits; // one byte per block, 0 or 1

  BlockMask() = default;
  BlockMask(int nx, int ny, int nz, bool full = false)
      : dims{nx, ny, nz}, bits(cell_count(dims), full ? 1 : 0) {}

  bool get(int x, int y, int z) const { return bits[linear_index(dims, x, y, z)] != 0; }
  void set(int x, int y, int z, bool v) { bits[linear_index(dims, x, y, z)] = v ? 1 : 0; }
  int64_t popcount() const;
  int64_t total() const { return cell_count(dims); }
  double density() const { return total() == 0 ? 0.0 : double(popcount()) / double(total()); }
  bool operator==(const BlockMask &o) const = default;
};

// One refinement level: dense side^3 scalar field plus per-unit-block
// occupancy. Cells in empty blocks hold the sentinel 0.0; the mask, not the
// sentinel, decides definedness.
struct LevelGrid {
  int side = 0;
  int unit_block_size = 16;
  std::vector<double> values; // side^3, x fastest
  BlockMask occupancy;

  LevelGrid() = default;
  LevelGrid(int side_, int unit_block_size_);

  int blocks_per_dim() const { return side / unit_block_size; }
  Index3 dims3() const { return {side, side, side}; }
  double at(int x, int y, int z) const { return values[linear_index(dims3(), x, y, z)]; }
  double &at(int x, int y, int z) { return values[linear_index(dims3(), x, y, z)]; }
  int64_t defined_cells() const;
  void validate() const; // unit size divides side, sentinel discipline
  bool operator==(const LevelGrid &o) const = default;
};

// Multi-level AMR dataset, levels[0] finest. Every finest-resolution cell is
// owned by exactly one level's occupancy after up-sampling coarse masks.
struct AMRDataset {
  std::vector<LevelGrid> levels;
  int refinement_factor = 2;
  int domain_side = 0; // cells at finest resolution
  ValueType value_type = ValueType::f32;

  int num_levels() const { return static_cast<int>(levels.size()); }
  int unit_block_size() const { return levels.empty() ? 0 : levels[0].unit_block_size; }
  // Side ratio between the finest level and level i.
  int cumulative_factor(int level) const;
  int64_t defined_values() const;
  void validate() const; // geometry + partition invariant
  bool operator==(const AMRDataset &o) const = default;
};

// Fraction of non-empty unit blocks.
double level_density(const LevelGrid &level);

// Nearest-neighbor replication of each cell into a factor^3 cube.
// Output sides beyond kMaxUpsampleSide are rejected.
inline constexpr int kMaxUpsampleSide = 1 << 14;
std::vector<double> upsample_level(const LevelGrid &level, int factor);

// Composite all levels into one dense finest-resolution field. Verifies the
// partition invariant cell-wise and reports the first offending cell.
std::vector<double> merge_to_uniform(const AMRDataset &dataset);

// Dataset directory I/O: one text descriptor plus raw value/mask files per
// level (little-endian, x fastest). Round trips are bit-identical.
void save_dataset(const AMRDataset &dataset, const std::string &descriptor_path);
AMRDataset load_dataset(const std::string &descriptor_path);

// Snaps v through float when the dataset stores 32-bit values, so in-memory
// data always matches what a save/load round trip would produce.
inline double canonical_value(double v, ValueType t) {
  return t == ValueType::f32 ? static_cast<double>(static_cast<float>(v)) : v;
}

} // namespace tac

#endif

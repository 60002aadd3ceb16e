#ifndef TAC_SUBBLOCK_HPP
#define TAC_SUBBLOCK_HPP

#include <array>
#include <vector>

#include "tac/amr.hpp"
#include "tac/common.hpp"

namespace tac {

// A dense sub-block extracted from a level. `dims_ub` lives on the owning
// group; payloads are stored in canonical orientation (group dims), with
// `perm` recording how payload axes map back to source axes:
// payload axis a runs along source axis perm[a]. Identity for cube extraction.
struct SubBlock {
  Index3 origin{0, 0, 0}; // unit-block coordinates in the source level
  Index3 perm{0, 1, 2};
  std::vector<double> values; // dims_ub * unit_block_size cells per axis
};

struct BlockGroup {
  Index3 dims_ub{0, 0, 0}; // extent in unit blocks, canonical (sorted desc)
  std::vector<SubBlock> blocks;
};

// Disjoint cover of a level's non-empty unit blocks, grouped by shape so each
// group can feed the codec as one 4D array.
struct SubBlockSet {
  Index3 source_dims_ub{0, 0, 0};
  int unit_block_size = 0;
  std::vector<BlockGroup> groups;

  int64_t covered_unit_blocks() const;
  int64_t total_values() const;
};

// Rebuilds a level (values + mask) from a sub-block cover. Rejects
// out-of-range or overlapping blocks and invalid permutation tags.
LevelGrid restore_from_subblocks(const SubBlockSet &set);

// Copies one box of unit blocks out of a level, applying the axis permutation
// into canonical orientation.
SubBlock gather_subblock(const LevelGrid &level, const Index3 &origin_ub, const Index3 &extent_ub,
                         const Index3 &perm);

} // namespace tac

#endif

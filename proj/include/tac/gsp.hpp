#ifndef TAC_GSP_HPP
#define TAC_GSP_HPP

#include <cstdint>
#include <vector>

#include "tac/amr.hpp"

namespace tac {

// Face directions, fixed order used everywhere pads are accumulated:
// -x, +x, -y, +y, -z, +z.
inline constexpr int kFaceDirs[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                        {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};

struct PadEntry {
  Index3 block{0, 0, 0};
  uint8_t dirs = 0; // bit i set when face neighbor kFaceDirs[i] contributed
};

// A level with its empty-but-adjacent blocks filled by ghost-shell pads.
// Non-empty blocks are bit-identical to the source; the mask stays
// authoritative for definedness.
struct PaddedGrid {
  int side = 0;
  int unit_block_size = 0;
  std::vector<double> values;
  BlockMask mask; // source occupancy
  std::vector<PadEntry> pad_map;
  int x_layers = 1;
  int y_slices = 1;
};

// Empty blocks become literal zeros; defined blocks are copied unchanged.
std::vector<double> zero_fill(const LevelGrid &level);

// For every empty block with non-empty face neighbors, writes each neighbor's
// facing-slice average into the block's adjacent x_layers cells; overlapping
// contributions are averaged (the two- and three-neighbor overlap cases halve
// and third each share). Cells out of reach of any pad get the mean of the
// block's written pads.
PaddedGrid gsp_pad(const LevelGrid &level, int x_layers = 1, int y_slices = 1);

// Strips pads back out using the recorded map; validates the map against the
// mask before touching anything.
LevelGrid gsp_unpad(const PaddedGrid &padded);

// The pad set gsp_pad would record for this mask (used to validate archives).
std::vector<PadEntry> expected_pad_map(const BlockMask &mask);

} // namespace tac

#endif

#ifndef TAC_OPST_HPP
#define TAC_OPST_HPP

#include <vector>

#include "tac/amr.hpp"
#include "tac/subblock.hpp"

namespace tac {

// Per-block maximal-cube sizes: bs(x,y,z) is the side of the largest fully
// occupied cube whose far corner (highest indices) sits at block (x,y,z).
// Dimensions of extent 1 are treated as degenerate, so a (n,m,1) mask follows
// the 2D recurrence.
struct BSGrid {
  Index3 dims{0, 0, 0};
  std::vector<int32_t> bs;
  int32_t max_side = 0;

  int32_t at(int x, int y, int z) const { return bs[linear_index(dims, x, y, z)]; }
};

BSGrid compute_bs(const BlockMask &mask);

// One extracted cube in unit-block space: far corner implied by origin+side.
struct CubeExtent {
  Index3 origin{0, 0, 0}; // lowest indices
  int side = 0;           // in unit blocks (1 along degenerate dims)
};

// Structural core of the optimized extraction: descending raster scan,
// extract the bs-sized cube at each still-occupied block, zero its region and
// partially recompute bs within the maxSide-bounded neighborhood. The cover
// is an exact disjoint partition of the non-empty blocks.
std::vector<CubeExtent> opst_cover(const BlockMask &mask);

// Naive variant: every non-empty unit block becomes its own side-1 cube, in
// ascending raster order.
std::vector<CubeExtent> nast_cover(const BlockMask &mask);

// Covers with payloads attached, grouped by cube side.
SubBlockSet opst_extract(const LevelGrid &level);
SubBlockSet nast_partition(const LevelGrid &level);

LevelGrid opst_restore(const SubBlockSet &set);

} // namespace tac

#endif

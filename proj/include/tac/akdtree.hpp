#ifndef TAC_AKDTREE_HPP
#define TAC_AKDTREE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "tac/amr.hpp"
#include "tac/subblock.hpp"

namespace tac {

enum class NodeShape : uint8_t { cube, flat, slim };

// Nodes live in a flat arena; children index into it (-1 for leaves).
struct AKDNode {
  Index3 origin{0, 0, 0};
  Index3 dims{0, 0, 0}; // in unit blocks
  int64_t count = 0;    // non-empty unit blocks inside the extent
  NodeShape shape = NodeShape::cube;
  Axis split_axis = Axis::x; // meaningful only for non-leaves
  int32_t left = -1;
  int32_t right = -1;

  bool is_leaf() const { return left < 0; }
  int64_t volume() const { return cell_count(dims); }
  bool full() const { return count == volume(); }
  bool empty() const { return count == 0; }
};

struct AKDTree {
  std::vector<AKDNode> nodes; // nodes[0] is the root
  Index3 mask_dims{0, 0, 0};  // original (possibly non-padded) dims

  const AKDNode &root() const { return nodes[0]; }
};

// Octant counts are indexed by ox + 2*oy + 4*oz (the paper's c1..c8 minus 1),
// so the lower x/y/z halves carry the even/low indices.
using OctantCounts = std::array<int64_t, 8>;
using QuadCounts = std::array<int64_t, 4>; // iu + 2*iv over the flat's long axes
using PairCounts = std::array<int64_t, 2>;

// Split-axis choice for each node shape: the axis whose two halves differ
// most in occupied-block count wins, ties fall to the lowest axis.
Axis choose_split_cube(const OctantCounts &counts);
// long_axes must be in increasing axis order.
Axis choose_split_flat(const QuadCounts &counts, const std::array<Axis, 2> &long_axes);
Axis choose_split_slim(const Index3 &dims);

// Builds the tree for a mask whose dims are equal powers of two. Splitting
// stops at empty-or-full nodes; occupancy is counted once per cube node and
// reused by the flat and slim descendants.
AKDTree build_akdtree(const BlockMask &mask);

struct BoxExtent {
  Index3 origin{0, 0, 0};
  Index3 dims{0, 0, 0}; // source orientation, in unit blocks
};

// Full leaves in depth-first order. Pads non-conforming masks with empty
// blocks to the next power of two first; padding never reaches a full leaf.
std::vector<BoxExtent> akd_cover(const BlockMask &mask);

// Leaves with payloads, canonically oriented (dims sorted descending) with
// the axis permutation recorded per block.
SubBlockSet collect_leaves(const AKDTree &tree, const LevelGrid &level);
SubBlockSet akd_extract(const LevelGrid &level);

LevelGrid akd_restore(const SubBlockSet &set);

} // namespace tac

#endif

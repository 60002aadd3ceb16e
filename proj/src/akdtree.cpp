#include "tac/akdtree.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace tac {

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

int next_pow2(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

NodeShape shape_of(const Index3 &dims) {
  Index3 s = dims;
  std::sort(s.begin(), s.end(), std::greater<int>());
  if (s[0] == s[1] && s[1] == s[2]) return NodeShape::cube;
  if (s[0] == s[1] && s[0] == 2 * s[2]) return NodeShape::flat;
  if (s[0] == 2 * s[1] && s[1] == s[2]) return NodeShape::slim;
  fail(ErrorCode::internal, "node dims outside the cube/flat/slim cycle");
}

struct FlatInfo {
  QuadCounts quads;                // iu + 2*iv
  std::array<Axis, 2> long_axes{}; // increasing axis order
};

struct SlimInfo {
  PairCounts pair; // halves along `along`
  Axis along = Axis::x;
};

struct Builder {
  const BlockMask &mask;
  std::vector<AKDNode> nodes;

  OctantCounts octant_counts(const Index3 &origin, const Index3 &dims) const {
    OctantCounts c{};
    const Index3 half{dims[0] / 2, dims[1] / 2, dims[2] / 2};
    for (int z = 0; z < dims[2]; ++z)
      for (int y = 0; y < dims[1]; ++y)
        for (int x = 0; x < dims[0]; ++x)
          if (mask.get(origin[0] + x, origin[1] + y, origin[2] + z))
            c[(x >= half[0] ? 1 : 0) + (y >= half[1] ? 2 : 0) + (z >= half[2] ? 4 : 0)]++;
    return c;
  }

  static std::pair<Index3, Index3> halves(const Index3 &origin, const Index3 &dims, Axis axis,
                                          int which) {
    Index3 o = origin, d = dims;
    const int a = static_cast<int>(axis);
    d[a] /= 2;
    if (which == 1) o[a] += d[a];
    return {o, d};
  }

  int32_t add_node(const Index3 &origin, const Index3 &dims, int64_t count) {
    AKDNode n;
    n.origin = origin;
    n.dims = dims;
    n.count = count;
    n.shape = shape_of(dims);
    nodes.push_back(n);
    return static_cast<int32_t>(nodes.size() - 1);
  }

  int32_t build_cube(const Index3 &origin, const Index3 &dims, int64_t count) {
    const int32_t idx = add_node(origin, dims, count);
    if (count == 0 || count == cell_count(dims)) return idx;
    const OctantCounts c = octant_counts(origin, dims);
    const Axis axis = choose_split_cube(c);
    const int a = static_cast<int>(axis);
    std::array<Axis, 2> long_axes{};
    int li = 0;
    for (int ax = 0; ax < 3; ++ax)
      if (ax != a) long_axes[li++] = static_cast<Axis>(ax);

    auto quads_for = [&](int half) {
      QuadCounts q{};
      for (int iv = 0; iv < 2; ++iv)
        for (int iu = 0; iu < 2; ++iu) {
          Index3 oct{};
          oct[a] = half;
          oct[static_cast<int>(long_axes[0])] = iu;
          oct[static_cast<int>(long_axes[1])] = iv;
          q[iu + 2 * iv] = c[oct[0] + 2 * oct[1] + 4 * oct[2]];
        }
      return q;
    };

    int64_t lo_count = 0;
    {
      const QuadCounts q = quads_for(0);
      for (int64_t v : q) lo_count += v;
    }
    auto [lo_o, lo_d] = halves(origin, dims, axis, 0);
    auto [hi_o, hi_d] = halves(origin, dims, axis, 1);
    nodes[idx].split_axis = axis;
    const int32_t left = build_flat(lo_o, lo_d, lo_count, {quads_for(0), long_axes});
    const int32_t right = build_flat(hi_o, hi_d, count - lo_count, {quads_for(1), long_axes});
    nodes[idx].left = left;
    nodes[idx].right = right;
    return idx;
  }

  int32_t build_flat(const Index3 &origin, const Index3 &dims, int64_t count,
                     const FlatInfo &info) {
    const int32_t idx = add_node(origin, dims, count);
    if (count == 0 || count == cell_count(dims)) return idx;
    const Axis axis = choose_split_flat(info.quads, info.long_axes);
    const bool along_u = axis == info.long_axes[0];
    const Axis slim_axis = along_u ? info.long_axes[1] : info.long_axes[0];

    auto pair_for = [&](int half) {
      PairCounts p{};
      for (int i = 0; i < 2; ++i)
        p[i] = along_u ? info.quads[half + 2 * i] : info.quads[i + 2 * half];
      return p;
    };

    auto [lo_o, lo_d] = halves(origin, dims, axis, 0);
    auto [hi_o, hi_d] = halves(origin, dims, axis, 1);
    const PairCounts lo_p = pair_for(0), hi_p = pair_for(1);
    nodes[idx].split_axis = axis;
    const int32_t left = build_slim(lo_o, lo_d, lo_p[0] + lo_p[1], {lo_p, slim_axis});
    const int32_t right = build_slim(hi_o, hi_d, hi_p[0] + hi_p[1], {hi_p, slim_axis});
    nodes[idx].left = left;
    nodes[idx].right = right;
    return idx;
  }

  int32_t build_slim(const Index3 &origin, const Index3 &dims, int64_t count,
                     const SlimInfo &info) {
    const int32_t idx = add_node(origin, dims, count);
    if (count == 0 || count == cell_count(dims)) return idx;
    const Axis axis = choose_split_slim(dims);
    if (axis != info.along) fail(ErrorCode::internal, "slim split axis disagrees with counts");
    auto [lo_o, lo_d] = halves(origin, dims, axis, 0);
    auto [hi_o, hi_d] = halves(origin, dims, axis, 1);
    nodes[idx].split_axis = axis;
    const int32_t left = build_cube(lo_o, lo_d, info.pair[0]);
    const int32_t right = build_cube(hi_o, hi_d, info.pair[1]);
    nodes[idx].left = left;
    nodes[idx].right = right;
    return idx;
  }
};

} // namespace

Axis choose_split_cube(const OctantCounts &c) {
  // Counts are indexed ox + 2*oy + 4*oz; each diff compares the two halves
  // along one axis.
  const int64_t diff_x = std::abs((c[0] + c[2] + c[4] + c[6]) - (c[1] + c[3] + c[5] + c[7]));
  const int64_t diff_y = std::abs((c[0] + c[1] + c[4] + c[5]) - (c[2] + c[3] + c[6] + c[7]));
  const int64_t diff_z = std::abs((c[0] + c[1] + c[2] + c[3]) - (c[4] + c[5] + c[6] + c[7]));
  if (diff_x >= diff_y && diff_x >= diff_z) return Axis::x;
  if (diff_y >= diff_z) return Axis::y;
  return Axis::z;
}

Axis choose_split_flat(const QuadCounts &q, const std::array<Axis, 2> &long_axes) {
  if (static_cast<int>(long_axes[0]) >= static_cast<int>(long_axes[1]))
    fail(ErrorCode::invalid_argument, "flat long axes must be in increasing order");
  const int64_t diff_u = std::abs((q[0] + q[2]) - (q[1] + q[3]));
  const int64_t diff_v = std::abs((q[0] + q[1]) - (q[2] + q[3]));
  return diff_u >= diff_v ? long_axes[0] : long_axes[1];
}

Axis choose_split_slim(const Index3 &dims) {
  int best = 0;
  for (int a = 1; a < 3; ++a)
    if (dims[a] > dims[best]) best = a;
  return static_cast<Axis>(best);
}

AKDTree build_akdtree(const BlockMask &mask) {
  if (mask.dims[0] != mask.dims[1] || mask.dims[1] != mask.dims[2] || !is_pow2(mask.dims[0]))
    fail(ErrorCode::invalid_argument, "mask dims must be equal powers of two");
  Builder b{mask, {}};
  b.nodes.reserve(64);
  b.build_cube({0, 0, 0}, mask.dims, mask.popcount());
  AKDTree tree;
  tree.nodes = std::move(b.nodes);
  tree.mask_dims = mask.dims;
  return tree;
}

namespace {

BlockMask pad_to_pow2_cube(const BlockMask &mask) {
  const int side = next_pow2(std::max({mask.dims[0], mask.dims[1], mask.dims[2], 1}));
  if (Index3{side, side, side} == mask.dims) return mask;
  BlockMask padded(side, side, side);
  for (int z = 0; z < mask.dims[2]; ++z)
    for (int y = 0; y < mask.dims[1]; ++y)
      for (int x = 0; x < mask.dims[0]; ++x)
        if (mask.get(x, y, z)) padded.set(x, y, z, true);
  return padded;
}

template <typename Fn> void walk_full_leaves(const AKDTree &tree, Fn &&fn) {
  // Explicit stack, preorder with the lower child first.
  std::vector<int32_t> stack{0};
  while (!stack.empty()) {
    const int32_t idx = stack.back();
    stack.pop_back();
    const AKDNode &n = tree.nodes[idx];
    if (n.is_leaf()) {
      if (n.full() && n.count > 0) fn(n);
      continue;
    }
    stack.push_back(n.right);
    stack.push_back(n.left);
  }
}

// Payload axes sorted by extent descending, ties by axis order, so every
// orientation of one box shape lands in the same group.
Index3 canonical_perm(const Index3 &dims) {
  Index3 perm{0, 1, 2};
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return dims[a] > dims[b]; });
  return perm;
}

} // namespace

std::vector<BoxExtent> akd_cover(const BlockMask &mask) {
  if (mask.total() == 0) return {};
  const BlockMask padded = pad_to_pow2_cube(mask);
  const AKDTree tree = build_akdtree(padded);
  std::vector<BoxExtent> cover;
  walk_full_leaves(tree, [&](const AKDNode &n) { cover.push_back({n.origin, n.dims}); });
  return cover;
}

SubBlockSet collect_leaves(const AKDTree &tree, const LevelGrid &level) {
  SubBlockSet set;
  const int b = level.blocks_per_dim();
  set.source_dims_ub = {b, b, b};
  set.unit_block_size = level.unit_block_size;

  std::map<Index3, size_t> group_index;
  walk_full_leaves(tree, [&](const AKDNode &n) {
    for (int a = 0; a < 3; ++a)
      if (n.origin[a] + n.dims[a] > b)
        fail(ErrorCode::structure, "tree leaf outside the level extent");
    const Index3 perm = canonical_perm(n.dims);
    const Index3 canon{n.dims[perm[0]], n.dims[perm[1]], n.dims[perm[2]]};
    auto [it, inserted] = group_index.try_emplace(canon, set.groups.size());
    if (inserted) set.groups.push_back(BlockGroup{canon, {}});
    set.groups[it->second].blocks.push_back(gather_subblock(level, n.origin, n.dims, perm));
  });
  return set;
}

SubBlockSet akd_extract(const LevelGrid &level) {
  const BlockMask padded = pad_to_pow2_cube(level.occupancy);
  const AKDTree tree = build_akdtree(padded);
  return collect_leaves(tree, level);
}

LevelGrid akd_restore(const SubBlockSet &set) { return restore_from_subblocks(set); }

} // namespace tac

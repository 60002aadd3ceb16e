#include "tac/subblock.hpp"

#include <algorithm>
#include <string>

namespace tac {

int64_t SubBlockSet::covered_unit_blocks() const {
  int64_t n = 0;
  for (const auto &g : groups) n += cell_count(g.dims_ub) * static_cast<int64_t>(g.blocks.size());
  return n;
}

int64_t SubBlockSet::total_values() const {
  const int64_t u3 = static_cast<int64_t>(unit_block_size) * unit_block_size * unit_block_size;
  return covered_unit_blocks() * u3;
}

namespace {

bool valid_perm(const Index3 &perm) {
  int seen = 0;
  for (int a : perm) {
    if (a < 0 || a > 2) return false;
    seen |= 1 << a;
  }
  return seen == 7;
}

} // namespace

SubBlock gather_subblock(const LevelGrid &level, const Index3 &origin_ub, const Index3 &extent_ub,
                         const Index3 &perm) {
  const int u = level.unit_block_size;
  SubBlock sb;
  sb.origin = origin_ub;
  sb.perm = perm;
  Index3 canon_cells{extent_ub[perm[0]] * u, extent_ub[perm[1]] * u, extent_ub[perm[2]] * u};
  sb.values.resize(cell_count(canon_cells));
  const Index3 src_base{origin_ub[0] * u, origin_ub[1] * u, origin_ub[2] * u};
  for (int c2 = 0; c2 < canon_cells[2]; ++c2)
    for (int c1 = 0; c1 < canon_cells[1]; ++c1)
      for (int c0 = 0; c0 < canon_cells[0]; ++c0) {
        Index3 local{};
        local[perm[0]] = c0;
        local[perm[1]] = c1;
        local[perm[2]] = c2;
        sb.values[linear_index(canon_cells, c0, c1, c2)] =
            level.at(src_base[0] + local[0], src_base[1] + local[1], src_base[2] + local[2]);
      }
  return sb;
}

LevelGrid restore_from_subblocks(const SubBlockSet &set) {
  const int u = set.unit_block_size;
  const Index3 bd = set.source_dims_ub;
  if (u <= 0 || bd[0] <= 0 || bd[0] != bd[1] || bd[1] != bd[2])
    fail(ErrorCode::structure, "sub-block set has invalid source geometry");
  LevelGrid level(bd[0] * u, u);

  for (const auto &group : set.groups) {
    const Index3 gd = group.dims_ub;
    if (gd[0] <= 0 || gd[1] <= 0 || gd[2] <= 0)
      fail(ErrorCode::structure, "sub-block group has non-positive dims");
    const Index3 canon_cells{gd[0] * u, gd[1] * u, gd[2] * u};
    for (const auto &sb : group.blocks) {
      if (!valid_perm(sb.perm)) fail(ErrorCode::structure, "corrupted axis permutation tag");
      if (static_cast<int64_t>(sb.values.size()) != cell_count(canon_cells))
        fail(ErrorCode::structure, "sub-block payload size does not match group dims");
      Index3 src_ext{}; // extent in source orientation
      for (int a = 0; a < 3; ++a) src_ext[sb.perm[a]] = gd[a];
      for (int a = 0; a < 3; ++a) {
        if (sb.origin[a] < 0 || sb.origin[a] + src_ext[a] > bd[a])
          fail(ErrorCode::structure, "sub-block out of range at origin (" +
                                         std::to_string(sb.origin[0]) + "," +
                                         std::to_string(sb.origin[1]) + "," +
                                         std::to_string(sb.origin[2]) + ")");
      }
      for (int bz = 0; bz < src_ext[2]; ++bz)
        for (int by = 0; by < src_ext[1]; ++by)
          for (int bx = 0; bx < src_ext[0]; ++bx) {
            const int gx = sb.origin[0] + bx, gy = sb.origin[1] + by, gz = sb.origin[2] + bz;
            if (level.occupancy.get(gx, gy, gz))
              fail(ErrorCode::structure, "overlapping sub-blocks at unit block (" +
                                             std::to_string(gx) + "," + std::to_string(gy) + "," +
                                             std::to_string(gz) + ")");
            level.occupancy.set(gx, gy, gz, true);
          }
      const Index3 src_base{sb.origin[0] * u, sb.origin[1] * u, sb.origin[2] * u};
      for (int z = 0; z < src_ext[2] * u; ++z)
        for (int y = 0; y < src_ext[1] * u; ++y)
          for (int x = 0; x < src_ext[0] * u; ++x) {
            const Index3 local{x, y, z};
            level.at(src_base[0] + x, src_base[1] + y, src_base[2] + z) =
                sb.values[linear_index(canon_cells, local[sb.perm[0]], local[sb.perm[1]],
                                       local[sb.perm[2]])];
          }
    }
  }
  return level;
}

} // namespace tac

#include "tac/opst.hpp"

#include <algorithm>
#include <map>

namespace tac {

namespace {

// Dimensions of extent 1 take no part in the backward-min recurrence; this is
// what makes flat (n,m,1) masks behave like the 2D formulation.
struct DpContext {
  Index3 dims;
  std::array<bool, 3> active; // extent > 1

  explicit DpContext(const Index3 &d) : dims(d) {
    for (int a = 0; a < 3; ++a) active[a] = dims[a] > 1;
  }

  bool on_boundary(int x, int y, int z) const {
    return (active[0] && x == 0) || (active[1] && y == 0) || (active[2] && z == 0);
  }
};

int32_t recurrence(const BSGrid &grid, const DpContext &ctx, const BlockMask &mask, int x, int y,
                   int z) {
  if (!mask.get(x, y, z)) return 0;
  if (ctx.on_boundary(x, y, z)) return 1;
  int32_t m = INT32_MAX;
  for (int dz = 0; dz <= (ctx.active[2] ? 1 : 0); ++dz)
    for (int dy = 0; dy <= (ctx.active[1] ? 1 : 0); ++dy)
      for (int dx = 0; dx <= (ctx.active[0] ? 1 : 0); ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        m = std::min(m, grid.at(x - dx, y - dy, z - dz));
      }
  return m + 1;
}

} // namespace

BSGrid compute_bs(const BlockMask &mask) {
  if (mask.dims[0] < 1 || mask.dims[1] < 1 || mask.dims[2] < 1)
    fail(ErrorCode::invalid_argument, "degenerate mask dims");
  BSGrid grid;
  grid.dims = mask.dims;
  grid.bs.assign(mask.total(), 0);
  DpContext ctx(mask.dims);
  for (int z = 0; z < mask.dims[2]; ++z)
    for (int y = 0; y < mask.dims[1]; ++y)
      for (int x = 0; x < mask.dims[0]; ++x) {
        int32_t v = recurrence(grid, ctx, mask, x, y, z);
        grid.bs[linear_index(grid.dims, x, y, z)] = v;
        grid.max_side = std::max(grid.max_side, v);
      }
  return grid;
}

std::vector<CubeExtent> nast_cover(const BlockMask &mask) {
  std::vector<CubeExtent> cover;
  for (int z = 0; z < mask.dims[2]; ++z)
    for (int y = 0; y < mask.dims[1]; ++y)
      for (int x = 0; x < mask.dims[0]; ++x)
        if (mask.get(x, y, z)) cover.push_back({{x, y, z}, 1});
  return cover;
}

std::vector<CubeExtent> opst_cover(const BlockMask &mask) {
  BSGrid grid = compute_bs(mask);
  const int32_t max_side = grid.max_side;
  const Index3 d = grid.dims;
  DpContext ctx(d);
  BlockMask work = mask;
  std::vector<CubeExtent> cover;

  // Span of the extracted cube along each axis (1 where degenerate).
  auto axis_span = [&](int side, int a) { return ctx.active[a] ? side : 1; };

  for (int z = d[2] - 1; z >= 0; --z)
    for (int y = d[1] - 1; y >= 0; --y)
      for (int x = d[0] - 1; x >= 0; --x) {
        const int32_t s = grid.at(x, y, z);
        if (s < 1) continue;
        const Index3 span{axis_span(s, 0), axis_span(s, 1), axis_span(s, 2)};
        const Index3 lo{x - span[0] + 1, y - span[1] + 1, z - span[2] + 1};
        cover.push_back({lo, s});

        for (int k = lo[2]; k <= z; ++k)
          for (int j = lo[1]; j <= y; ++j)
            for (int i = lo[0]; i <= x; ++i) {
              work.set(i, j, k, false);
              grid.bs[linear_index(d, i, j, k)] = 0;
            }

        // Partial update: only entries whose backward cube can reach the
        // zeroed region, bounded by maxSide beyond the far corner.
        const Index3 hi{std::min(x + max_side, d[0] - 1), std::min(y + max_side, d[1] - 1),
                        std::min(z + max_side, d[2] - 1)};
        for (int k = lo[2]; k <= hi[2]; ++k)
          for (int j = lo[1]; j <= hi[1]; ++j)
            for (int i = lo[0]; i <= hi[0]; ++i)
              grid.bs[linear_index(d, i, j, k)] = recurrence(grid, ctx, work, i, j, k);
      }
  return cover;
}

namespace {

SubBlockSet cover_to_set(const LevelGrid &level, const std::vector<CubeExtent> &cover) {
  SubBlockSet set;
  const int b = level.blocks_per_dim();
  set.source_dims_ub = {b, b, b};
  set.unit_block_size = level.unit_block_size;

  std::map<int, size_t> group_of_side; // ordered so group layout is deterministic
  std::array<bool, 3> active{};
  for (int a = 0; a < 3; ++a) active[a] = b > 1;
  for (const auto &cube : cover) {
    auto [it, inserted] = group_of_side.try_emplace(cube.side, set.groups.size());
    if (inserted) {
      BlockGroup g;
      g.dims_ub = {active[0] ? cube.side : 1, active[1] ? cube.side : 1, active[2] ? cube.side : 1};
      set.groups.push_back(std::move(g));
    }
  }
  for (const auto &cube : cover) {
    BlockGroup &g = set.groups[group_of_side[cube.side]];
    g.blocks.push_back(gather_subblock(level, cube.origin, g.dims_ub, {0, 1, 2}));
  }
  return set;
}

} // namespace

SubBlockSet opst_extract(const LevelGrid &level) {
  return cover_to_set(level, opst_cover(level.occupancy));
}

SubBlockSet nast_partition(const LevelGrid &level) {
  return cover_to_set(level, nast_cover(level.occupancy));
}

LevelGrid opst_restore(const SubBlockSet &set) { return restore_from_subblocks(set); }

} // namespace tac

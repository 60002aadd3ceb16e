#include "tac/gsp.hpp"

#include <algorithm>
#include <string>

namespace tac {

std::vector<double> zero_fill(const LevelGrid &level) {
  std::vector<double> out(level.values.size(), 0.0);
  const int u = level.unit_block_size;
  const int b = level.blocks_per_dim();
  for (int bz = 0; bz < b; ++bz)
    for (int by = 0; by < b; ++by)
      for (int bx = 0; bx < b; ++bx) {
        if (!level.occupancy.get(bx, by, bz)) continue;
        for (int z = bz * u; z < (bz + 1) * u; ++z)
          for (int y = by * u; y < (by + 1) * u; ++y)
            for (int x = bx * u; x < (bx + 1) * u; ++x)
              out[linear_index(level.dims3(), x, y, z)] = level.at(x, y, z);
      }
  return out;
}

std::vector<PadEntry> expected_pad_map(const BlockMask &mask) {
  std::vector<PadEntry> map;
  for (int bz = 0; bz < mask.dims[2]; ++bz)
    for (int by = 0; by < mask.dims[1]; ++by)
      for (int bx = 0; bx < mask.dims[0]; ++bx) {
        if (mask.get(bx, by, bz)) continue;
        uint8_t dirs = 0;
        for (int d = 0; d < 6; ++d) {
          const int nx = bx + kFaceDirs[d][0];
          const int ny = by + kFaceDirs[d][1];
          const int nz = bz + kFaceDirs[d][2];
          if (nx < 0 || ny < 0 || nz < 0 || nx >= mask.dims[0] || ny >= mask.dims[1] ||
              nz >= mask.dims[2])
            continue;
          if (mask.get(nx, ny, nz)) dirs |= uint8_t(1) << d;
        }
        if (dirs) map.push_back({{bx, by, bz}, dirs});
      }
  return map;
}

namespace {

// Mean of a neighbor block's y_slices boundary planes facing direction d
// (d indexes kFaceDirs as seen from the empty block).
double facing_slice_average(const LevelGrid &level, const Index3 &nb_block, int d, int y_slices) {
  const int u = level.unit_block_size;
  const Index3 base{nb_block[0] * u, nb_block[1] * u, nb_block[2] * u};
  const int axis = d / 2;
  const bool neighbor_above = d % 2 == 1; // neighbor sits at +axis of the empty block
  double sum = 0.0;
  int64_t n = 0;
  for (int s = 0; s < y_slices; ++s) {
    // The neighbor's plane closest to the empty block, stepping inward.
    const int plane = neighbor_above ? s : u - 1 - s;
    for (int j = 0; j < u; ++j)
      for (int i = 0; i < u; ++i) {
        Index3 cell = base;
        cell[axis] += plane;
        cell[(axis + 1) % 3] += i;
        cell[(axis + 2) % 3] += j;
        sum += level.at(cell[0], cell[1], cell[2]);
        n++;
      }
  }
  return sum / static_cast<double>(n);
}

} // namespace

PaddedGrid gsp_pad(const LevelGrid &level, int x_layers, int y_slices) {
  const int u = level.unit_block_size;
  if (x_layers < 1 || x_layers > u || y_slices < 1 || y_slices > u)
    fail(ErrorCode::invalid_argument, "gsp layer counts must be within [1, unit_block_size]");

  PaddedGrid out;
  out.side = level.side;
  out.unit_block_size = u;
  out.values = zero_fill(level);
  out.mask = level.occupancy;
  out.x_layers = x_layers;
  out.y_slices = y_slices;
  out.pad_map = expected_pad_map(level.occupancy);

  const Index3 dims = level.dims3();
  std::vector<double> contrib(static_cast<size_t>(u) * u * u);
  std::vector<int> hits(contrib.size());

  for (const PadEntry &entry : out.pad_map) {
    std::fill(contrib.begin(), contrib.end(), 0.0);
    std::fill(hits.begin(), hits.end(), 0);
    const Index3 local_dims{u, u, u};

    for (int d = 0; d < 6; ++d) {
      if (!(entry.dirs & (uint8_t(1) << d))) continue;
      const Index3 nb{entry.block[0] + kFaceDirs[d][0], entry.block[1] + kFaceDirs[d][1],
                      entry.block[2] + kFaceDirs[d][2]};
      const double pad = facing_slice_average(level, nb, d, y_slices);
      const int axis = d / 2;
      const bool neighbor_above = d % 2 == 1;
      for (int layer = 0; layer < x_layers; ++layer) {
        const int plane = neighbor_above ? u - 1 - layer : layer;
        for (int j = 0; j < u; ++j)
          for (int i = 0; i < u; ++i) {
            Index3 cell{};
            cell[axis] = plane;
            cell[(axis + 1) % 3] = i;
            cell[(axis + 2) % 3] = j;
            const int64_t idx = linear_index(local_dims, cell[0], cell[1], cell[2]);
            contrib[idx] += pad;
            hits[idx] += 1;
          }
      }
    }

    // Overlapping pads are averaged (two -> halves, three -> thirds); cells
    // no pad layer reaches take the mean of the written ones.
    double written_sum = 0.0;
    int64_t written_n = 0;
    for (size_t i = 0; i < contrib.size(); ++i) {
      if (hits[i] == 0) continue;
      contrib[i] /= hits[i];
      written_sum += contrib[i];
      written_n++;
    }
    const double fill = written_n > 0 ? written_sum / static_cast<double>(written_n) : 0.0;

    const Index3 base{entry.block[0] * u, entry.block[1] * u, entry.block[2] * u};
    for (int z = 0; z < u; ++z)
      for (int y = 0; y < u; ++y)
        for (int x = 0; x < u; ++x) {
          const int64_t local = linear_index(local_dims, x, y, z);
          out.values[linear_index(dims, base[0] + x, base[1] + y, base[2] + z)] =
              hits[local] > 0 ? contrib[local] : fill;
        }
  }
  return out;
}

LevelGrid gsp_unpad(const PaddedGrid &padded) {
  if (padded.side <= 0 || padded.unit_block_size <= 0 || padded.side % padded.unit_block_size != 0)
    fail(ErrorCode::structure, "padded grid has invalid geometry");
  LevelGrid level(padded.side, padded.unit_block_size);
  if (padded.mask.dims != level.occupancy.dims)
    fail(ErrorCode::structure, "padded grid mask dims mismatch");
  if (static_cast<int64_t>(padded.values.size()) != cell_count(level.dims3()))
    fail(ErrorCode::structure, "padded grid value size mismatch");

  const std::vector<PadEntry> expected = expected_pad_map(padded.mask);
  if (padded.pad_map.size() != expected.size())
    fail(ErrorCode::structure, "pad map does not match mask");
  for (size_t i = 0; i < expected.size(); ++i) {
    const PadEntry &got = padded.pad_map[i];
    if (padded.mask.get(got.block[0], got.block[1], got.block[2]))
      fail(ErrorCode::structure, "pad map references non-empty block (" +
                                     std::to_string(got.block[0]) + "," +
                                     std::to_string(got.block[1]) + "," +
                                     std::to_string(got.block[2]) + ")");
    if (got.block != expected[i].block || got.dirs != expected[i].dirs)
      fail(ErrorCode::structure, "pad map does not match mask");
  }

  level.occupancy = padded.mask;
  const int u = padded.unit_block_size;
  const int b = level.blocks_per_dim();
  for (int bz = 0; bz < b; ++bz)
    for (int by = 0; by < b; ++by)
      for (int bx = 0; bx < b; ++bx) {
        if (!level.occupancy.get(bx, by, bz)) continue;
        for (int z = bz * u; z < (bz + 1) * u; ++z)
          for (int y = by * u; y < (by + 1) * u; ++y)
            for (int x = bx * u; x < (bx + 1) * u; ++x)
              level.at(x, y, z) = padded.values[linear_index(level.dims3(), x, y, z)];
      }
  return level;
}

} // namespace tac

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>

#include "oracles.hpp"
#include "tac/opst.hpp"

using namespace tac;

namespace {

// 2D mask (4x4x1) transcribing the worked example: rows are y, columns x.
//   y0:  . X X .
//   y1:  X X X .
//   y2:  X X . .
//   y3:  . . . .
BlockMask example_mask_2d() {
  BlockMask m(4, 4, 1);
  const int cells[][2] = {{1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}, {0, 2}, {1, 2}};
  for (auto &c : cells) m.set(c[0], c[1], 0, true);
  return m;
}

void check_bs_against_oracle(const BlockMask &mask) {
  const BSGrid grid = compute_bs(mask);
  int32_t max_side = 0;
  for (int z = 0; z < mask.dims[2]; ++z)
    for (int y = 0; y < mask.dims[1]; ++y)
      for (int x = 0; x < mask.dims[0]; ++x) {
        const int want = oracle::max_cube_at(mask, x, y, z);
        REQUIRE(grid.at(x, y, z) == want);
        max_side = std::max(max_side, grid.at(x, y, z));
      }
  CHECK(grid.max_side == max_side);
}

} // namespace

TEST_CASE("nast keeps one unit block per cube") {
  LevelGrid empty(16, 8);
  CHECK(nast_partition(empty).groups.empty());

  BlockMask full(2, 2, 2, true);
  LevelGrid lvl = oracle::level_from_mask(full, 8, 1);
  const SubBlockSet set = nast_partition(lvl);
  REQUIRE(set.groups.size() == 1);
  CHECK(set.groups[0].dims_ub == Index3{1, 1, 1});
  CHECK(set.groups[0].blocks.size() == 8);

  for (uint64_t seed = 0; seed < 4; ++seed) {
    const BlockMask mask = oracle::random_mask(4, 4, 4, 0.35, seed);
    LevelGrid rnd = oracle::level_from_mask(mask, 4, seed);
    CHECK(int64_t(nast_partition(rnd).groups.empty()
                      ? 0
                      : nast_partition(rnd).groups[0].blocks.size()) == mask.popcount());
  }
}

TEST_CASE("bs matches the 2D worked example") {
  const BlockMask mask = example_mask_2d();
  const BSGrid grid = compute_bs(mask);
  // All upper-left neighbors of (1,2) hold 1, so it reaches 2.
  CHECK(grid.at(1, 2, 0) == 2);
  // (1,1) and (2,1) are capped at 1 by an empty backward neighbor.
  CHECK(grid.at(1, 1, 0) == 1);
  CHECK(grid.at(2, 1, 0) == 2); // neighbors (1,0),(1,1),(2,0) all 1
  check_bs_against_oracle(mask);
}

TEST_CASE("bs on a full cube has the analytic closed form") {
  for (int n : {2, 4, 5}) {
    BlockMask mask(n, n, n, true);
    const BSGrid grid = compute_bs(mask);
    for (int z = 0; z < n; ++z)
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
          CHECK(grid.at(x, y, z) == 1 + std::min({x, y, z}));
  }
}

TEST_CASE("bs matches the exhaustive cube oracle on random 8^3 masks") {
  for (uint64_t seed = 0; seed < 12; ++seed)
    check_bs_against_oracle(oracle::random_mask(8, 8, 8, 0.2 + 0.06 * seed, seed));
}

TEST_CASE("bs matches the oracle on every small mask") {
  // Exhaustive over all masks of a few low-volume shapes.
  const int shapes[][3] = {{2, 2, 2}, {3, 2, 2}, {4, 2, 1}, {3, 3, 1}, {4, 4, 1}, {2, 2, 3}};
  for (const auto &s : shapes) {
    const int cells = s[0] * s[1] * s[2];
    for (uint32_t bits = 0; bits < (1u << cells); ++bits) {
      BlockMask mask(s[0], s[1], s[2]);
      for (int i = 0; i < cells; ++i) mask.bits[i] = (bits >> i) & 1;
      const BSGrid grid = compute_bs(mask);
      for (int z = 0; z < s[2]; ++z)
        for (int y = 0; y < s[1]; ++y)
          for (int x = 0; x < s[0]; ++x)
            REQUIRE(grid.at(x, y, z) == oracle::max_cube_at(mask, x, y, z));
    }
  }
}

TEST_CASE("extraction follows the worked example trace") {
  const BlockMask mask = example_mask_2d();
  const auto cover = opst_cover(mask);
  REQUIRE(cover.size() == 4);
  // The 2x2 sub-block anchored at (1,2) comes out first...
  CHECK(cover[0].origin == Index3{0, 1, 0});
  CHECK(cover[0].side == 2);
  // ...and the partial update drops (2,1) back to a unit extraction.
  CHECK(cover[1].origin == Index3{2, 1, 0});
  CHECK(cover[1].side == 1);
  int64_t covered = 0;
  for (const auto &c : cover) covered += int64_t(c.side) * c.side; // 2D: z span is 1
  CHECK(covered == mask.popcount());
}

TEST_CASE("full power-of-two cube extracts as one block") {
  for (int n : {2, 4, 8}) {
    BlockMask mask(n, n, n, true);
    const auto cover = opst_cover(mask);
    REQUIRE(cover.size() == 1);
    CHECK(cover[0].origin == Index3{0, 0, 0});
    CHECK(cover[0].side == n);
  }
}

TEST_CASE("opst covers random masks exactly once") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const double density = 0.05 + 0.018 * double(seed);
    const BlockMask mask = oracle::random_mask(8, 8, 8, density, seed + 100);
    LevelGrid lvl = oracle::level_from_mask(mask, 4, seed);
    const SubBlockSet set = opst_extract(lvl);
    bool cover_ok = false, values_ok = false;
    oracle::check_exact_cover(set, lvl, cover_ok, values_ok);
    CHECK(cover_ok);
    CHECK(values_ok);
  }
}

TEST_CASE("extract then restore is the identity") {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    const BlockMask mask = oracle::clustered_mask(8, 0.1 + 0.1 * double(seed), seed);
    LevelGrid lvl = oracle::level_from_mask(mask, 4, seed);
    const LevelGrid back = opst_restore(opst_extract(lvl));
    CHECK(back.occupancy == lvl.occupancy);
    CHECK(back.values == lvl.values);
  }
}

TEST_CASE("restore of an empty set is an empty level") {
  SubBlockSet set;
  set.source_dims_ub = {4, 4, 4};
  set.unit_block_size = 4;
  const LevelGrid lvl = opst_restore(set);
  CHECK(lvl.side == 16);
  CHECK(lvl.occupancy.popcount() == 0);
  for (double v : lvl.values) CHECK(v == 0.0);
}

TEST_CASE("restore rejects overlapping and out-of-range blocks") {
  BlockMask full(2, 2, 2, true);
  LevelGrid lvl = oracle::level_from_mask(full, 4, 3);
  SubBlockSet set = opst_extract(lvl);
  REQUIRE(set.groups.size() == 1);
  REQUIRE(set.groups[0].blocks.size() == 1);
  // Duplicate the single cube: overlap.
  set.groups[0].blocks.push_back(set.groups[0].blocks[0]);
  CHECK_THROWS_WITH_AS(opst_restore(set), doctest::Contains("overlap"), Error);
  set.groups[0].blocks.pop_back();
  set.groups[0].blocks[0].origin = {1, 0, 0};
  CHECK_THROWS_WITH_AS(opst_restore(set), doctest::Contains("out of range"), Error);
}

TEST_CASE("metadata stays under half a percent for a 512^3-cell level") {
  // Coordinates are 7 bytes per sub-block (3 x u16 + perm tag); payload bytes
  // follow from the mask alone, so no values are materialized here.
  const BlockMask mask = oracle::clustered_mask(32, 0.23, 99);
  const auto cover = opst_cover(mask);
  int64_t covered = 0;
  for (const auto &c : cover) covered += int64_t(c.side) * c.side * c.side;
  REQUIRE(covered == mask.popcount());
  const int64_t metadata_bytes = static_cast<int64_t>(cover.size()) * 7;
  const int64_t payload_bytes = covered * 16 * 16 * 16 * 4; // unit 16, f32
  CHECK(double(metadata_bytes) / double(payload_bytes) <= 0.005);
}

TEST_CASE("opst time grows with density") {
  // Mask-only cover timing; medians over repeats to steady the measurement.
  const int side = 24;
  std::vector<double> times;
  for (double density : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const BlockMask mask = oracle::clustered_mask(side, density, 7);
    std::vector<double> reps;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto cover = opst_cover(mask);
      const auto t1 = std::chrono::steady_clock::now();
      if (cover.empty()) continue;
      reps.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(reps.begin(), reps.end());
    times.push_back(reps[reps.size() / 2]);
  }
  for (size_t i = 1; i < times.size(); ++i) CHECK(times[i] >= times[i - 1]);
}

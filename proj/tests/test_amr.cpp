#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tac/amr.hpp"
#include "tac/datagen.hpp"

using namespace tac;
namespace fs = std::filesystem;

namespace {

// Two-level dataset with an arbitrary (but valid) partition: fine blocks are
// tagged in aligned 2x2x2 groups so the coarse level can own the complement.
AMRDataset make_two_level(int fine_side, int unit, double fine_density, uint64_t seed) {
  AMRDataset ds;
  ds.refinement_factor = 2;
  ds.domain_side = fine_side;
  ds.value_type = ValueType::f64;
  LevelGrid fine(fine_side, unit);
  LevelGrid coarse(fine_side / 2, unit);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution refine(fine_density);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  const int cb = coarse.blocks_per_dim();
  for (int z = 0; z < cb; ++z)
    for (int y = 0; y < cb; ++y)
      for (int x = 0; x < cb; ++x) {
        if (refine(rng)) {
          for (int dz = 0; dz < 2; ++dz)
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx)
                fine.occupancy.set(2 * x + dx, 2 * y + dy, 2 * z + dz, true);
        } else {
          coarse.occupancy.set(x, y, z, true);
        }
      }
  for (int z = 0; z < fine.side; ++z)
    for (int y = 0; y < fine.side; ++y)
      for (int x = 0; x < fine.side; ++x)
        if (fine.occupancy.get(x / unit, y / unit, z / unit)) fine.at(x, y, z) = val(rng);
  for (int z = 0; z < coarse.side; ++z)
    for (int y = 0; y < coarse.side; ++y)
      for (int x = 0; x < coarse.side; ++x)
        if (coarse.occupancy.get(x / unit, y / unit, z / unit)) coarse.at(x, y, z) = val(rng);
  ds.levels.push_back(std::move(fine));
  ds.levels.push_back(std::move(coarse));
  return ds;
}

} // namespace

TEST_CASE("level_density on trivial masks") {
  LevelGrid empty(32, 16);
  CHECK(level_density(empty) == 0.0);
  LevelGrid full(32, 16);
  full.occupancy.bits.assign(full.occupancy.bits.size(), 1);
  CHECK(level_density(full) == 1.0);
}

TEST_CASE("level_density equals popcount fraction on random masks") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    LevelGrid lvl(32, 8);
    lvl.occupancy = oracle::random_mask(4, 4, 4, 0.4, seed);
    int64_t pop = 0;
    for (auto b : lvl.occupancy.bits) pop += b;
    CHECK(level_density(lvl) == doctest::Approx(double(pop) / 64.0).epsilon(1e-12));
  }
}

TEST_CASE("density of a 23%-target synthetic fine level") {
  GenSpec spec;
  spec.seed = 11;
  spec.finest_side = 128;
  spec.num_levels = 2;
  spec.unit_block_size = 8;
  spec.target_finest_density = 0.23;
  GenReport report;
  AMRDataset ds = generate_dataset(spec, &report);
  CHECK(level_density(ds.levels[0]) == doctest::Approx(0.23).epsilon(0.0217)); // +-0.005 abs
  CHECK(std::abs(level_density(ds.levels[0]) - 0.23) <= 0.005);
}

TEST_CASE("upsample replicates cells") {
  LevelGrid one(1, 1);
  one.occupancy.bits = {1};
  one.values = {3.5};
  const auto up = upsample_level(one, 2);
  REQUIRE(up.size() == 8);
  for (double v : up) CHECK(v == 3.5);

  LevelGrid same(4, 2);
  same.occupancy.bits.assign(8, 1);
  for (size_t i = 0; i < same.values.size(); ++i) same.values[i] = double(i);
  CHECK(upsample_level(same, 1) == same.values);
}

TEST_CASE("upsample matches index-arithmetic oracle") {
  LevelGrid lvl(2, 1);
  lvl.occupancy.bits.assign(8, 1);
  for (int i = 0; i < 8; ++i) lvl.values[i] = 10.0 + i;
  const int f = 2;
  const auto up = upsample_level(lvl, f);
  REQUIRE(up.size() == 64);
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) {
        const double want = lvl.at(x / f, y / f, z / f);
        CHECK(up[(size_t(z) * 4 + y) * 4 + x] == want);
      }
}

TEST_CASE("upsample output size limit") {
  LevelGrid lvl(64, 16);
  lvl.occupancy.bits.assign(lvl.occupancy.bits.size(), 1);
  CHECK_THROWS_AS(upsample_level(lvl, 1 << 12), Error);
  CHECK_THROWS_AS(upsample_level(lvl, 0), Error);
}

TEST_CASE("merge single level is identity") {
  LevelGrid lvl(16, 8);
  lvl.occupancy.bits.assign(8, 1);
  for (size_t i = 0; i < lvl.values.size(); ++i) lvl.values[i] = std::sin(0.01 * i);
  AMRDataset ds;
  ds.levels.push_back(lvl);
  ds.domain_side = 16;
  CHECK(merge_to_uniform(ds) == lvl.values);
}

TEST_CASE("merge with empty fine level equals coarse upsample") {
  AMRDataset ds;
  ds.domain_side = 32;
  LevelGrid fine(32, 8);
  LevelGrid coarse(16, 8);
  coarse.occupancy.bits.assign(8, 1);
  for (size_t i = 0; i < coarse.values.size(); ++i) coarse.values[i] = 0.25 * double(i % 97);
  ds.levels.push_back(fine);
  ds.levels.push_back(coarse);
  CHECK(merge_to_uniform(ds) == upsample_level(coarse, 2));
}

TEST_CASE("merge matches per-cell ownership oracle on random datasets") {
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    AMRDataset ds = make_two_level(32, 8, 0.5, seed);
    const auto merged = merge_to_uniform(ds);
    const int side = ds.domain_side;
    for (int z = 0; z < side; ++z)
      for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
          double want;
          if (ds.levels[0].occupancy.get(x / 8, y / 8, z / 8))
            want = ds.levels[0].at(x, y, z);
          else
            want = ds.levels[1].at(x / 2, y / 2, z / 2);
          CHECK(merged[(size_t(z) * side + y) * side + x] == want);
        }
  }
}

TEST_CASE("merge rejects holes and overlaps naming a cell") {
  AMRDataset ds = make_two_level(32, 8, 0.5, 7);
  // Overlap: claim a coarse block that is already refined.
  AMRDataset overlap = ds;
  bool made_overlap = false;
  for (size_t i = 0; i < overlap.levels[1].occupancy.bits.size() && !made_overlap; ++i)
    if (!overlap.levels[1].occupancy.bits[i]) {
      overlap.levels[1].occupancy.bits[i] = 1;
      made_overlap = true;
    }
  REQUIRE(made_overlap);
  CHECK_THROWS_WITH_AS(merge_to_uniform(overlap),
                       doctest::Contains("partition overlap at cell"), Error);

  AMRDataset hole = ds;
  bool made_hole = false;
  for (size_t i = 0; i < hole.levels[1].occupancy.bits.size() && !made_hole; ++i)
    if (hole.levels[1].occupancy.bits[i]) {
      hole.levels[1].occupancy.bits[i] = 0;
      made_hole = true;
    }
  REQUIRE(made_hole);
  CHECK_THROWS_WITH_AS(merge_to_uniform(hole), doctest::Contains("partition hole at cell"),
                       Error);
}

TEST_CASE("partition invariant checked exhaustively on synthetic datasets") {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.finest_side = 64;
    spec.num_levels = seed % 2 == 0 ? 2 : 3;
    spec.unit_block_size = 8;
    spec.target_finest_density = 0.3;
    AMRDataset ds = generate_dataset(spec);
    CHECK_NOTHROW(ds.validate());
    // Projected densities sum to one.
    double total = 0.0;
    for (int i = 0; i < ds.num_levels(); ++i) total += level_density(ds.levels[i]);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("dataset save/load round trip is bit identical") {
  for (ValueType vt : {ValueType::f32, ValueType::f64}) {
    GenSpec spec;
    spec.seed = 3;
    spec.finest_side = 32;
    spec.num_levels = 2;
    spec.unit_block_size = 8;
    spec.target_finest_density = 0.4;
    spec.value_type = vt;
    AMRDataset ds = generate_dataset(spec);
    const fs::path dir = fs::temp_directory_path() / ("tac_amr_io_" + std::to_string(int(vt)));
    fs::remove_all(dir);
    save_dataset(ds, (dir / "dataset.txt").string());
    AMRDataset back = load_dataset((dir / "dataset.txt").string());
    CHECK(back == ds);
    AMRDataset from_dir = load_dataset(dir.string());
    CHECK(from_dir == ds);
    fs::remove_all(dir);
  }
}

TEST_CASE("load rejects a non-dividing unit_block_size") {
  GenSpec spec;
  spec.seed = 5;
  spec.finest_side = 32;
  spec.num_levels = 1;
  spec.unit_block_size = 8;
  spec.target_finest_density = 1.0;
  AMRDataset ds = generate_dataset(spec);
  const fs::path dir = fs::temp_directory_path() / "tac_amr_bad_unit";
  fs::remove_all(dir);
  save_dataset(ds, (dir / "dataset.txt").string());
  // Corrupt the descriptor.
  std::ifstream in(dir / "dataset.txt");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const auto pos = text.find("unit_block_size=8");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 17, "unit_block_size=7");
  std::ofstream out(dir / "dataset.txt");
  out << text;
  out.close();
  CHECK_THROWS_AS(load_dataset((dir / "dataset.txt").string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("load rejects truncated payloads") {
  GenSpec spec;
  spec.seed = 6;
  spec.finest_side = 32;
  spec.num_levels = 1;
  spec.unit_block_size = 8;
  spec.target_finest_density = 1.0;
  AMRDataset ds = generate_dataset(spec);
  const fs::path dir = fs::temp_directory_path() / "tac_amr_trunc";
  fs::remove_all(dir);
  save_dataset(ds, (dir / "dataset.txt").string());
  fs::resize_file(dir / "level0.bin", fs::file_size(dir / "level0.bin") / 2);
  CHECK_THROWS_AS(load_dataset((dir / "dataset.txt").string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("load of a generated 3-level dataset matches the generator report") {
  GenSpec spec;
  spec.seed = 21;
  spec.finest_side = 128;
  spec.num_levels = 3;
  spec.unit_block_size = 8;
  spec.target_finest_density = 0.05;
  GenReport report;
  AMRDataset ds = generate_dataset(spec, &report);
  const fs::path dir = fs::temp_directory_path() / "tac_amr_run2";
  fs::remove_all(dir);
  save_dataset(ds, (dir / "dataset.txt").string());
  AMRDataset back = load_dataset((dir / "dataset.txt").string());
  REQUIRE(back.num_levels() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK(level_density(back.levels[i]) == doctest::Approx(report.level_densities[i]));
  fs::remove_all(dir);
}

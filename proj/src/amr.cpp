#include "tac/amr.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "tac/bytes.hpp"

namespace fs = std::filesystem;

namespace tac {

int64_t BlockMask::popcount() const {
  int64_t n = 0;
  for (uint8_t b : bits) n += b ? 1 : 0;
  return n;
}

LevelGrid::LevelGrid(int side_, int unit_block_size_) : side(side_), unit_block_size(unit_block_size_) {
  if (side <= 0 || unit_block_size <= 0 || side % unit_block_size != 0)
    fail(ErrorCode::invalid_argument, "unit_block_size must divide level side");
  values.assign(static_cast<size_t>(side) * side * side, 0.0);
  int b = blocks_per_dim();
  occupancy = BlockMask(b, b, b);
}

int64_t LevelGrid::defined_cells() const {
  const int64_t per_block = static_cast<int64_t>(unit_block_size) * unit_block_size * unit_block_size;
  return occupancy.popcount() * per_block;
}

void LevelGrid::validate() const {
  if (side <= 0 || unit_block_size <= 0 || side % unit_block_size != 0)
    fail(ErrorCode::structure, "unit_block_size does not divide side");
  int b = blocks_per_dim();
  if (occupancy.dims != Index3{b, b, b})
    fail(ErrorCode::structure, "occupancy dims do not match level geometry");
  if (static_cast<int64_t>(values.size()) != cell_count(dims3()))
    fail(ErrorCode::structure, "value array size does not match side^3");
  const int u = unit_block_size;
  for (int bz = 0; bz < b; ++bz)
    for (int by = 0; by < b; ++by)
      for (int bx = 0; bx < b; ++bx) {
        if (occupancy.get(bx, by, bz)) continue;
        for (int z = bz * u; z < (bz + 1) * u; ++z)
          for (int y = by * u; y < (by + 1) * u; ++y)
            for (int x = bx * u; x < (bx + 1) * u; ++x)
              if (at(x, y, z) != 0.0)
                fail(ErrorCode::structure, "empty block holds non-sentinel value");
      }
}

int AMRDataset::cumulative_factor(int level) const {
  int f = 1;
  for (int i = 0; i < level; ++i) f *= refinement_factor;
  return f;
}

int64_t AMRDataset::defined_values() const {
  int64_t n = 0;
  for (const auto &lvl : levels) n += lvl.defined_cells();
  return n;
}

void AMRDataset::validate() const {
  if (levels.empty()) fail(ErrorCode::structure, "dataset has no levels");
  if (refinement_factor < 1) fail(ErrorCode::structure, "refinement_factor must be >= 1");
  if (domain_side != levels[0].side) fail(ErrorCode::structure, "domain_side != finest level side");
  for (int i = 1; i < num_levels(); ++i) {
    if (levels[i].side * refinement_factor != levels[i - 1].side)
      fail(ErrorCode::structure, "level side ratio does not match refinement_factor");
    if (levels[i].unit_block_size != levels[0].unit_block_size)
      fail(ErrorCode::structure, "levels disagree on unit_block_size");
  }
  for (const auto &lvl : levels) lvl.validate();
  merge_to_uniform(*this); // exercises the partition invariant
}

double level_density(const LevelGrid &level) { return level.occupancy.density(); }

std::vector<double> upsample_level(const LevelGrid &level, int factor) {
  if (factor < 1) fail(ErrorCode::invalid_argument, "upsample factor must be >= 1");
  const int64_t out_side = static_cast<int64_t>(level.side) * factor;
  if (out_side > kMaxUpsampleSide)
    fail(ErrorCode::invalid_argument, "upsampled side exceeds maximum of " +
                                          std::to_string(kMaxUpsampleSide));
  const int n = level.side;
  const int s = static_cast<int>(out_side);
  std::vector<double> out(static_cast<size_t>(s) * s * s);
  for (int z = 0; z < s; ++z)
    for (int y = 0; y < s; ++y) {
      const double *src_row = &level.values[(static_cast<size_t>(z / factor) * n + y / factor) * n];
      double *dst_row = &out[(static_cast<size_t>(z) * s + y) * s];
      for (int x = 0; x < s; ++x) dst_row[x] = src_row[x / factor];
    }
  return out;
}

std::vector<double> merge_to_uniform(const AMRDataset &dataset) {
  if (dataset.levels.empty()) fail(ErrorCode::structure, "dataset has no levels");
  const int side = dataset.levels[0].side;
  const int u = dataset.levels[0].unit_block_size;
  const int L = dataset.num_levels();

  std::vector<int> factors(L);
  for (int i = 0; i < L; ++i) factors[i] = dataset.cumulative_factor(i);

  std::vector<double> out(static_cast<size_t>(side) * side * side);
  for (int z = 0; z < side; ++z)
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) {
        int owner = -1;
        for (int i = 0; i < L; ++i) {
          const int f = factors[i];
          const int span = u * f; // finest cells covered by one level-i block
          const auto &mask = dataset.levels[i].occupancy;
          if (mask.get(x / span, y / span, z / span)) {
            if (owner >= 0)
              fail(ErrorCode::structure, "partition overlap at cell (" + std::to_string(x) + "," +
                                             std::to_string(y) + "," + std::to_string(z) + ")");
            owner = i;
          }
        }
        if (owner < 0)
          fail(ErrorCode::structure, "partition hole at cell (" + std::to_string(x) + "," +
                                         std::to_string(y) + "," + std::to_string(z) + ")");
        const int f = factors[owner];
        out[(static_cast<size_t>(z) * side + y) * side + x] =
            dataset.levels[owner].at(x / f, y / f, z / f);
      }
  return out;
}

namespace {

std::string descriptor_file(const std::string &path) {
  if (fs::is_directory(path)) return (fs::path(path) / "dataset.txt").string();
  return path;
}

void write_values_file(const std::string &path, const std::vector<double> &values, ValueType t) {
  ByteWriter w;
  if (t == ValueType::f32)
    for (double v : values) w.f32(static_cast<float>(v));
  else
    for (double v : values) w.f64(v);
  write_file_atomic(path, w.bytes());
}

std::vector<double> read_values_file(const std::string &path, int64_t count, ValueType t) {
  std::vector<uint8_t> bytes = read_file(path);
  const size_t want = static_cast<size_t>(count) * value_type_bytes(t);
  if (bytes.size() != want)
    fail(ErrorCode::format, "value file " + path + " has " + std::to_string(bytes.size()) +
                                " bytes, expected " + std::to_string(want));
  ByteReader r(bytes.data(), bytes.size());
  std::vector<double> values(count);
  if (t == ValueType::f32)
    for (auto &v : values) v = r.f32();
  else
    for (auto &v : values) v = r.f64();
  return values;
}

} // namespace

void save_dataset(const AMRDataset &dataset, const std::string &descriptor_path) {
  dataset.validate();
  const fs::path desc = descriptor_file(descriptor_path);
  const fs::path dir = desc.parent_path().empty() ? fs::path(".") : desc.parent_path();
  fs::create_directories(dir);

  std::ostringstream text;
  text << "levels=" << dataset.num_levels() << "\n";
  text << "finest_side=" << dataset.domain_side << "\n";
  text << "unit_block_size=" << dataset.unit_block_size() << "\n";
  text << "refinement_factor=" << dataset.refinement_factor << "\n";
  text << "value_type=" << (dataset.value_type == ValueType::f32 ? "f32" : "f64") << "\n";
  for (int i = 0; i < dataset.num_levels(); ++i) {
    const std::string vname = "level" + std::to_string(i) + ".bin";
    const std::string mname = "level" + std::to_string(i) + ".mask";
    text << "level" << i << ".values=" << vname << "\n";
    text << "level" << i << ".mask=" << mname << "\n";
    write_values_file((dir / vname).string(), dataset.levels[i].values, dataset.value_type);
    write_file_atomic((dir / mname).string(), dataset.levels[i].occupancy.bits);
  }
  const std::string body = text.str();
  write_file_atomic(desc.string(), std::vector<uint8_t>(body.begin(), body.end()));
}

AMRDataset load_dataset(const std::string &descriptor_path) {
  const fs::path desc = descriptor_file(descriptor_path);
  std::ifstream in(desc);
  if (!in) fail(ErrorCode::io, "cannot open descriptor: " + desc.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::format, "malformed descriptor line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string &key) -> const std::string & {
    auto it = kv.find(key);
    if (it == kv.end()) fail(ErrorCode::format, "descriptor missing key: " + key);
    return it->second;
  };
  auto get_int = [&](const std::string &key) {
    try {
      return std::stoi(get(key));
    } catch (const std::exception &) {
      fail(ErrorCode::format, "descriptor key not an integer: " + key);
    }
  };

  AMRDataset ds;
  const int levels = get_int("levels");
  if (levels <= 0) fail(ErrorCode::format, "descriptor declares no levels");
  ds.domain_side = get_int("finest_side");
  const int unit = get_int("unit_block_size");
  ds.refinement_factor = get_int("refinement_factor");
  const std::string vt = get("value_type");
  if (vt == "f32")
    ds.value_type = ValueType::f32;
  else if (vt == "f64")
    ds.value_type = ValueType::f64;
  else
    fail(ErrorCode::format, "unknown value_type: " + vt);

  const fs::path dir = desc.parent_path().empty() ? fs::path(".") : desc.parent_path();
  int side = ds.domain_side;
  for (int i = 0; i < levels; ++i) {
    if (side <= 0 || unit <= 0 || side % unit != 0)
      fail(ErrorCode::format, "unit_block_size does not divide level " + std::to_string(i) +
                                  " side " + std::to_string(side));
    LevelGrid lvl(side, unit);
    lvl.values = read_values_file((dir / get("level" + std::to_string(i) + ".values")).string(),
                                  cell_count(lvl.dims3()), ds.value_type);
    std::vector<uint8_t> mask_bytes =
        read_file((dir / get("level" + std::to_string(i) + ".mask")).string());
    if (static_cast<int64_t>(mask_bytes.size()) != lvl.occupancy.total())
      fail(ErrorCode::format, "mask file size mismatch for level " + std::to_string(i));
    for (uint8_t b : mask_bytes)
      if (b > 1) fail(ErrorCode::format, "mask byte not 0/1 in level " + std::to_string(i));
    lvl.occupancy.bits = std::move(mask_bytes);
    ds.levels.push_back(std::move(lvl));
    if (i + 1 < levels) {
      if (side % ds.refinement_factor != 0)
        fail(ErrorCode::format, "level side not divisible by refinement_factor");
      side /= ds.refinement_factor;
    }
  }
  ds.validate();
  return ds;
}

} // namespace tac

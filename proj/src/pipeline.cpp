#include "tac/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>

#include "tac/akdtree.hpp"
#include "tac/bytes.hpp"
#include "tac/gsp.hpp"
#include "tac/opst.hpp"

namespace tac {

namespace {

constexpr char kMagic[4] = {'T', 'A', 'C', '1'};
constexpr uint8_t kVersion = 1;

class StageTimer {
public:
  explicit StageTimer(double *sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    if (sink_)
      *sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  double *sink_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<uint8_t> pack_mask(const BlockMask &mask) {
  std::vector<uint8_t> out((mask.bits.size() + 7) / 8, 0);
  for (size_t i = 0; i < mask.bits.size(); ++i)
    if (mask.bits[i]) out[i / 8] |= uint8_t(1) << (i % 8);
  return out;
}

BlockMask unpack_mask(ByteReader &r, const Index3 &dims) {
  BlockMask mask(dims[0], dims[1], dims[2]);
  std::vector<uint8_t> packed((mask.bits.size() + 7) / 8);
  r.raw(packed.data(), packed.size());
  for (size_t i = 0; i < mask.bits.size(); ++i)
    mask.bits[i] = (packed[i / 8] >> (i % 8)) & 1;
  return mask;
}

uint8_t encode_perm(const Index3 &perm) {
  return static_cast<uint8_t>(perm[0] * 9 + perm[1] * 3 + perm[2]);
}

Index3 decode_perm(uint8_t code) {
  return Index3{code / 9, (code / 3) % 3, code % 3};
}

} // namespace

const char *strategy_name(StrategyTag tag) {
  switch (tag) {
    case StrategyTag::OpST: return "opst";
    case StrategyTag::AKDTree: return "akdtree";
    case StrategyTag::GSP: return "gsp";
    case StrategyTag::ZeroFill: return "zf";
    case StrategyTag::NaST: return "nast";
    case StrategyTag::Baseline1D: return "1d";
    case StrategyTag::Baseline3D: return "3d";
  }
  return "?";
}

std::optional<StrategyTag> strategy_from_name(const std::string &name) {
  for (StrategyTag t : {StrategyTag::OpST, StrategyTag::AKDTree, StrategyTag::GSP,
                        StrategyTag::ZeroFill, StrategyTag::NaST, StrategyTag::Baseline1D,
                        StrategyTag::Baseline3D})
    if (name == strategy_name(t)) return t;
  return std::nullopt;
}

void CompressionConfig::validate() const {
  if (!(t1 > 0.0) || !(t1 <= t2) || !(t2 < 1.0))
    fail(ErrorCode::invalid_argument, "thresholds must satisfy 0 < t1 <= t2 < 1");
  if (!(finest_density_fallback > 0.0) || finest_density_fallback > 1.0)
    fail(ErrorCode::invalid_argument, "fallback density must be in (0, 1]");
  if (codec == CodecKind::lorenzo && !(base_bound.magnitude > 0.0))
    fail(ErrorCode::invalid_argument, "error bound must be positive");
  if (base_bound.magnitude < 0.0) fail(ErrorCode::invalid_argument, "error bound must be >= 0");
  for (double r : level_bound_ratios)
    if (!(r > 0.0)) fail(ErrorCode::invalid_argument, "level bound ratios must be positive");
  if (gsp_x_layers < 1 || gsp_y_slices < 1)
    fail(ErrorCode::invalid_argument, "gsp layer counts must be >= 1");
}

StrategyTag select_strategy(double density, const CompressionConfig &config) {
  if (density < 0.0 || density > 1.0)
    fail(ErrorCode::invalid_argument, "density must be within [0, 1]");
  if (density < config.t1) return StrategyTag::OpST;
  if (density <= config.t2) return StrategyTag::AKDTree;
  return StrategyTag::GSP;
}

namespace {

// Range of the level's defined values (empty blocks excluded).
std::pair<double, double> defined_range(const LevelGrid &level) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const int u = level.unit_block_size;
  const int b = level.blocks_per_dim();
  for (int bz = 0; bz < b; ++bz)
    for (int by = 0; by < b; ++by)
      for (int bx = 0; bx < b; ++bx) {
        if (!level.occupancy.get(bx, by, bz)) continue;
        for (int z = bz * u; z < (bz + 1) * u; ++z)
          for (int y = by * u; y < (by + 1) * u; ++y)
            for (int x = bx * u; x < (bx + 1) * u; ++x) {
              const double v = level.at(x, y, z);
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
      }
  if (!(hi > lo)) return {0.0, 0.0};
  return {lo, hi};
}

double resolve_for_level(const ErrorBound &base, const LevelGrid &level) {
  if (base.mode == ErrorBoundMode::absolute) return base.magnitude;
  auto [lo, hi] = defined_range(level);
  return base.magnitude * (hi - lo);
}

} // namespace

std::vector<double> derive_level_bounds(const ErrorBound &base, const AMRDataset &dataset,
                                        const CompressionConfig &config) {
  const int L = dataset.num_levels();
  if (!config.level_bound_ratios.empty() &&
      static_cast<int>(config.level_bound_ratios.size()) != L)
    fail(ErrorCode::invalid_argument, "level_bound_ratios length must equal the level count");
  std::vector<double> bounds(L);
  for (int i = 0; i < L; ++i) {
    double b = resolve_for_level(base, dataset.levels[i]);
    if (!config.level_bound_ratios.empty())
      b *= config.level_bound_ratios[i] / config.level_bound_ratios[0];
    bounds[i] = b;
  }
  return bounds;
}

namespace {

struct LevelRecord {
  StrategyTag tag;
  double bound = 0.0;
  std::vector<uint8_t> metadata;
  std::vector<EncodedBlock> payloads;
};

EncodedBlock encode_values(std::span<const double> values, std::span<const int64_t> dims,
                           double resolved_bound, ValueType vt, CodecKind codec, double *enc_time) {
  StageTimer t(enc_time);
  return encode(values, dims, ErrorBound{ErrorBoundMode::absolute, resolved_bound}, vt, codec);
}

LevelRecord build_subblock_record(const LevelGrid &level, StrategyTag tag, double bound,
                                  ValueType vt, CodecKind codec, CompressStats *stats) {
  LevelRecord rec{tag, bound, {}, {}};
  SubBlockSet set;
  {
    StageTimer t(stats ? &stats->preprocess_seconds : nullptr);
    switch (tag) {
      case StrategyTag::OpST: set = opst_extract(level); break;
      case StrategyTag::NaST: set = nast_partition(level); break;
      case StrategyTag::AKDTree: set = akd_extract(level); break;
      default: fail(ErrorCode::internal, "not a sub-block strategy");
    }
  }

  ByteWriter meta;
  meta.u16(static_cast<uint16_t>(set.source_dims_ub[0]));
  meta.u16(static_cast<uint16_t>(set.source_dims_ub[1]));
  meta.u16(static_cast<uint16_t>(set.source_dims_ub[2]));
  meta.u32(static_cast<uint32_t>(set.groups.size()));
  const int u = level.unit_block_size;
  for (const auto &group : set.groups) {
    meta.u16(static_cast<uint16_t>(group.dims_ub[0]));
    meta.u16(static_cast<uint16_t>(group.dims_ub[1]));
    meta.u16(static_cast<uint16_t>(group.dims_ub[2]));
    meta.u32(static_cast<uint32_t>(group.blocks.size()));
    for (const auto &sb : group.blocks) {
      meta.u16(static_cast<uint16_t>(sb.origin[0]));
      meta.u16(static_cast<uint16_t>(sb.origin[1]));
      meta.u16(static_cast<uint16_t>(sb.origin[2]));
      meta.u8(encode_perm(sb.perm));
    }

    const int64_t cells = cell_count(group.dims_ub) * u * u * u;
    std::vector<double> concat;
    concat.reserve(cells * group.blocks.size());
    for (const auto &sb : group.blocks) concat.insert(concat.end(), sb.values.begin(), sb.values.end());
    const std::array<int64_t, 4> dims{group.dims_ub[0] * u, group.dims_ub[1] * u,
                                      group.dims_ub[2] * u,
                                      static_cast<int64_t>(group.blocks.size())};
    rec.payloads.push_back(encode_values(concat, dims, bound, vt, codec,
                                         stats ? &stats->encode_seconds : nullptr));
  }
  rec.metadata = meta.take();
  return rec;
}

LevelRecord build_gsp_record(const LevelGrid &level, double bound, ValueType vt, CodecKind codec,
                             int x_layers, int y_slices, CompressStats *stats) {
  LevelRecord rec{StrategyTag::GSP, bound, {}, {}};
  PaddedGrid padded;
  {
    StageTimer t(stats ? &stats->preprocess_seconds : nullptr);
    padded = gsp_pad(level, x_layers, y_slices);
  }
  ByteWriter meta;
  const std::vector<uint8_t> mask_bits = pack_mask(padded.mask);
  meta.raw(mask_bits.data(), mask_bits.size());
  meta.u16(static_cast<uint16_t>(padded.x_layers));
  meta.u16(static_cast<uint16_t>(padded.y_slices));
  meta.u32(static_cast<uint32_t>(padded.pad_map.size()));
  for (const PadEntry &e : padded.pad_map) {
    meta.u16(static_cast<uint16_t>(e.block[0]));
    meta.u16(static_cast<uint16_t>(e.block[1]));
    meta.u16(static_cast<uint16_t>(e.block[2]));
    meta.u8(e.dirs);
  }
  rec.metadata = meta.take();
  const std::array<int64_t, 3> dims{level.side, level.side, level.side};
  rec.payloads.push_back(encode_values(padded.values, dims, bound, vt, codec,
                                       stats ? &stats->encode_seconds : nullptr));
  return rec;
}

LevelRecord build_zf_record(const LevelGrid &level, double bound, ValueType vt, CodecKind codec,
                            CompressStats *stats) {
  LevelRecord rec{StrategyTag::ZeroFill, bound, {}, {}};
  std::vector<double> filled;
  {
    StageTimer t(stats ? &stats->preprocess_seconds : nullptr);
    filled = zero_fill(level);
  }
  ByteWriter meta;
  const std::vector<uint8_t> mask_bits = pack_mask(level.occupancy);
  meta.raw(mask_bits.data(), mask_bits.size());
  rec.metadata = meta.take();
  const std::array<int64_t, 3> dims{level.side, level.side, level.side};
  rec.payloads.push_back(encode_values(filled, dims, bound, vt, codec,
                                       stats ? &stats->encode_seconds : nullptr));
  return rec;
}

LevelRecord build_1d_record(const LevelGrid &level, double bound, ValueType vt, CodecKind codec,
                            CompressStats *stats) {
  LevelRecord rec{StrategyTag::Baseline1D, bound, {}, {}};
  std::vector<double> line;
  {
    StageTimer t(stats ? &stats->preprocess_seconds : nullptr);
    line.reserve(level.defined_cells());
    const int u = level.unit_block_size;
    for (int z = 0; z < level.side; ++z)
      for (int y = 0; y < level.side; ++y)
        for (int x = 0; x < level.side; ++x)
          if (level.occupancy.get(x / u, y / u, z / u)) line.push_back(level.at(x, y, z));
  }
  ByteWriter meta;
  const std::vector<uint8_t> mask_bits = pack_mask(level.occupancy);
  meta.raw(mask_bits.data(), mask_bits.size());
  rec.metadata = meta.take();
  if (!line.empty()) {
    const std::array<int64_t, 1> dims{static_cast<int64_t>(line.size())};
    rec.payloads.push_back(encode_values(line, dims, bound, vt, codec,
                                         stats ? &stats->encode_seconds : nullptr));
  }
  return rec;
}

LevelRecord build_3d_record(const AMRDataset &dataset, const ErrorBound &base, CodecKind codec,
                            CompressStats *stats) {
  std::vector<double> merged;
  {
    StageTimer t(stats ? &stats->preprocess_seconds : nullptr);
    merged = merge_to_uniform(dataset);
  }
  const double bound =
      codec == CodecKind::lorenzo ? base.resolve(merged) : 0.0;
  LevelRecord rec{StrategyTag::Baseline3D, bound, {}, {}};
  ByteWriter meta;
  for (const auto &lvl : dataset.levels) {
    const std::vector<uint8_t> mask_bits = pack_mask(lvl.occupancy);
    meta.raw(mask_bits.data(), mask_bits.size());
  }
  rec.metadata = meta.take();
  const int s = dataset.domain_side;
  const std::array<int64_t, 3> dims{s, s, s};
  rec.payloads.push_back(encode_values(merged, dims, bound, dataset.value_type, codec,
                                       stats ? &stats->encode_seconds : nullptr));
  return rec;
}

std::string header_text(const AMRDataset &dataset, const CompressionConfig &config) {
  std::ostringstream h;
  h.precision(17);
  h << "levels=" << dataset.num_levels() << "\n";
  h << "finest_side=" << dataset.domain_side << "\n";
  h << "unit_block_size=" << dataset.unit_block_size() << "\n";
  h << "refinement_factor=" << dataset.refinement_factor << "\n";
  h << "value_type=" << (dataset.value_type == ValueType::f32 ? "f32" : "f64") << "\n";
  h << "t1=" << config.t1 << "\n";
  h << "t2=" << config.t2 << "\n";
  h << "fallback_density=" << config.finest_density_fallback << "\n";
  h << "eb_mode=" << (config.base_bound.mode == ErrorBoundMode::absolute ? "abs" : "rel") << "\n";
  h << "eb=" << config.base_bound.magnitude << "\n";
  if (!config.level_bound_ratios.empty()) {
    h << "level_ratios=";
    for (size_t i = 0; i < config.level_bound_ratios.size(); ++i)
      h << (i ? ":" : "") << config.level_bound_ratios[i];
    h << "\n";
  }
  h << "codec=" << (config.codec == CodecKind::lorenzo ? "lorenzo" : "lossless-ref") << "\n";
  h << "strategy=" << (config.strategy.automatic ? "auto" : strategy_name(config.strategy.forced))
    << "\n";
  h << "gsp_x=" << config.gsp_x_layers << "\n";
  h << "gsp_y=" << config.gsp_y_slices << "\n";
  return h.str();
}

void append_record(ByteWriter &out, const LevelRecord &rec) {
  ByteWriter w;
  w.u8(static_cast<uint8_t>(rec.tag));
  w.f64(rec.bound);
  w.u32(static_cast<uint32_t>(rec.metadata.size()));
  w.raw(rec.metadata.data(), rec.metadata.size());
  w.u32(static_cast<uint32_t>(rec.payloads.size()));
  for (const auto &p : rec.payloads) {
    w.u32(static_cast<uint32_t>(p.bytes.size()));
    w.raw(p.bytes.data(), p.bytes.size());
  }
  const uint32_t crc = crc32(w.bytes().data(), w.size());
  out.raw(w.bytes().data(), w.size());
  out.u32(crc);
}

} // namespace

std::vector<uint8_t> compress_dataset(const AMRDataset &dataset, const CompressionConfig &config,
                                      CompressStats *stats) {
  config.validate();
  if (dataset.levels.empty()) fail(ErrorCode::invalid_argument, "dataset has no levels");

  std::vector<LevelRecord> records;
  const bool force_3d = !config.strategy.automatic &&
                        config.strategy.forced == StrategyTag::Baseline3D;
  const bool auto_3d = config.strategy.automatic &&
                       level_density(dataset.levels[0]) >= config.finest_density_fallback;
  if (force_3d || auto_3d) {
    records.push_back(build_3d_record(dataset, config.base_bound, config.codec, stats));
  } else {
    const std::vector<double> bounds =
        derive_level_bounds(config.base_bound, dataset, config);
    for (int i = 0; i < dataset.num_levels(); ++i) {
      const LevelGrid &lvl = dataset.levels[i];
      StrategyTag tag = config.strategy.automatic
                            ? select_strategy(level_density(lvl), config)
                            : config.strategy.forced;
      const ValueType vt = dataset.value_type;
      switch (tag) {
        case StrategyTag::OpST:
        case StrategyTag::NaST:
        case StrategyTag::AKDTree:
          records.push_back(build_subblock_record(lvl, tag, bounds[i], vt, config.codec, stats));
          break;
        case StrategyTag::GSP:
          records.push_back(build_gsp_record(lvl, bounds[i], vt, config.codec,
                                             config.gsp_x_layers, config.gsp_y_slices, stats));
          break;
        case StrategyTag::ZeroFill:
          records.push_back(build_zf_record(lvl, bounds[i], vt, config.codec, stats));
          break;
        case StrategyTag::Baseline1D:
          records.push_back(build_1d_record(lvl, bounds[i], vt, config.codec, stats));
          break;
        case StrategyTag::Baseline3D:
          fail(ErrorCode::internal, "unreachable");
      }
    }
  }

  ByteWriter out;
  out.raw(kMagic, 4);
  out.u8(kVersion);
  const std::string header = header_text(dataset, config);
  out.u32(static_cast<uint32_t>(header.size()));
  out.raw(header.data(), header.size());
  out.u32(static_cast<uint32_t>(records.size()));
  for (const auto &rec : records) append_record(out, rec);
  out.u32(crc32(out.bytes().data(), out.size()));
  return out.take();
}

std::vector<uint8_t> compress_baseline_1d(const AMRDataset &dataset, const ErrorBound &bound,
                                          CodecKind codec, CompressStats *stats) {
  CompressionConfig config;
  config.base_bound = bound;
  config.codec = codec;
  config.strategy = StrategySelector::force(StrategyTag::Baseline1D);
  return compress_dataset(dataset, config, stats);
}

namespace {

struct ParsedArchive {
  std::map<std::string, std::string> header;
  struct Record {
    StrategyTag tag;
    double bound;
    std::vector<uint8_t> metadata;
    std::vector<std::vector<uint8_t>> payloads;
  };
  std::vector<Record> records;
};

ParsedArchive parse_archive(const std::vector<uint8_t> &archive) {
  if (archive.size() < 13) fail(ErrorCode::format, "archive too small");
  const uint32_t file_crc = crc32(archive.data(), archive.size() - 4);
  {
    ByteReader tail(archive.data() + archive.size() - 4, 4);
    if (tail.u32() != file_crc) fail(ErrorCode::checksum, "archive checksum mismatch");
  }

  ByteReader r(archive.data(), archive.size() - 4);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) fail(ErrorCode::format, "bad archive magic");
  if (r.u8() != kVersion) fail(ErrorCode::format, "unsupported archive version");

  ParsedArchive parsed;
  const uint32_t header_len = r.u32();
  std::string header(header_len, '\0');
  r.raw(header.data(), header_len);
  std::istringstream hs(header);
  std::string line;
  while (std::getline(hs, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    parsed.header[line.substr(0, eq)] = line.substr(eq + 1);
  }

  const uint32_t record_count = r.u32();
  for (uint32_t i = 0; i < record_count; ++i) {
    const size_t rec_start = r.pos();
    ParsedArchive::Record rec;
    const uint8_t tag = r.u8();
    if (tag > static_cast<uint8_t>(StrategyTag::Baseline3D))
      fail(ErrorCode::format, "unknown strategy tag");
    rec.tag = static_cast<StrategyTag>(tag);
    rec.bound = r.f64();
    const uint32_t meta_len = r.u32();
    rec.metadata.resize(meta_len);
    r.raw(rec.metadata.data(), meta_len);
    const uint32_t payload_count = r.u32();
    for (uint32_t p = 0; p < payload_count; ++p) {
      const uint32_t len = r.u32();
      std::vector<uint8_t> bytes(len);
      r.raw(bytes.data(), len);
      rec.payloads.push_back(std::move(bytes));
    }
    const size_t rec_end = r.pos();
    const uint32_t want = crc32(archive.data() + rec_start, rec_end - rec_start);
    if (r.u32() != want) fail(ErrorCode::checksum, "record checksum mismatch");
    parsed.records.push_back(std::move(rec));
  }
  if (r.remaining() != 0) fail(ErrorCode::format, "trailing bytes in archive");
  return parsed;
}

int header_int(const ParsedArchive &a, const std::string &key) {
  auto it = a.header.find(key);
  if (it == a.header.end()) fail(ErrorCode::format, "archive header missing " + key);
  try {
    return std::stoi(it->second);
  } catch (const std::exception &) {
    fail(ErrorCode::format, "archive header key not an integer: " + key);
  }
}

std::vector<double> decode_payload(const std::vector<uint8_t> &bytes, BlockHeader *h,
                                   CompressStats *stats) {
  StageTimer t(stats ? &stats->decode_seconds : nullptr);
  EncodedBlock block;
  block.bytes = bytes;
  return decode(block, h);
}

LevelGrid rebuild_subblock_level(const ParsedArchive::Record &rec, int side, int unit,
                                 CompressStats *stats) {
  ByteReader meta(rec.metadata.data(), rec.metadata.size());
  SubBlockSet set;
  set.unit_block_size = unit;
  set.source_dims_ub = {meta.u16(), meta.u16(), meta.u16()};
  if (set.source_dims_ub[0] * unit != side)
    fail(ErrorCode::format, "sub-block metadata disagrees with level geometry");
  const uint32_t group_count = meta.u32();
  if (group_count != rec.payloads.size())
    fail(ErrorCode::format, "group count does not match payload count");
  for (uint32_t g = 0; g < group_count; ++g) {
    BlockGroup group;
    group.dims_ub = {meta.u16(), meta.u16(), meta.u16()};
    const uint32_t block_count = meta.u32();
    group.blocks.resize(block_count);
    for (auto &sb : group.blocks) {
      sb.origin = {meta.u16(), meta.u16(), meta.u16()};
      sb.perm = decode_perm(meta.u8());
    }
    BlockHeader h;
    std::vector<double> values = decode_payload(rec.payloads[g], &h, stats);
    const int64_t cells = cell_count(group.dims_ub) * unit * unit * unit;
    if (h.rank != 4 || h.dims[0] != group.dims_ub[0] * unit ||
        h.dims[1] != group.dims_ub[1] * unit || h.dims[2] != group.dims_ub[2] * unit ||
        h.dims[3] != block_count)
      fail(ErrorCode::format, "payload dims disagree with group metadata");
    for (uint32_t b = 0; b < block_count; ++b)
      group.blocks[b].values.assign(values.begin() + b * cells, values.begin() + (b + 1) * cells);
    set.groups.push_back(std::move(group));
  }
  if (meta.remaining() != 0) fail(ErrorCode::format, "trailing sub-block metadata");
  return restore_from_subblocks(set);
}

LevelGrid rebuild_gsp_level(const ParsedArchive::Record &rec, int side, int unit,
                            CompressStats *stats) {
  const int b = side / unit;
  ByteReader meta(rec.metadata.data(), rec.metadata.size());
  PaddedGrid padded;
  padded.side = side;
  padded.unit_block_size = unit;
  padded.mask = unpack_mask(meta, {b, b, b});
  padded.x_layers = meta.u16();
  padded.y_slices = meta.u16();
  const uint32_t pad_count = meta.u32();
  padded.pad_map.resize(pad_count);
  for (auto &e : padded.pad_map) {
    e.block = {meta.u16(), meta.u16(), meta.u16()};
    e.dirs = meta.u8();
  }
  if (meta.remaining() != 0) fail(ErrorCode::format, "trailing gsp metadata");
  if (rec.payloads.size() != 1) fail(ErrorCode::format, "gsp record expects one payload");
  BlockHeader h;
  padded.values = decode_payload(rec.payloads[0], &h, stats);
  if (h.rank != 3 || h.dims[0] != side || h.dims[1] != side || h.dims[2] != side)
    fail(ErrorCode::format, "gsp payload dims mismatch");
  return gsp_unpad(padded);
}

LevelGrid rebuild_zf_level(const ParsedArchive::Record &rec, int side, int unit,
                           CompressStats *stats) {
  const int b = side / unit;
  ByteReader meta(rec.metadata.data(), rec.metadata.size());
  BlockMask mask = unpack_mask(meta, {b, b, b});
  if (meta.remaining() != 0) fail(ErrorCode::format, "trailing zf metadata");
  if (rec.payloads.size() != 1) fail(ErrorCode::format, "zf record expects one payload");
  BlockHeader h;
  std::vector<double> values = decode_payload(rec.payloads[0], &h, stats);
  if (h.rank != 3 || h.dims[0] != side || h.dims[1] != side || h.dims[2] != side)
    fail(ErrorCode::format, "zf payload dims mismatch");
  LevelGrid level(side, unit);
  level.occupancy = mask;
  for (int bz = 0; bz < b; ++bz)
    for (int by = 0; by < b; ++by)
      for (int bx = 0; bx < b; ++bx) {
        if (!mask.get(bx, by, bz)) continue;
        for (int z = bz * unit; z < (bz + 1) * unit; ++z)
          for (int y = by * unit; y < (by + 1) * unit; ++y)
            for (int x = bx * unit; x < (bx + 1) * unit; ++x)
              level.at(x, y, z) = values[linear_index(level.dims3(), x, y, z)];
      }
  return level;
}

LevelGrid rebuild_1d_level(const ParsedArchive::Record &rec, int side, int unit,
                           CompressStats *stats) {
  const int b = side / unit;
  ByteReader meta(rec.metadata.data(), rec.metadata.size());
  BlockMask mask = unpack_mask(meta, {b, b, b});
  if (meta.remaining() != 0) fail(ErrorCode::format, "trailing 1d metadata");
  LevelGrid level(side, unit);
  level.occupancy = mask;
  const int64_t defined = level.defined_cells();
  if (defined == 0) {
    if (!rec.payloads.empty()) fail(ErrorCode::format, "empty level with payload");
    return level;
  }
  if (rec.payloads.size() != 1) fail(ErrorCode::format, "1d record expects one payload");
  BlockHeader h;
  std::vector<double> values = decode_payload(rec.payloads[0], &h, stats);
  if (h.rank != 1 || h.dims[0] != defined)
    fail(ErrorCode::format, "1d payload length disagrees with mask");
  int64_t i = 0;
  for (int z = 0; z < side; ++z)
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x)
        if (mask.get(x / unit, y / unit, z / unit)) level.at(x, y, z) = values[i++];
  return level;
}

} // namespace

AMRDataset decompress_dataset(const std::vector<uint8_t> &archive, CompressStats *stats) {
  const ParsedArchive parsed = parse_archive(archive);
  AMRDataset ds;
  const int L = header_int(parsed, "levels");
  ds.domain_side = header_int(parsed, "finest_side");
  const int unit = header_int(parsed, "unit_block_size");
  ds.refinement_factor = header_int(parsed, "refinement_factor");
  auto vt_it = parsed.header.find("value_type");
  if (vt_it == parsed.header.end()) fail(ErrorCode::format, "archive header missing value_type");
  ds.value_type = vt_it->second == "f64" ? ValueType::f64 : ValueType::f32;
  if (L <= 0 || ds.domain_side <= 0 || unit <= 0)
    fail(ErrorCode::format, "invalid archive geometry");

  if (parsed.records.size() == 1 && parsed.records[0].tag == StrategyTag::Baseline3D) {
    const auto &rec = parsed.records[0];
    const int S = ds.domain_side;
    ByteReader meta(rec.metadata.data(), rec.metadata.size());
    std::vector<BlockMask> masks;
    int side = S;
    for (int i = 0; i < L; ++i) {
      const int b = side / unit;
      masks.push_back(unpack_mask(meta, {b, b, b}));
      side /= ds.refinement_factor;
    }
    if (meta.remaining() != 0) fail(ErrorCode::format, "trailing 3d metadata");
    if (rec.payloads.size() != 1) fail(ErrorCode::format, "3d record expects one payload");
    BlockHeader h;
    std::vector<double> merged = decode_payload(rec.payloads[0], &h, stats);
    if (h.rank != 3 || h.dims[0] != S || h.dims[1] != S || h.dims[2] != S)
      fail(ErrorCode::format, "3d payload dims mismatch");

    side = S;
    for (int i = 0; i < L; ++i) {
      LevelGrid level(side, unit);
      level.occupancy = masks[i];
      const int f = ds.cumulative_factor(i);
      const int b = level.blocks_per_dim();
      for (int bz = 0; bz < b; ++bz)
        for (int by = 0; by < b; ++by)
          for (int bx = 0; bx < b; ++bx) {
            if (!level.occupancy.get(bx, by, bz)) continue;
            for (int z = bz * unit; z < (bz + 1) * unit; ++z)
              for (int y = by * unit; y < (by + 1) * unit; ++y)
                for (int x = bx * unit; x < (bx + 1) * unit; ++x)
                  // First cell of the up-sampled footprint.
                  level.at(x, y, z) = merged[(static_cast<size_t>(z) * f * S + y * f) * S + x * f];
          }
      ds.levels.push_back(std::move(level));
      side /= ds.refinement_factor;
    }
    return ds;
  }

  if (static_cast<int>(parsed.records.size()) != L)
    fail(ErrorCode::format, "record count does not match level count");
  int side = ds.domain_side;
  for (int i = 0; i < L; ++i) {
    const auto &rec = parsed.records[i];
    LevelGrid level;
    switch (rec.tag) {
      case StrategyTag::OpST:
      case StrategyTag::NaST:
      case StrategyTag::AKDTree:
        level = rebuild_subblock_level(rec, side, unit, stats);
        break;
      case StrategyTag::GSP:
        level = rebuild_gsp_level(rec, side, unit, stats);
        break;
      case StrategyTag::ZeroFill:
        level = rebuild_zf_level(rec, side, unit, stats);
        break;
      case StrategyTag::Baseline1D:
        level = rebuild_1d_level(rec, side, unit, stats);
        break;
      case StrategyTag::Baseline3D:
        fail(ErrorCode::format, "3d record must be the only record");
    }
    ds.levels.push_back(std::move(level));
    side /= ds.refinement_factor;
  }
  return ds;
}

ArchiveInfo inspect_archive(const std::vector<uint8_t> &archive) {
  const ParsedArchive parsed = parse_archive(archive);
  ArchiveInfo info;
  info.num_levels = header_int(parsed, "levels");
  info.finest_side = header_int(parsed, "finest_side");
  info.unit_block_size = header_int(parsed, "unit_block_size");
  info.refinement_factor = header_int(parsed, "refinement_factor");
  auto vt = parsed.header.find("value_type");
  info.value_type = (vt != parsed.header.end() && vt->second == "f64") ? ValueType::f64
                                                                       : ValueType::f32;
  info.total_bytes = static_cast<int64_t>(archive.size());
  for (const auto &rec : parsed.records) {
    LevelRecordInfo r;
    r.tag = rec.tag;
    r.bound = rec.bound;
    r.metadata_bytes = static_cast<int64_t>(rec.metadata.size());
    for (const auto &p : rec.payloads) r.payload_bytes += static_cast<int64_t>(p.size());
    info.records.push_back(r);
  }
  return info;
}

void write_archive(const std::string &path, const std::vector<uint8_t> &archive) {
  write_file_atomic(path, archive);
}

std::vector<uint8_t> read_archive(const std::string &path) { return read_file(path); }

} // namespace tac

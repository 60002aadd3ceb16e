#ifndef TAC_PIPELINE_HPP
#define TAC_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tac/amr.hpp"
#include "tac/codec.hpp"

namespace tac {

enum class StrategyTag : uint8_t {
  OpST = 0,
  AKDTree = 1,
  GSP = 2,
  ZeroFill = 3,
  NaST = 4,
  Baseline1D = 5,
  Baseline3D = 6,
};

const char *strategy_name(StrategyTag tag);
std::optional<StrategyTag> strategy_from_name(const std::string &name);

// Strategy choice requested by the caller: the density policy, or one
// strategy forced onto every level (Baseline3D applies dataset-wide).
struct StrategySelector {
  bool automatic = true;
  StrategyTag forced = StrategyTag::OpST;

  static StrategySelector auto_policy() { return {}; }
  static StrategySelector force(StrategyTag tag) { return {false, tag}; }
};

struct CompressionConfig {
  double t1 = 0.50;
  double t2 = 0.60;
  double finest_density_fallback = 0.60;
  ErrorBound base_bound{ErrorBoundMode::value_range_relative, 1e-3};
  std::vector<double> level_bound_ratios; // finest -> coarsest; empty = uniform
  CodecKind codec = CodecKind::lorenzo;
  StrategySelector strategy;
  int gsp_x_layers = 1;
  int gsp_y_slices = 1;

  void validate() const;
};

// Density filter: OpST on [0,t1), AKDTree on [t1,t2], GSP on (t2,1].
StrategyTag select_strategy(double density, const CompressionConfig &config);

// Per-level absolute bounds, finest first. Without ratios every level gets
// the base bound; with ratios level i is scaled by ratio_i / ratio_0.
// Relative bounds resolve against each level's defined values.
std::vector<double> derive_level_bounds(const ErrorBound &base, const AMRDataset &dataset,
                                        const CompressionConfig &config);

struct CompressStats {
  double preprocess_seconds = 0.0;
  double encode_seconds = 0.0;
  double decode_seconds = 0.0;
};

struct LevelRecordInfo {
  StrategyTag tag = StrategyTag::OpST;
  double bound = 0.0;
  int64_t metadata_bytes = 0;
  int64_t payload_bytes = 0;
};

struct ArchiveInfo {
  int num_levels = 0;
  int finest_side = 0;
  int unit_block_size = 0;
  int refinement_factor = 0;
  ValueType value_type = ValueType::f32;
  std::vector<LevelRecordInfo> records;
  int64_t total_bytes = 0;
};

// Container: "TAC1" | version | length-prefixed text header | record count |
// records (tag, bound, metadata blob, payload list, CRC32) | file CRC32.
std::vector<uint8_t> compress_dataset(const AMRDataset &dataset, const CompressionConfig &config,
                                      CompressStats *stats = nullptr);
AMRDataset decompress_dataset(const std::vector<uint8_t> &archive, CompressStats *stats = nullptr);

std::vector<uint8_t> compress_baseline_1d(const AMRDataset &dataset, const ErrorBound &bound,
                                          CodecKind codec = CodecKind::lorenzo,
                                          CompressStats *stats = nullptr);

ArchiveInfo inspect_archive(const std::vector<uint8_t> &archive);

void write_archive(const std::string &path, const std::vector<uint8_t> &archive);
std::vector<uint8_t> read_archive(const std::string &path);

} // namespace tac

#endif

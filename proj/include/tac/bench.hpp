#ifndef TAC_BENCH_HPP
#define TAC_BENCH_HPP

#include <string>
#include <vector>

#include "tac/amr.hpp"
#include "tac/metrics.hpp"
#include "tac/pipeline.hpp"

namespace tac {

// One rate-distortion sweep point. bit_rate * compression_ratio equals the
// word size by construction (both derive from the same byte counts).
struct RateDistortionRecord {
  std::string strategy; // selector label: "auto" or a forced strategy name
  double eb = 0.0;      // requested bound magnitude
  double bit_rate = 0.0;
  double compression_ratio = 0.0;
  double psnr_db = 0.0;
  double preprocess_seconds = 0.0;
  double encode_seconds = 0.0;
  double decode_seconds = 0.0;
};

// Compress/decompress the dataset once per (strategy, eb) pair; PSNR is
// measured on the merged uniform fields. Rows come back sorted by
// (strategy, eb).
std::vector<RateDistortionRecord> run_bench(const AMRDataset &dataset,
                                            const CompressionConfig &base,
                                            const std::vector<double> &ebs,
                                            const std::vector<StrategySelector> &strategies);

void write_bench_csv(const std::string &path, const std::vector<RateDistortionRecord> &rows);

struct AnalysisResult {
  PowerSpectrum original_spectrum;
  PowerSpectrum decompressed_spectrum;
  double max_rel_spectrum_error = 0.0; // over bins k < k_max
  std::vector<Halo> original_halos;
  std::vector<Halo> decompressed_halos;
  HaloDiff biggest_halo_diff;
};

AnalysisResult run_analysis(const AMRDataset &original, const AMRDataset &decompressed, int k_max,
                            double halo_threshold_factor = kDefaultHaloThresholdFactor,
                            int halo_min_cells = kDefaultHaloMinCells);

// CSV schemas: "k,p_orig,p_decomp,rel_err" and a halo summary with one row
// per list plus the biggest-halo diffs.
void write_spectrum_csv(const std::string &path, const AnalysisResult &result);
void write_halo_csv(const std::string &path, const AnalysisResult &result);

} // namespace tac

#endif

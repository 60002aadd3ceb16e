// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tac/akdtree.hpp"
#include "tac/bench.hpp"
#include "tac/codec.hpp"
#include "tac/datagen.hpp"
#include "tac/gsp.hpp"
#include "tac/metrics.hpp"
#include "tac/opst.hpp"
#include "tac/pipeline.hpp"

using namespace tac;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median_time(const std::function<void()> &fn, int reps) {
  std::vector<double> times;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    fn();
    times.push_back(seconds_since(t0));
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

bool bs_matches_oracle(const BlockMask &mask) {
  const BSGrid grid = compute_bs(mask);
  for (int z = 0; z < mask.dims[2]; ++z)
    for (int y = 0; y < mask.dims[1]; ++y)
      for (int x = 0; x < mask.dims[0]; ++x)
        if (grid.at(x, y, z) != oracle::max_cube_at(mask, x, y, z)) return false;
  return true;
}

// ---- C1: DP vs exhaustive maximal-cube oracle ----
bool criterion_dp_oracle(std::string &detail) {
  const auto t0 = Clock::now();
  int64_t checked = 0;
  // Exhaustive over every mask of each small shape (all sides <= 4, up to 18
  // cells; full 4^3 enumeration is 2^64 masks, so it is covered by dense
  // random sampling below instead).
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= 4; ++b)
      for (int c = 1; c <= 4; ++c) {
        const int cells = a * b * c;
        if (cells > 18) continue;
        for (uint32_t bits = 0; bits < (1u << cells); ++bits) {
          BlockMask mask(a, b, c);
          for (int i = 0; i < cells; ++i) mask.bits[i] = (bits >> i) & 1;
          if (!bs_matches_oracle(mask)) {
            detail = "mismatch on exhaustive mask";
            return false;
          }
          ++checked;
        }
      }
  // Dense random coverage of the full 4^3 space.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    if (!bs_matches_oracle(oracle::random_mask(4, 4, 4, unit(rng), rng()))) {
      detail = "mismatch on random 4^3 mask";
      return false;
    }
    ++checked;
  }
  // 200 random 8^3 masks.
  for (int i = 0; i < 200; ++i) {
    if (!bs_matches_oracle(oracle::random_mask(8, 8, 8, 0.05 + 0.9 * unit(rng), rng()))) {
      detail = "mismatch on random 8^3 mask";
      return false;
    }
    ++checked;
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << checked << " masks, " << elapsed << " s";
  detail = os.str();
  return elapsed < 60.0;
}

// ---- C2: mask/value round trips through the real pipeline ----
bool criterion_cover_roundtrip(std::string &detail) {
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    const double density = 0.05 + 0.90 * double(i) / 199.0;
    const BlockMask mask = i % 2 ? oracle::random_mask(6, 6, 6, density, 1000 + i)
                                 : oracle::clustered_mask(6, density, 1000 + i);
    const LevelGrid level = oracle::level_from_mask(mask, 4, i);
    AMRDataset ds;
    ds.domain_side = level.side;
    ds.levels.push_back(level);

    for (StrategyTag tag : {StrategyTag::OpST, StrategyTag::AKDTree, StrategyTag::NaST,
                            StrategyTag::GSP}) {
      CompressionConfig config;
      config.codec = CodecKind::lossless_ref;
      config.base_bound = {ErrorBoundMode::absolute, 0.0};
      config.strategy = StrategySelector::force(tag);
      const AMRDataset back = decompress_dataset(compress_dataset(ds, config));
      if (back.levels[0].occupancy != level.occupancy || back.levels[0].values != level.values)
        ++failures;
    }
  }
  detail = failures == 0 ? "800 round trips bit-exact" : std::to_string(failures) + " failures";
  return failures == 0;
}

// ---- C3: end-to-end error bounds for every strategy and baseline ----
bool criterion_error_bounds(std::string &detail) {
  GenSpec spec;
  spec.seed = 404;
  spec.finest_side = 64;
  spec.num_levels = 2;
  spec.unit_block_size = 8;
  spec.target_finest_density = 0.40;
  const AMRDataset ds = generate_dataset(spec);

  int violations = 0;
  int checks = 0;
  for (double eb : {1e-2, 1e-3, 1e-4}) {
    for (StrategyTag tag : {StrategyTag::OpST, StrategyTag::AKDTree, StrategyTag::GSP,
                            StrategyTag::ZeroFill, StrategyTag::NaST, StrategyTag::Baseline1D,
                            StrategyTag::Baseline3D}) {
      CompressionConfig config;
      config.base_bound = {ErrorBoundMode::value_range_relative, eb};
      config.strategy = StrategySelector::force(tag);
      const std::vector<uint8_t> archive = compress_dataset(ds, config);
      const ArchiveInfo info = inspect_archive(archive);
      const AMRDataset back = decompress_dataset(archive);
      for (int lvl = 0; lvl < ds.num_levels(); ++lvl) {
        const double bound =
            info.records.size() == 1 ? info.records[0].bound : info.records[lvl].bound;
        const LevelGrid &a = ds.levels[lvl];
        const LevelGrid &b = back.levels[lvl];
        const int u = a.unit_block_size;
        for (int z = 0; z < a.side; ++z)
          for (int y = 0; y < a.side; ++y)
            for (int x = 0; x < a.side; ++x) {
              if (!a.occupancy.get(x / u, y / u, z / u)) continue;
              ++checks;
              if (std::abs(a.at(x, y, z) - b.at(x, y, z)) > bound) ++violations;
            }
      }
    }
  }
  std::ostringstream os;
  os << checks << " point checks, " << violations << " violations";
  detail = os.str();
  return violations == 0;
}

// ---- C4: strategy selection table ----
bool criterion_strategy_table(std::string &detail) {
  CompressionConfig config;
  const std::pair<double, StrategyTag> table[] = {
      {0.23, StrategyTag::OpST},
      {0.58, StrategyTag::AKDTree},
      {0.63, StrategyTag::GSP},
      {0.64, StrategyTag::GSP},
      {0.77, StrategyTag::GSP},
  };
  for (const auto &[density, want] : table) {
    if (select_strategy(density, config) != want) {
      detail = "wrong tag at density " + std::to_string(density);
      return false;
    }
  }
  detail = "all five densities map correctly";
  return true;
}

struct LevelSweepPoint {
  double bit_rate = 0.0;
  double psnr_db = 0.0;
};

LevelSweepPoint run_level_strategy(const LevelGrid &level, StrategyTag tag, double rel_eb) {
  AMRDataset ds;
  ds.domain_side = level.side;
  ds.levels.push_back(level);
  CompressionConfig config;
  config.base_bound = {ErrorBoundMode::value_range_relative, rel_eb};
  config.strategy = StrategySelector::force(tag);
  const std::vector<uint8_t> archive = compress_dataset(ds, config);
  const AMRDataset back = decompress_dataset(archive);

  // PSNR over defined cells only.
  std::vector<double> orig, recon;
  const int u = level.unit_block_size;
  for (int z = 0; z < level.side; ++z)
    for (int y = 0; y < level.side; ++y)
      for (int x = 0; x < level.side; ++x)
        if (level.occupancy.get(x / u, y / u, z / u)) {
          orig.push_back(level.at(x, y, z));
          recon.push_back(back.levels[0].at(x, y, z));
        }
  LevelSweepPoint point;
  point.bit_rate = 8.0 * double(archive.size()) / double(orig.size());
  point.psnr_db = psnr(orig, recon);
  return point;
}

// ---- C5: OpST vs NaST on a 23%-density fine level ----
bool criterion_opst_vs_nast(std::string &detail) {
  GenSpec spec;
  spec.seed = 501;
  spec.finest_side = 128;
  spec.num_levels = 2;
  spec.unit_block_size = 8;
  spec.target_finest_density = 0.23;
  const AMRDataset ds = generate_dataset(spec);
  const LevelGrid &fine = ds.levels[0];

  int wins = 0;
  std::ostringstream os;
  for (double eb : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
    const LevelSweepPoint opst = run_level_strategy(fine, StrategyTag::OpST, eb);
    const LevelSweepPoint nast = run_level_strategy(fine, StrategyTag::NaST, eb);
    const bool win = opst.psnr_db >= nast.psnr_db - 0.5 && opst.bit_rate <= nast.bit_rate;
    wins += win ? 1 : 0;
    os << (win ? "+" : "-");
  }
  detail = "density " + std::to_string(level_density(fine)) + ", sweep " + os.str();
  return wins >= 4;
}

// ---- C6: GSP vs zero fill on a 77%-density level ----
bool criterion_gsp_vs_zf(std::string &detail) {
  GenSpec spec;
  spec.seed = 501;
  spec.finest_side = 128;
  spec.num_levels = 2;
  spec.unit_block_size = 8;
  spec.target_finest_density = 0.23;
  const AMRDataset ds = generate_dataset(spec);
  const LevelGrid &coarse = ds.levels[1]; // ~77% dense

  int wins = 0;
  std::ostringstream os;
  for (double eb : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
    const LevelSweepPoint gsp = run_level_strategy(coarse, StrategyTag::GSP, eb);
    const LevelSweepPoint zf = run_level_strategy(coarse, StrategyTag::ZeroFill, eb);
    const bool win = gsp.psnr_db >= zf.psnr_db;
    wins += win ? 1 : 0;
    os << (win ? "+" : "-");
  }
  detail = "density " + std::to_string(level_density(coarse)) + ", sweep " + os.str();
  return wins >= 4;
}

// ---- C7: pre-process complexity trends on 32^3-block masks ----
bool criterion_complexity_trend(std::string &detail) {
  const auto t0 = Clock::now();
  std::vector<double> opst_times, akd_times;
  for (double density : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const BlockMask mask = oracle::clustered_mask(32, density, 77);
    opst_times.push_back(median_time([&] { (void)opst_cover(mask); }, 5));
    akd_times.push_back(median_time([&] { (void)akd_cover(mask); }, 5));
  }
  const double opst_ratio = opst_times.back() / opst_times.front();
  const double akd_ratio = *std::max_element(akd_times.begin(), akd_times.end()) /
                           *std::min_element(akd_times.begin(), akd_times.end());
  std::ostringstream os;
  os << "opst 90%/10% = " << opst_ratio << ", akd max/min = " << akd_ratio << ", "
     << seconds_since(t0) << " s";
  detail = os.str();
  return opst_ratio >= 3.0 && akd_ratio < 2.0 && seconds_since(t0) < 300.0;
}

// ---- C8: accounting identity on bench rows ----
bool criterion_accounting(std::string &detail) {
  GenSpec spec;
  spec.seed = 808;
  spec.finest_side = 64;
  spec.num_levels = 2;
  spec.unit_block_size = 8;
  spec.target_finest_density = 0.35;
  const AMRDataset ds = generate_dataset(spec);
  CompressionConfig config;
  config.base_bound = {ErrorBoundMode::value_range_relative, 1e-3};
  const std::vector<StrategySelector> sels{
      StrategySelector::auto_policy(),          StrategySelector::force(StrategyTag::OpST),
      StrategySelector::force(StrategyTag::GSP), StrategySelector::force(StrategyTag::Baseline1D),
      StrategySelector::force(StrategyTag::Baseline3D)};
  const auto rows = run_bench(ds, config, {1e-2, 1e-3, 1e-4}, sels);
  for (const auto &row : rows) {
    const double product = row.bit_rate * row.compression_ratio;
    if (std::abs(product - 32.0) > 32.0 * 1e-6) {
      detail = "product " + std::to_string(product);
      return false;
    }
  }
  detail = std::to_string(rows.size()) + " rows, product exact";
  return true;
}

// ---- C9: FFT against the direct DFT oracle plus Parseval ----
bool criterion_fft(std::string &detail) {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 16;
  std::vector<double> field(size_t(n) * n * n);
  for (auto &v : field) v = unit(rng);

  const auto dft = oracle::direct_dft3(field, n);
  std::vector<double> re(field.begin(), field.end()), im(field.size(), 0.0);
  fft::transform_3d(re, im, n);
  double worst = 0.0;
  for (size_t i = 0; i < field.size(); ++i) {
    const double mag_want = std::abs(dft[i]);
    const double err = std::hypot(re[i] - dft[i].real(), im[i] - dft[i].imag());
    if (mag_want > 1e-9) worst = std::max(worst, err / mag_want);
  }

  double direct = 0.0, fourier = 0.0;
  for (double v : field) direct += v * v;
  for (size_t i = 0; i < re.size(); ++i) fourier += re[i] * re[i] + im[i] * im[i];
  fourier /= double(n) * n * n;
  const double parseval = std::abs(fourier - direct) / direct;

  std::ostringstream os;
  os << "max dft rel err " << worst << ", parseval rel err " << parseval;
  detail = os.str();
  return worst <= 1e-6 && parseval <= 1e-6;
}

// ---- C10: adaptive per-level bounds help post-analysis ----
struct MatchedResult {
  bool matched = false;
  std::vector<uint8_t> archive;
};

MatchedResult match_archive_size(const AMRDataset &ds, CompressionConfig config,
                                 int64_t target_bytes) {
  double lo = config.base_bound.magnitude / 64.0;
  double hi = config.base_bound.magnitude * 64.0;
  MatchedResult result;
  for (int iter = 0; iter < 48; ++iter) {
    const double mid = std::sqrt(lo * hi); // geometric bisection
    config.base_bound.magnitude = mid;
    std::vector<uint8_t> archive = compress_dataset(ds, config);
    const double size = double(archive.size());
    if (std::abs(size - double(target_bytes)) <= 0.01 * double(target_bytes)) {
      result.matched = true;
      result.archive = std::move(archive);
      return result;
    }
    if (size > double(target_bytes))
      lo = mid; // bigger bound shrinks the archive
    else
      hi = mid;
  }
  return result;
}

bool criterion_adaptive_bounds(std::string &detail) {
  int ps_wins = 0, halo_wins = 0, matched = 0;
  std::ostringstream os;
  for (uint64_t seed : {601, 602, 603}) {
    GenSpec spec;
    spec.seed = seed;
    spec.finest_side = 128;
    spec.num_levels = 2;
    spec.unit_block_size = 8;
    spec.target_finest_density = 0.35;
    const AMRDataset ds = generate_dataset(spec);

    CompressionConfig uniform;
    uniform.base_bound = {ErrorBoundMode::value_range_relative, 1e-3};
    const std::vector<uint8_t> base_archive = compress_dataset(ds, uniform);
    const AMRDataset base_back = decompress_dataset(base_archive);
    const AnalysisResult base_res = run_analysis(ds, base_back, 10);

    CompressionConfig tuned_ps = uniform;
    tuned_ps.level_bound_ratios = {3.0, 1.0};
    const MatchedResult ps_match =
        match_archive_size(ds, tuned_ps, int64_t(base_archive.size()));

    CompressionConfig tuned_halo = uniform;
    tuned_halo.level_bound_ratios = {2.0, 1.0};
    const MatchedResult halo_match =
        match_archive_size(ds, tuned_halo, int64_t(base_archive.size()));

    if (!ps_match.matched || !halo_match.matched) {
      os << " seed" << seed << ":unmatched";
      continue;
    }
    ++matched;
    const AnalysisResult ps_res = run_analysis(ds, decompress_dataset(ps_match.archive), 10);
    const AnalysisResult halo_res = run_analysis(ds, decompress_dataset(halo_match.archive), 10);
    const bool ps_win = ps_res.max_rel_spectrum_error <= base_res.max_rel_spectrum_error;
    const bool halo_win =
        halo_res.biggest_halo_diff.rel_mass_diff <= base_res.biggest_halo_diff.rel_mass_diff;
    ps_wins += ps_win ? 1 : 0;
    halo_wins += halo_win ? 1 : 0;
    os << " seed" << seed << ":" << (ps_win ? "ps+" : "ps-") << (halo_win ? "halo+" : "halo-");
  }
  detail = "matched " + std::to_string(matched) + "/3," + os.str();
  return matched == 3 && ps_wins >= 2 && halo_wins >= 2;
}

// ---- C11: metadata overhead on 256^3-cell levels ----
bool criterion_metadata_overhead(std::string &detail) {
  // Build one sparse and one dense 256^3 level with unit block 16.
  GenSpec spec;
  spec.seed = 111;
  spec.finest_side = 256;
  spec.num_levels = 2;
  spec.unit_block_size = 16;
  spec.target_finest_density = 0.23;
  const AMRDataset ds = generate_dataset(spec);
  const LevelGrid &sparse = ds.levels[0]; // ~23%, 256^3 cells

  GenSpec dense_spec = spec;
  dense_spec.seed = 112;
  dense_spec.finest_side = 512;
  dense_spec.target_finest_density = 0.23;
  // The coarse level of a 512^3 dataset is a 256^3 level at ~77% density.
  const AMRDataset dense_ds = generate_dataset(dense_spec);
  const LevelGrid &dense = dense_ds.levels[1];

  auto overhead = [](const LevelGrid &level, StrategyTag tag) {
    AMRDataset one;
    one.domain_side = level.side;
    one.levels.push_back(level);
    CompressionConfig config;
    config.base_bound = {ErrorBoundMode::value_range_relative, 1e-3};
    config.strategy = StrategySelector::force(tag);
    const ArchiveInfo info = inspect_archive(compress_dataset(one, config));
    const double raw_payload = double(level.defined_cells()) * 4.0;
    return double(info.records[0].metadata_bytes) / raw_payload;
  };

  const double opst = overhead(sparse, StrategyTag::OpST);
  const double gsp = overhead(dense, StrategyTag::GSP);
  std::ostringstream os;
  os << "opst " << opst * 100.0 << "%, gsp " << gsp * 100.0 << "% of raw payload";
  detail = os.str();
  return opst <= 0.005 && gsp <= 0.005;
}

struct Criterion {
  int id;
  const char *name;
  std::function<bool(std::string &)> run;
};

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "DP oracle equivalence", criterion_dp_oracle},
      {2, "cover/round-trip bit exactness", criterion_cover_roundtrip},
      {3, "end-to-end error-bound guarantee", criterion_error_bounds},
      {4, "strategy-selection table", criterion_strategy_table},
      {5, "OpST vs NaST rate-distortion trend", criterion_opst_vs_nast},
      {6, "GSP vs zero-fill distortion trend", criterion_gsp_vs_zf},
      {7, "pre-process complexity trends", criterion_complexity_trend},
      {8, "bit-rate/compression-ratio accounting identity", criterion_accounting},
      {9, "FFT validity (oracle + Parseval)", criterion_fft},
      {10, "adaptive per-level bound benefit", criterion_adaptive_bounds},
      {11, "metadata overhead", criterion_metadata_overhead},
  };

  int failures = 0;
  for (const auto &criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception &e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] C%-2d %s%s%s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.name,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

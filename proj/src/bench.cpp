#include "tac/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tac/bytes.hpp"

namespace tac {

namespace {

std::string selector_label(const StrategySelector &sel) {
  return sel.automatic ? "auto" : strategy_name(sel.forced);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

} // namespace

std::vector<RateDistortionRecord> run_bench(const AMRDataset &dataset,
                                            const CompressionConfig &base,
                                            const std::vector<double> &ebs,
                                            const std::vector<StrategySelector> &strategies) {
  if (ebs.empty() || strategies.empty())
    fail(ErrorCode::invalid_argument, "bench needs at least one bound and one strategy");
  const std::vector<double> original = merge_to_uniform(dataset);
  const int64_t values = dataset.defined_values();
  const int word_bits = value_type_bits(dataset.value_type);

  std::vector<RateDistortionRecord> rows;
  for (const StrategySelector &sel : strategies) {
    for (double eb : ebs) {
      CompressionConfig config = base;
      config.strategy = sel;
      config.base_bound.magnitude = eb;
      CompressStats stats;
      const std::vector<uint8_t> archive = compress_dataset(dataset, config, &stats);
      const AMRDataset decompressed = decompress_dataset(archive, &stats);
      const std::vector<double> recon = merge_to_uniform(decompressed);

      RateDistortionRecord row;
      row.strategy = selector_label(sel);
      row.eb = eb;
      row.bit_rate = 8.0 * static_cast<double>(archive.size()) / static_cast<double>(values);
      row.compression_ratio = static_cast<double>(values) * (word_bits / 8.0) /
                              static_cast<double>(archive.size());
      row.psnr_db = psnr(original, recon);
      row.preprocess_seconds = stats.preprocess_seconds;
      row.encode_seconds = stats.encode_seconds;
      row.decode_seconds = stats.decode_seconds;
      rows.push_back(row);
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const RateDistortionRecord &a, const RateDistortionRecord &b) {
              if (a.strategy != b.strategy) return a.strategy < b.strategy;
              return a.eb < b.eb;
            });
  return rows;
}

void write_bench_csv(const std::string &path, const std::vector<RateDistortionRecord> &rows) {
  std::ostringstream out;
  out << "strategy,eb,bit_rate,cr,psnr_db,pre_s,enc_s,dec_s\n";
  for (const auto &r : rows) {
    out << r.strategy << ',' << format_double(r.eb) << ','
        << format_double(r.bit_rate) << ',' << format_double(r.compression_ratio) << ','
        << format_double(r.psnr_db) << ',' << format_double(r.preprocess_seconds) << ','
        << format_double(r.encode_seconds) << ',' << format_double(r.decode_seconds) << '\n';
  }
  const std::string text = out.str();
  write_file_atomic(path, std::vector<uint8_t>(text.begin(), text.end()));
}

AnalysisResult run_analysis(const AMRDataset &original, const AMRDataset &decompressed, int k_max,
                            double halo_threshold_factor, int halo_min_cells) {
  if (original.domain_side != decompressed.domain_side)
    fail(ErrorCode::invalid_argument, "datasets have different domains");
  const std::vector<double> a = merge_to_uniform(original);
  const std::vector<double> b = merge_to_uniform(decompressed);
  AnalysisResult res;
  res.original_spectrum = power_spectrum(a, original.domain_side, k_max);
  res.decompressed_spectrum = power_spectrum(b, original.domain_side, k_max);
  res.max_rel_spectrum_error =
      power_spectrum_error(res.original_spectrum, res.decompressed_spectrum, k_max);
  res.original_halos = halo_find(a, original.domain_side, halo_threshold_factor, halo_min_cells);
  res.decompressed_halos =
      halo_find(b, original.domain_side, halo_threshold_factor, halo_min_cells);
  if (!res.original_halos.empty() && !res.decompressed_halos.empty())
    res.biggest_halo_diff = halo_compare(res.original_halos, res.decompressed_halos);
  return res;
}

void write_spectrum_csv(const std::string &path, const AnalysisResult &result) {
  std::ostringstream out;
  out << "k,p_orig,p_decomp,rel_err\n";
  for (int k = 1; k <= result.original_spectrum.k_max; ++k) {
    const double p = result.original_spectrum.at(k);
    const double q = result.decompressed_spectrum.at(k);
    const double rel = p == 0.0 ? 0.0 : std::abs(q - p) / p;
    out << k << ',' << format_double(p) << ',' << format_double(q) << ',' << format_double(rel)
        << '\n';
  }
  const std::string text = out.str();
  write_file_atomic(path, std::vector<uint8_t>(text.begin(), text.end()));
}

void write_halo_csv(const std::string &path, const AnalysisResult &result) {
  std::ostringstream out;
  out << "source,rank,mass,cell_count,com_x,com_y,com_z\n";
  for (size_t i = 0; i < result.original_halos.size(); ++i) {
    const Halo &h = result.original_halos[i];
    out << "original," << i << ',' << format_double(h.mass) << ',' << h.cell_count << ','
        << format_double(h.center_of_mass[0]) << ',' << format_double(h.center_of_mass[1]) << ','
        << format_double(h.center_of_mass[2]) << '\n';
  }
  for (size_t i = 0; i < result.decompressed_halos.size(); ++i) {
    const Halo &h = result.decompressed_halos[i];
    out << "decompressed," << i << ',' << format_double(h.mass) << ',' << h.cell_count << ','
        << format_double(h.center_of_mass[0]) << ',' << format_double(h.center_of_mass[1]) << ','
        << format_double(h.center_of_mass[2]) << '\n';
  }
  out << "biggest_halo_rel_mass_diff," << format_double(result.biggest_halo_diff.rel_mass_diff)
      << ",cell_count_diff," << result.biggest_halo_diff.cell_count_diff << ",,,\n";
  const std::string text = out.str();
  write_file_atomic(path, std::vector<uint8_t>(text.begin(), text.end()));
}

} // namespace tac

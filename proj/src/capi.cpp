#include "tac.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "tac/bench.hpp"
#include "tac/datagen.hpp"
#include "tac/metrics.hpp"
#include "tac/pipeline.hpp"

struct tac_dataset {
  tac::AMRDataset ds;
};

namespace {

thread_local std::string g_last_error;

tac_status status_of(tac::ErrorCode code) {
  using tac::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return TAC_ERR_INVALID_ARGUMENT;
    case ErrorCode::io: return TAC_ERR_IO;
    case ErrorCode::format: return TAC_ERR_FORMAT;
    case ErrorCode::structure: return TAC_ERR_STRUCTURE;
    case ErrorCode::codec: return TAC_ERR_CODEC;
    case ErrorCode::checksum: return TAC_ERR_CHECKSUM;
    case ErrorCode::internal: return TAC_ERR_INTERNAL;
  }
  return TAC_ERR_INTERNAL;
}

template <typename Fn> tac_status guarded(Fn &&fn) {
  try {
    fn();
    return TAC_OK;
  } catch (const tac::Error &e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception &e) {
    g_last_error = e.what();
    return TAC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TAC_ERR_INTERNAL;
  }
}

tac_status invalid(const char *msg) {
  g_last_error = msg;
  return TAC_ERR_INVALID_ARGUMENT;
}

tac::CompressionConfig to_config(const tac_options &o) {
  tac::CompressionConfig c;
  c.t1 = o.t1;
  c.t2 = o.t2;
  c.finest_density_fallback = o.fallback_density;
  c.base_bound.mode = o.eb_mode == TAC_EB_ABS ? tac::ErrorBoundMode::absolute
                                              : tac::ErrorBoundMode::value_range_relative;
  c.base_bound.magnitude = o.eb;
  if (o.level_ratios && o.level_ratios_len > 0)
    c.level_bound_ratios.assign(o.level_ratios, o.level_ratios + o.level_ratios_len);
  c.codec = o.codec == TAC_CODEC_LOSSLESS_REF ? tac::CodecKind::lossless_ref
                                              : tac::CodecKind::lorenzo;
  if (o.strategy == TAC_STRATEGY_AUTO)
    c.strategy = tac::StrategySelector::auto_policy();
  else if (o.strategy >= 0 && o.strategy <= TAC_STRATEGY_3D)
    c.strategy = tac::StrategySelector::force(static_cast<tac::StrategyTag>(o.strategy));
  else
    tac::fail(tac::ErrorCode::invalid_argument, "unknown strategy code");
  c.gsp_x_layers = o.gsp_x_layers;
  c.gsp_y_slices = o.gsp_y_slices;
  return c;
}

} // namespace

extern "C" {

const char *tac_status_name(tac_status status) {
  switch (status) {
    case TAC_OK: return "ok";
    case TAC_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case TAC_ERR_IO: return "io";
    case TAC_ERR_FORMAT: return "format";
    case TAC_ERR_STRUCTURE: return "structure";
    case TAC_ERR_CODEC: return "codec";
    case TAC_ERR_CHECKSUM: return "checksum";
    case TAC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char *tac_last_error(void) { return g_last_error.c_str(); }

void tac_free(void *ptr) { std::free(ptr); }

tac_status tac_dataset_load(const char *descriptor_path, tac_dataset **out) {
  if (!descriptor_path || !out) return invalid("null argument");
  return guarded([&] { *out = new tac_dataset{tac::load_dataset(descriptor_path)}; });
}

tac_status tac_dataset_save(const tac_dataset *ds, const char *descriptor_path) {
  if (!ds || !descriptor_path) return invalid("null argument");
  return guarded([&] { tac::save_dataset(ds->ds, descriptor_path); });
}

void tac_dataset_free(tac_dataset *ds) { delete ds; }

int32_t tac_dataset_levels(const tac_dataset *ds) { return ds ? ds->ds.num_levels() : 0; }
int32_t tac_dataset_finest_side(const tac_dataset *ds) { return ds ? ds->ds.domain_side : 0; }
int32_t tac_dataset_unit_block(const tac_dataset *ds) { return ds ? ds->ds.unit_block_size() : 0; }
int32_t tac_dataset_refinement_factor(const tac_dataset *ds) {
  return ds ? ds->ds.refinement_factor : 0;
}
int32_t tac_dataset_value_bits(const tac_dataset *ds) {
  return ds ? tac::value_type_bits(ds->ds.value_type) : 0;
}
int64_t tac_dataset_defined_values(const tac_dataset *ds) {
  return ds ? ds->ds.defined_values() : 0;
}

tac_status tac_dataset_level_side(const tac_dataset *ds, int32_t level, int32_t *side) {
  if (!ds || !side) return invalid("null argument");
  if (level < 0 || level >= ds->ds.num_levels()) return invalid("level index out of range");
  *side = ds->ds.levels[level].side;
  return TAC_OK;
}

tac_status tac_dataset_level_density(const tac_dataset *ds, int32_t level, double *density) {
  if (!ds || !density) return invalid("null argument");
  if (level < 0 || level >= ds->ds.num_levels()) return invalid("level index out of range");
  *density = tac::level_density(ds->ds.levels[level]);
  return TAC_OK;
}

tac_status tac_dataset_merge_uniform(const tac_dataset *ds, double **values, int64_t *count) {
  if (!ds || !values || !count) return invalid("null argument");
  return guarded([&] {
    const std::vector<double> merged = tac::merge_to_uniform(ds->ds);
    double *buf = static_cast<double *>(std::malloc(merged.size() * sizeof(double)));
    if (!buf) tac::fail(tac::ErrorCode::internal, "allocation failed");
    std::memcpy(buf, merged.data(), merged.size() * sizeof(double));
    *values = buf;
    *count = static_cast<int64_t>(merged.size());
  });
}

tac_status tac_dataset_masks_equal(const tac_dataset *a, const tac_dataset *b, int32_t *equal) {
  if (!a || !b || !equal) return invalid("null argument");
  *equal = 0;
  if (a->ds.num_levels() == b->ds.num_levels() && a->ds.domain_side == b->ds.domain_side) {
    bool same = true;
    for (int i = 0; i < a->ds.num_levels() && same; ++i)
      same = a->ds.levels[i].occupancy == b->ds.levels[i].occupancy &&
             a->ds.levels[i].side == b->ds.levels[i].side;
    *equal = same ? 1 : 0;
  }
  return TAC_OK;
}

void tac_gen_spec_defaults(tac_gen_spec *spec) {
  if (!spec) return;
  tac::GenSpec d;
  spec->seed = d.seed;
  spec->finest_side = d.finest_side;
  spec->num_levels = d.num_levels;
  spec->unit_block_size = d.unit_block_size;
  spec->value_bits = 32;
  spec->target_finest_density = d.target_finest_density;
  spec->smoothness = d.smoothness;
  spec->value_min = d.value_range.first;
  spec->value_max = d.value_range.second;
}

tac_status tac_generate(const tac_gen_spec *spec, tac_dataset **out, double *densities_out) {
  if (!spec || !out) return invalid("null argument");
  return guarded([&] {
    tac::GenSpec s;
    s.seed = spec->seed;
    s.finest_side = spec->finest_side;
    s.num_levels = spec->num_levels;
    s.unit_block_size = spec->unit_block_size;
    s.value_type = spec->value_bits == 64 ? tac::ValueType::f64 : tac::ValueType::f32;
    s.target_finest_density = spec->target_finest_density;
    s.smoothness = spec->smoothness;
    s.value_range = {spec->value_min, spec->value_max};
    tac::GenReport report;
    tac::AMRDataset ds = tac::generate_dataset(s, &report);
    if (densities_out)
      for (int i = 0; i < s.num_levels; ++i) densities_out[i] = report.level_densities[i];
    *out = new tac_dataset{std::move(ds)};
  });
}

void tac_options_defaults(tac_options *options) {
  if (!options) return;
  tac::CompressionConfig d;
  options->t1 = d.t1;
  options->t2 = d.t2;
  options->fallback_density = d.finest_density_fallback;
  options->eb_mode = TAC_EB_REL;
  options->eb = d.base_bound.magnitude;
  options->level_ratios = nullptr;
  options->level_ratios_len = 0;
  options->codec = TAC_CODEC_LORENZO;
  options->strategy = TAC_STRATEGY_AUTO;
  options->gsp_x_layers = d.gsp_x_layers;
  options->gsp_y_slices = d.gsp_y_slices;
}

tac_status tac_compress_file(const tac_dataset *ds, const tac_options *options,
                             const char *archive_path, tac_stats *stats_or_null) {
  if (!ds || !options || !archive_path) return invalid("null argument");
  return guarded([&] {
    tac::CompressStats stats;
    const std::vector<uint8_t> archive =
        tac::compress_dataset(ds->ds, to_config(*options), &stats);
    tac::write_archive(archive_path, archive);
    if (stats_or_null) {
      stats_or_null->preprocess_seconds = stats.preprocess_seconds;
      stats_or_null->encode_seconds = stats.encode_seconds;
      stats_or_null->decode_seconds = stats.decode_seconds;
      stats_or_null->archive_bytes = static_cast<int64_t>(archive.size());
    }
  });
}

tac_status tac_decompress_file(const char *archive_path, tac_dataset **out,
                               tac_stats *stats_or_null) {
  if (!archive_path || !out) return invalid("null argument");
  return guarded([&] {
    const std::vector<uint8_t> archive = tac::read_archive(archive_path);
    tac::CompressStats stats;
    tac::AMRDataset ds = tac::decompress_dataset(archive, &stats);
    if (stats_or_null) {
      stats_or_null->preprocess_seconds = stats.preprocess_seconds;
      stats_or_null->encode_seconds = stats.encode_seconds;
      stats_or_null->decode_seconds = stats.decode_seconds;
      stats_or_null->archive_bytes = static_cast<int64_t>(archive.size());
    }
    *out = new tac_dataset{std::move(ds)};
  });
}

tac_status tac_archive_levels(const char *archive_path, int32_t *levels, int32_t *records) {
  if (!archive_path || !levels) return invalid("null argument");
  return guarded([&] {
    const tac::ArchiveInfo info = tac::inspect_archive(tac::read_archive(archive_path));
    *levels = info.num_levels;
    if (records) *records = static_cast<int32_t>(info.records.size());
  });
}

tac_status tac_archive_record(const char *archive_path, int32_t index, char *tag_buf,
                              size_t tag_buf_len, double *bound, int64_t *metadata_bytes,
                              int64_t *payload_bytes) {
  if (!archive_path) return invalid("null argument");
  return guarded([&] {
    const tac::ArchiveInfo info = tac::inspect_archive(tac::read_archive(archive_path));
    if (index < 0 || index >= static_cast<int32_t>(info.records.size()))
      tac::fail(tac::ErrorCode::invalid_argument, "record index out of range");
    const tac::LevelRecordInfo &rec = info.records[index];
    if (tag_buf && tag_buf_len > 0) {
      std::snprintf(tag_buf, tag_buf_len, "%s", tac::strategy_name(rec.tag));
    }
    if (bound) *bound = rec.bound;
    if (metadata_bytes) *metadata_bytes = rec.metadata_bytes;
    if (payload_bytes) *payload_bytes = rec.payload_bytes;
  });
}

tac_status tac_psnr(const double *original, const double *decompressed, int64_t count,
                    double *out_db) {
  if (!original || !decompressed || !out_db) return invalid("null argument");
  return guarded([&] {
    *out_db = tac::psnr({original, static_cast<size_t>(count)},
                        {decompressed, static_cast<size_t>(count)});
  });
}

tac_status tac_power_spectrum(const double *field, int32_t side, int32_t k_max,
                              double *out_bins) {
  if (!field || !out_bins) return invalid("null argument");
  return guarded([&] {
    const tac::PowerSpectrum ps = tac::power_spectrum(
        {field, static_cast<size_t>(side) * side * side}, side, k_max);
    for (int k = 0; k < k_max; ++k) out_bins[k] = ps.p_of_k[k];
  });
}

tac_status tac_halo_find(const double *field, int32_t side, double threshold_factor,
                         int32_t min_cells, tac_halo **out, int64_t *count) {
  if (!field || !out || !count) return invalid("null argument");
  return guarded([&] {
    const std::vector<tac::Halo> halos = tac::halo_find(
        {field, static_cast<size_t>(side) * side * side}, side, threshold_factor, min_cells);
    tac_halo *buf = static_cast<tac_halo *>(std::malloc(std::max<size_t>(1, halos.size()) *
                                                        sizeof(tac_halo)));
    if (!buf) tac::fail(tac::ErrorCode::internal, "allocation failed");
    for (size_t i = 0; i < halos.size(); ++i) {
      buf[i].center_of_mass[0] = halos[i].center_of_mass[0];
      buf[i].center_of_mass[1] = halos[i].center_of_mass[1];
      buf[i].center_of_mass[2] = halos[i].center_of_mass[2];
      buf[i].cell_count = halos[i].cell_count;
      buf[i].mass = halos[i].mass;
    }
    *out = buf;
    *count = static_cast<int64_t>(halos.size());
  });
}

tac_status tac_bench(const tac_dataset *ds, const tac_options *base, const double *ebs,
                     int32_t n_ebs, const int32_t *strategies, int32_t n_strategies,
                     const char *csv_path) {
  if (!ds || !base || !ebs || !strategies || !csv_path) return invalid("null argument");
  return guarded([&] {
    std::vector<tac::StrategySelector> sels;
    for (int32_t i = 0; i < n_strategies; ++i) {
      if (strategies[i] == TAC_STRATEGY_AUTO)
        sels.push_back(tac::StrategySelector::auto_policy());
      else if (strategies[i] >= 0 && strategies[i] <= TAC_STRATEGY_3D)
        sels.push_back(tac::StrategySelector::force(static_cast<tac::StrategyTag>(strategies[i])));
      else
        tac::fail(tac::ErrorCode::invalid_argument, "unknown strategy code");
    }
    const std::vector<tac::RateDistortionRecord> rows = tac::run_bench(
        ds->ds, to_config(*base), std::vector<double>(ebs, ebs + n_ebs), sels);
    tac::write_bench_csv(csv_path, rows);
  });
}

tac_status tac_analyze(const tac_dataset *original, const tac_dataset *decompressed,
                       int32_t k_max, double halo_threshold_factor, int32_t halo_min_cells,
                       const char *spectrum_csv, const char *halo_csv,
                       double *max_rel_spectrum_error, double *biggest_halo_rel_mass_diff,
                       int64_t *biggest_halo_cell_diff) {
  if (!original || !decompressed) return invalid("null argument");
  return guarded([&] {
    const tac::AnalysisResult res = tac::run_analysis(
        original->ds, decompressed->ds, k_max, halo_threshold_factor, halo_min_cells);
    if (spectrum_csv) tac::write_spectrum_csv(spectrum_csv, res);
    if (halo_csv) tac::write_halo_csv(halo_csv, res);
    if (max_rel_spectrum_error) *max_rel_spectrum_error = res.max_rel_spectrum_error;
    if (biggest_halo_rel_mass_diff) *biggest_halo_rel_mass_diff = res.biggest_halo_diff.rel_mass_diff;
    if (biggest_halo_cell_diff) *biggest_halo_cell_diff = res.biggest_halo_diff.cell_count_diff;
  });
}

} // extern "C"

/* tac.h - C interface to the error-bounded AMR compression library.
 *
 * All functions return TAC_OK on success; on failure they return an error
 * status and leave a thread-local message readable via tac_last_error().
 * Objects returned through out-parameters are owned by the caller and must
 * be released with the matching free function.
 */
#ifndef TAC_H
#define TAC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tac_status {
  TAC_OK = 0,
  TAC_ERR_INVALID_ARGUMENT = 1,
  TAC_ERR_IO = 2,
  TAC_ERR_FORMAT = 3,
  TAC_ERR_STRUCTURE = 4,
  TAC_ERR_CODEC = 5,
  TAC_ERR_CHECKSUM = 6,
  TAC_ERR_INTERNAL = 7
} tac_status;

const char *tac_status_name(tac_status status);
const char *tac_last_error(void);

void tac_free(void *ptr); /* releases buffers allocated by the library */

/* ---------------- datasets ---------------- */

typedef struct tac_dataset tac_dataset;

tac_status tac_dataset_load(const char *descriptor_path, tac_dataset **out);
tac_status tac_dataset_save(const tac_dataset *ds, const char *descriptor_path);
void tac_dataset_free(tac_dataset *ds);

int32_t tac_dataset_levels(const tac_dataset *ds);
int32_t tac_dataset_finest_side(const tac_dataset *ds);
int32_t tac_dataset_unit_block(const tac_dataset *ds);
int32_t tac_dataset_refinement_factor(const tac_dataset *ds);
int32_t tac_dataset_value_bits(const tac_dataset *ds); /* 32 or 64 */
int64_t tac_dataset_defined_values(const tac_dataset *ds);
tac_status tac_dataset_level_side(const tac_dataset *ds, int32_t level, int32_t *side);
tac_status tac_dataset_level_density(const tac_dataset *ds, int32_t level, double *density);

/* Dense finest-resolution field (side^3 doubles, x fastest). */
tac_status tac_dataset_merge_uniform(const tac_dataset *ds, double **values, int64_t *count);

/* 1 when both datasets have identical geometry and occupancy masks. */
tac_status tac_dataset_masks_equal(const tac_dataset *a, const tac_dataset *b, int32_t *equal);

/* ---------------- generation ---------------- */

typedef struct tac_gen_spec {
  uint64_t seed;
  int32_t finest_side;
  int32_t num_levels;
  int32_t unit_block_size;
  int32_t value_bits; /* 32 or 64 */
  double target_finest_density;
  double smoothness;
  double value_min;
  double value_max;
} tac_gen_spec;

void tac_gen_spec_defaults(tac_gen_spec *spec);

/* densities_out, when non-null, must hold num_levels doubles. */
tac_status tac_generate(const tac_gen_spec *spec, tac_dataset **out, double *densities_out);

/* ---------------- compression ---------------- */

typedef enum tac_strategy {
  TAC_STRATEGY_AUTO = -1,
  TAC_STRATEGY_OPST = 0,
  TAC_STRATEGY_AKDTREE = 1,
  TAC_STRATEGY_GSP = 2,
  TAC_STRATEGY_ZF = 3,
  TAC_STRATEGY_NAST = 4,
  TAC_STRATEGY_1D = 5,
  TAC_STRATEGY_3D = 6
} tac_strategy;

typedef enum tac_codec { TAC_CODEC_LORENZO = 0, TAC_CODEC_LOSSLESS_REF = 1 } tac_codec;
typedef enum tac_eb_mode { TAC_EB_ABS = 0, TAC_EB_REL = 1 } tac_eb_mode;

typedef struct tac_options {
  double t1;
  double t2;
  double fallback_density;
  int32_t eb_mode;  /* tac_eb_mode */
  double eb;
  const double *level_ratios; /* finest -> coarsest, may be NULL */
  int32_t level_ratios_len;
  int32_t codec;    /* tac_codec */
  int32_t strategy; /* tac_strategy */
  int32_t gsp_x_layers;
  int32_t gsp_y_slices;
} tac_options;

void tac_options_defaults(tac_options *options);

typedef struct tac_stats {
  double preprocess_seconds;
  double encode_seconds;
  double decode_seconds;
  int64_t archive_bytes;
} tac_stats;

tac_status tac_compress_file(const tac_dataset *ds, const tac_options *options,
                             const char *archive_path, tac_stats *stats_or_null);
tac_status tac_decompress_file(const char *archive_path, tac_dataset **out,
                               tac_stats *stats_or_null);

/* ---------------- archive inspection ---------------- */

tac_status tac_archive_levels(const char *archive_path, int32_t *levels, int32_t *records);
/* tag_buf receives the strategy name (e.g. "opst"); buffer of >= 16 bytes. */
tac_status tac_archive_record(const char *archive_path, int32_t index, char *tag_buf,
                              size_t tag_buf_len, double *bound, int64_t *metadata_bytes,
                              int64_t *payload_bytes);

/* ---------------- metrics ---------------- */

tac_status tac_psnr(const double *original, const double *decompressed, int64_t count,
                    double *out_db);
/* out_bins must hold k_max doubles; bin k lands at out_bins[k-1]. */
tac_status tac_power_spectrum(const double *field, int32_t side, int32_t k_max, double *out_bins);

typedef struct tac_halo {
  double center_of_mass[3];
  int64_t cell_count;
  double mass;
} tac_halo;

/* *out is a malloc'd array of *count halos sorted by mass descending;
 * release with tac_free. */
tac_status tac_halo_find(const double *field, int32_t side, double threshold_factor,
                         int32_t min_cells, tac_halo **out, int64_t *count);

/* ---------------- sweeps and analysis ---------------- */

/* Runs the rate-distortion sweep and writes the CSV
 * (strategy,eb,bit_rate,cr,psnr_db,pre_s,enc_s,dec_s). strategies entries are
 * tac_strategy values; TAC_STRATEGY_AUTO selects the density policy. */
tac_status tac_bench(const tac_dataset *ds, const tac_options *base, const double *ebs,
                     int32_t n_ebs, const int32_t *strategies, int32_t n_strategies,
                     const char *csv_path);

/* Power-spectrum and halo comparison of two datasets; either CSV path may be
 * NULL to skip that report. */
tac_status tac_analyze(const tac_dataset *original, const tac_dataset *decompressed,
                       int32_t k_max, double halo_threshold_factor, int32_t halo_min_cells,
                       const char *spectrum_csv, const char *halo_csv,
                       double *max_rel_spectrum_error, double *biggest_halo_rel_mass_diff,
                       int64_t *biggest_halo_cell_diff);

#ifdef __cplusplus
}
#endif

#endif /* TAC_H */

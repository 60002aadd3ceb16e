// Command-line front end for the AMR compression toolkit. Everything goes
// through the shared library's C interface.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tac.h"

namespace {

struct ConfigFlags {
  double t1 = 0.50;
  double t2 = 0.60;
  double fallback_density = 0.60;
  double eb = 1e-3;
  std::string eb_mode = "rel";
  std::string level_ratios;
  std::string codec = "lorenzo";
  std::string strategy = "auto";
  int gsp_x = 1;
  int gsp_y = 1;
};

void add_config_flags(CLI::App *cmd, ConfigFlags &cfg) {
  cmd->add_option("--t1", cfg.t1, "OpST/AKDTree density threshold")->capture_default_str();
  cmd->add_option("--t2", cfg.t2, "AKDTree/GSP density threshold")->capture_default_str();
  cmd->add_option("--fallback-density", cfg.fallback_density,
                  "finest-level density at which the whole dataset uses the 3D baseline")
      ->capture_default_str();
  cmd->add_option("--eb", cfg.eb, "error bound magnitude")->capture_default_str();
  cmd->add_option("--eb-mode", cfg.eb_mode, "error bound mode: abs or rel")
      ->check(CLI::IsMember({"abs", "rel"}))
      ->capture_default_str();
  cmd->add_option("--level-ratios", cfg.level_ratios,
                  "per-level bound ratios, finest first, e.g. 3:1");
  cmd->add_option("--codec", cfg.codec, "codec: lorenzo or lossless-ref")
      ->check(CLI::IsMember({"lorenzo", "lossless-ref"}))
      ->capture_default_str();
  cmd->add_option("--strategy", cfg.strategy,
                  "auto (density policy) or one of opst,akdtree,gsp,nast,zf,1d,3d")
      ->check(CLI::IsMember({"auto", "opst", "akdtree", "gsp", "nast", "zf", "1d", "3d"}))
      ->capture_default_str();
  cmd->add_option("--gsp-x", cfg.gsp_x, "ghost-shell pad layers")->capture_default_str();
  cmd->add_option("--gsp-y", cfg.gsp_y, "ghost-shell averaged slices")->capture_default_str();
}

int32_t strategy_code(const std::string &name) {
  if (name == "auto") return TAC_STRATEGY_AUTO;
  if (name == "opst") return TAC_STRATEGY_OPST;
  if (name == "akdtree") return TAC_STRATEGY_AKDTREE;
  if (name == "gsp") return TAC_STRATEGY_GSP;
  if (name == "zf") return TAC_STRATEGY_ZF;
  if (name == "nast") return TAC_STRATEGY_NAST;
  if (name == "1d") return TAC_STRATEGY_1D;
  if (name == "3d") return TAC_STRATEGY_3D;
  throw CLI::ValidationError("strategy", "unknown strategy " + name);
}

std::vector<double> parse_ratios(const std::string &text) {
  std::vector<double> out;
  if (text.empty()) return out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t sep = text.find(':', start);
    if (sep == std::string::npos) sep = text.size();
    out.push_back(std::stod(text.substr(start, sep - start)));
    start = sep + 1;
  }
  return out;
}

tac_options make_options(const ConfigFlags &cfg, std::vector<double> &ratio_storage) {
  tac_options opts;
  tac_options_defaults(&opts);
  opts.t1 = cfg.t1;
  opts.t2 = cfg.t2;
  opts.fallback_density = cfg.fallback_density;
  opts.eb = cfg.eb;
  opts.eb_mode = cfg.eb_mode == "abs" ? TAC_EB_ABS : TAC_EB_REL;
  ratio_storage = parse_ratios(cfg.level_ratios);
  if (!ratio_storage.empty()) {
    opts.level_ratios = ratio_storage.data();
    opts.level_ratios_len = static_cast<int32_t>(ratio_storage.size());
  }
  opts.codec = cfg.codec == "lossless-ref" ? TAC_CODEC_LOSSLESS_REF : TAC_CODEC_LORENZO;
  opts.strategy = strategy_code(cfg.strategy);
  opts.gsp_x_layers = cfg.gsp_x;
  opts.gsp_y_slices = cfg.gsp_y;
  return opts;
}

[[noreturn]] void die(const std::string &context, tac_status status) {
  std::fprintf(stderr, "tac: %s: %s (%s)\n", context.c_str(), tac_last_error(),
               tac_status_name(status));
  std::exit(1);
}

void check(tac_status status, const std::string &context) {
  if (status != TAC_OK) die(context, status);
}

std::vector<double> split_list(const std::string &text) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    size_t sep = text.find(',', start);
    if (sep == std::string::npos) sep = text.size();
    out.push_back(std::stod(text.substr(start, sep - start)));
    start = sep + 1;
  }
  return out;
}

bool is_archive(const std::string &path) {
  FILE *f = std::fopen(path.c_str(), "rb");
  if (!f) return false;
  char magic[4] = {0, 0, 0, 0};
  const size_t got = std::fread(magic, 1, 4, f);
  std::fclose(f);
  return got == 4 && std::memcmp(magic, "TAC1", 4) == 0;
}

void print_dataset_summary(tac_dataset *ds) {
  std::printf("dataset: %d levels, finest side %d, unit block %d, %d-bit values\n",
              tac_dataset_levels(ds), tac_dataset_finest_side(ds), tac_dataset_unit_block(ds),
              tac_dataset_value_bits(ds));
  std::printf("defined values: %" PRId64 "\n", tac_dataset_defined_values(ds));
  for (int32_t i = 0; i < tac_dataset_levels(ds); ++i) {
    int32_t side = 0;
    double density = 0.0;
    check(tac_dataset_level_side(ds, i, &side), "level side");
    check(tac_dataset_level_density(ds, i, &density), "level density");
    std::printf("level %d: side %d, density %.4f\n", i, side, density);
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"error-bounded lossy compression for 3D AMR datasets"};
  app.require_subcommand(1);

  // generate
  auto *gen = app.add_subcommand("generate", "create a synthetic AMR dataset");
  struct {
    std::string out;
    uint64_t seed = 1;
    int levels = 2;
    int finest_side = 64;
    int unit_block = 16;
    int value_bits = 32;
    double finest_density = 0.25;
    double smoothness = 2.0;
    double vmin = 0.0;
    double vmax = 1.0;
  } g;
  gen->add_option("--out", g.out, "output dataset directory")->required();
  gen->add_option("--seed", g.seed, "random seed")->capture_default_str();
  gen->add_option("--levels", g.levels, "number of refinement levels")->capture_default_str();
  gen->add_option("--finest-side", g.finest_side, "cells per dimension at the finest level")
      ->capture_default_str();
  gen->add_option("--unit-block", g.unit_block, "unit block side in cells")->capture_default_str();
  gen->add_option("--value-bits", g.value_bits, "stored precision: 32 or 64")
      ->check(CLI::IsMember({32, 64}))
      ->capture_default_str();
  gen->add_option("--finest-density", g.finest_density, "target finest-level density")
      ->capture_default_str();
  gen->add_option("--smoothness", g.smoothness, "field smoothing radius in cells")
      ->capture_default_str();
  gen->add_option("--vmin", g.vmin, "minimum field value")->capture_default_str();
  gen->add_option("--vmax", g.vmax, "maximum field value")->capture_default_str();

  // compress
  auto *com = app.add_subcommand("compress", "compress a dataset into an archive");
  struct {
    std::string input, output;
  } c;
  com->add_option("--input", c.input, "dataset directory or descriptor")->required();
  com->add_option("--output", c.output, "archive file")->required();
  ConfigFlags com_cfg;
  add_config_flags(com, com_cfg);

  // decompress
  auto *dec = app.add_subcommand("decompress", "reconstruct a dataset from an archive");
  struct {
    std::string input, output;
  } d;
  dec->add_option("--input", d.input, "archive file")->required();
  dec->add_option("--output", d.output, "output dataset directory")->required();

  // bench
  auto *ben = app.add_subcommand("bench", "error-bound sweep producing a rate-distortion CSV");
  struct {
    std::string input, out;
    std::string ebs = "1e-2,1e-3,1e-4";
    std::string strategies = "auto,1d,3d";
  } b;
  ben->add_option("--input", b.input, "dataset directory or descriptor")->required();
  ben->add_option("--out", b.out, "output CSV path")->required();
  ben->add_option("--ebs", b.ebs, "comma-separated bound magnitudes")->capture_default_str();
  ben->add_option("--strategies", b.strategies, "comma-separated strategy list")
      ->capture_default_str();
  ConfigFlags ben_cfg;
  add_config_flags(ben, ben_cfg);

  // analyze
  auto *ana = app.add_subcommand("analyze", "power spectrum + halo comparison of two datasets");
  struct {
    std::string original, decompressed, ps_out, halo_out;
    int k_max = 10;
    double threshold_factor = 81.66;
    int min_cells = 8;
  } a;
  ana->add_option("--original", a.original, "original dataset")->required();
  ana->add_option("--decompressed", a.decompressed, "decompressed dataset")->required();
  ana->add_option("--ps-out", a.ps_out, "power spectrum CSV")->required();
  ana->add_option("--halo-out", a.halo_out, "halo summary CSV")->required();
  ana->add_option("--kmax", a.k_max, "spectrum comparison limit")->capture_default_str();
  ana->add_option("--threshold-factor", a.threshold_factor,
                  "halo candidate threshold as a multiple of the mean")
      ->capture_default_str();
  ana->add_option("--min-cells", a.min_cells, "minimum cells per halo")->capture_default_str();

  // inspect
  auto *ins = app.add_subcommand("inspect", "summarize a dataset or archive");
  std::string inspect_path;
  ins->add_option("--input", inspect_path, "dataset directory/descriptor or archive file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    tac_gen_spec spec;
    tac_gen_spec_defaults(&spec);
    spec.seed = g.seed;
    spec.finest_side = g.finest_side;
    spec.num_levels = g.levels;
    spec.unit_block_size = g.unit_block;
    spec.value_bits = g.value_bits;
    spec.target_finest_density = g.finest_density;
    spec.smoothness = g.smoothness;
    spec.value_min = g.vmin;
    spec.value_max = g.vmax;
    tac_dataset *ds = nullptr;
    std::vector<double> densities(static_cast<size_t>(g.levels), 0.0);
    check(tac_generate(&spec, &ds, densities.data()), "generate");
    check(tac_dataset_save(ds, g.out.c_str()), "save dataset");
    std::printf("generated %d levels into %s\n", g.levels, g.out.c_str());
    for (int i = 0; i < g.levels; ++i) std::printf("level %d density %.4f\n", i, densities[i]);
    tac_dataset_free(ds);
    return 0;
  }

  if (com->parsed()) {
    tac_dataset *ds = nullptr;
    check(tac_dataset_load(c.input.c_str(), &ds), "load dataset");
    std::vector<double> ratios;
    const tac_options opts = make_options(com_cfg, ratios);
    tac_stats stats{};
    check(tac_compress_file(ds, &opts, c.output.c_str(), &stats), "compress");
    const int64_t raw =
        tac_dataset_defined_values(ds) * (tac_dataset_value_bits(ds) / 8);
    std::printf("wrote %s: %" PRId64 " bytes (ratio %.2f, pre %.3fs, enc %.3fs)\n",
                c.output.c_str(), stats.archive_bytes,
                double(raw) / double(stats.archive_bytes), stats.preprocess_seconds,
                stats.encode_seconds);
    tac_dataset_free(ds);
    return 0;
  }

  if (dec->parsed()) {
    tac_dataset *ds = nullptr;
    tac_stats stats{};
    check(tac_decompress_file(d.input.c_str(), &ds, &stats), "decompress");
    check(tac_dataset_save(ds, d.output.c_str()), "save dataset");
    std::printf("decompressed %s into %s (dec %.3fs)\n", d.input.c_str(), d.output.c_str(),
                stats.decode_seconds);
    tac_dataset_free(ds);
    return 0;
  }

  if (ben->parsed()) {
    tac_dataset *ds = nullptr;
    check(tac_dataset_load(b.input.c_str(), &ds), "load dataset");
    std::vector<double> ratios;
    const tac_options opts = make_options(ben_cfg, ratios);
    const std::vector<double> ebs = split_list(b.ebs);
    std::vector<int32_t> strategies;
    {
      size_t start = 0;
      while (start <= b.strategies.size() && !b.strategies.empty()) {
        size_t sep = b.strategies.find(',', start);
        if (sep == std::string::npos) sep = b.strategies.size();
        strategies.push_back(strategy_code(b.strategies.substr(start, sep - start)));
        start = sep + 1;
      }
    }
    check(tac_bench(ds, &opts, ebs.data(), static_cast<int32_t>(ebs.size()), strategies.data(),
                    static_cast<int32_t>(strategies.size()), b.out.c_str()),
          "bench");
    std::printf("bench CSV written to %s\n", b.out.c_str());
    tac_dataset_free(ds);
    return 0;
  }

  if (ana->parsed()) {
    tac_dataset *orig = nullptr, *decomp = nullptr;
    check(tac_dataset_load(a.original.c_str(), &orig), "load original");
    check(tac_dataset_load(a.decompressed.c_str(), &decomp), "load decompressed");
    double ps_err = 0.0, mass_diff = 0.0;
    int64_t cell_diff = 0;
    check(tac_analyze(orig, decomp, a.k_max, a.threshold_factor, a.min_cells, a.ps_out.c_str(),
                      a.halo_out.c_str(), &ps_err, &mass_diff, &cell_diff),
          "analyze");
    std::printf("max relative power spectrum error (k < %d): %.6g\n", a.k_max, ps_err);
    std::printf("biggest halo: rel mass diff %.6g, cell count diff %" PRId64 "\n", mass_diff,
                cell_diff);
    tac_dataset_free(orig);
    tac_dataset_free(decomp);
    return 0;
  }

  if (ins->parsed()) {
    if (is_archive(inspect_path)) {
      int32_t levels = 0, records = 0;
      check(tac_archive_levels(inspect_path.c_str(), &levels, &records), "inspect archive");
      std::printf("archive: %d levels, %d records\n", levels, records);
      for (int32_t i = 0; i < records; ++i) {
        char tag[16] = {0};
        double bound = 0.0;
        int64_t meta = 0, payload = 0;
        check(tac_archive_record(inspect_path.c_str(), i, tag, sizeof tag, &bound, &meta,
                                 &payload),
              "inspect record");
        std::printf("record %d: strategy %s, bound %.6g, metadata %" PRId64
                    " B, payload %" PRId64 " B\n",
                    i, tag, bound, meta, payload);
      }
    } else {
      tac_dataset *ds = nullptr;
      check(tac_dataset_load(inspect_path.c_str(), &ds), "load dataset");
      print_dataset_summary(ds);
      tac_dataset_free(ds);
    }
    return 0;
  }

  return 0;
}

#ifndef TAC_METRICS_HPP
#define TAC_METRICS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tac/common.hpp"

namespace tac {

// PSNR over the original's value range; +infinity for identical inputs,
// error when the original is constant but the error is not zero.
double psnr(std::span<const double> original, std::span<const double> decompressed);

struct PowerSpectrum {
  int k_max = 0;
  std::vector<double> p_of_k; // bin k at index k-1, k = 1..k_max

  double at(int k) const { return p_of_k[k - 1]; }
};

// Radially binned squared DFT magnitudes of a cubic power-of-two field.
// Frequencies are mapped to signed wavenumbers and binned by nearest-integer
// magnitude; the DC bin is excluded.
PowerSpectrum power_spectrum(std::span<const double> field, int side, int k_max);

// Max relative error over bins k < k_max, skipping bins where the reference
// power is zero.
double power_spectrum_error(const PowerSpectrum &reference, const PowerSpectrum &candidate,
                            int k_max);

struct Halo {
  double center_of_mass[3] = {0, 0, 0}; // cells, mass-weighted
  int64_t cell_count = 0;
  double mass = 0.0;
  int64_t min_cell_index = 0; // deterministic tie-break key
};

inline constexpr double kDefaultHaloThresholdFactor = 81.66;
inline constexpr int kDefaultHaloMinCells = 8;

// Cells >= threshold_factor * mean form candidates; 6-connected components
// with at least min_cells cells become halos, sorted by mass descending.
std::vector<Halo> halo_find(std::span<const double> field, int side,
                            double threshold_factor = kDefaultHaloThresholdFactor,
                            int min_cells = kDefaultHaloMinCells);

struct HaloDiff {
  double rel_mass_diff = 0.0;
  int64_t cell_count_diff = 0;
};

// Compares the biggest (highest-mass) halo of each list.
HaloDiff halo_compare(const std::vector<Halo> &reference, const std::vector<Halo> &candidate);

// In-place radix-2 complex FFT helpers, exposed for the spectrum tests.
namespace fft {
void transform_3d(std::vector<double> &re, std::vector<double> &im, int side);
}

} // namespace tac

#endif

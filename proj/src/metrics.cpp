#include "tac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tac {

double psnr(std::span<const double> original, std::span<const double> decompressed) {
  if (original.size() != decompressed.size() || original.empty())
    fail(ErrorCode::invalid_argument, "psnr requires equal non-empty shapes");
  double lo = original[0], hi = original[0];
  double sq = 0.0;
  for (size_t i = 0; i < original.size(); ++i) {
    lo = std::min(lo, original[i]);
    hi = std::max(hi, original[i]);
    const double e = original[i] - decompressed[i];
    sq += e * e;
  }
  if (sq == 0.0) return std::numeric_limits<double>::infinity();
  const double range = hi - lo;
  if (range == 0.0)
    fail(ErrorCode::invalid_argument, "psnr undefined for a constant original with error");
  const double mse = sq / static_cast<double>(original.size());
  return 20.0 * std::log10(range) - 10.0 * std::log10(mse);
}

namespace fft {

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey on strided lines.
void transform_line(double *re, double *im, int n, int64_t stride) {
  // Bit-reversal permutation.
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i * stride], re[j * stride]);
      std::swap(im[i * stride], im[j * stride]);
    }
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / len;
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (int i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (int k = 0; k < len / 2; ++k) {
        double *ar = &re[(i + k) * stride], *ai = &im[(i + k) * stride];
        double *br = &re[(i + k + len / 2) * stride], *bi = &im[(i + k + len / 2) * stride];
        const double tr = *br * cr - *bi * ci;
        const double ti = *br * ci + *bi * cr;
        *br = *ar - tr;
        *bi = *ai - ti;
        *ar += tr;
        *ai += ti;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

} // namespace

void transform_3d(std::vector<double> &re, std::vector<double> &im, int side) {
  if (!is_pow2(side)) fail(ErrorCode::invalid_argument, "fft side must be a power of two");
  const int64_t n = static_cast<int64_t>(side) * side * side;
  if (static_cast<int64_t>(re.size()) != n || im.size() != re.size())
    fail(ErrorCode::invalid_argument, "fft buffer sizes do not match side^3");
  // x lines
  for (int z = 0; z < side; ++z)
    for (int y = 0; y < side; ++y) {
      const int64_t off = (static_cast<int64_t>(z) * side + y) * side;
      transform_line(re.data() + off, im.data() + off, side, 1);
    }
  // y lines
  for (int z = 0; z < side; ++z)
    for (int x = 0; x < side; ++x) {
      const int64_t off = static_cast<int64_t>(z) * side * side + x;
      transform_line(re.data() + off, im.data() + off, side, side);
    }
  // z lines
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const int64_t off = static_cast<int64_t>(y) * side + x;
      transform_line(re.data() + off, im.data() + off, side, static_cast<int64_t>(side) * side);
    }
}

} // namespace fft

PowerSpectrum power_spectrum(std::span<const double> field, int side, int k_max) {
  if (side < 1 || (side & (side - 1)) != 0)
    fail(ErrorCode::invalid_argument, "power spectrum requires a power-of-two side");
  if (static_cast<int64_t>(field.size()) != static_cast<int64_t>(side) * side * side)
    fail(ErrorCode::invalid_argument, "field size does not match side^3");
  if (k_max < 1) fail(ErrorCode::invalid_argument, "k_max must be >= 1");

  std::vector<double> re(field.begin(), field.end());
  std::vector<double> im(field.size(), 0.0);
  fft::transform_3d(re, im, side);

  PowerSpectrum ps;
  ps.k_max = k_max;
  ps.p_of_k.assign(k_max, 0.0);
  std::vector<int64_t> counts(k_max, 0);

  auto signed_freq = [side](int f) { return f <= side / 2 ? f : f - side; };
  for (int z = 0; z < side; ++z)
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) {
        const int kx = signed_freq(x), ky = signed_freq(y), kz = signed_freq(z);
        const double mag = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
        const int bin = static_cast<int>(std::llround(mag));
        if (bin < 1 || bin > k_max) continue; // DC excluded
        const int64_t i = (static_cast<int64_t>(z) * side + y) * side + x;
        ps.p_of_k[bin - 1] += re[i] * re[i] + im[i] * im[i];
        counts[bin - 1]++;
      }
  for (int k = 0; k < k_max; ++k)
    if (counts[k] > 0) ps.p_of_k[k] /= static_cast<double>(counts[k]);
  return ps;
}

double power_spectrum_error(const PowerSpectrum &reference, const PowerSpectrum &candidate,
                            int k_max) {
  if (reference.k_max < k_max - 1 || candidate.k_max < k_max - 1 ||
      reference.p_of_k.size() != static_cast<size_t>(reference.k_max) ||
      candidate.p_of_k.size() != static_cast<size_t>(candidate.k_max))
    fail(ErrorCode::invalid_argument, "spectra do not cover the requested bins");
  double worst = 0.0;
  for (int k = 1; k < k_max; ++k) {
    const double p = reference.at(k);
    if (p == 0.0) continue;
    worst = std::max(worst, std::abs(candidate.at(k) - p) / p);
  }
  return worst;
}

std::vector<Halo> halo_find(std::span<const double> field, int side, double threshold_factor,
                            int min_cells) {
  if (static_cast<int64_t>(field.size()) != static_cast<int64_t>(side) * side * side || side < 1)
    fail(ErrorCode::invalid_argument, "field size does not match side^3");
  double mean = 0.0;
  for (double v : field) mean += v;
  mean /= static_cast<double>(field.size());
  if (!(mean > 0.0)) fail(ErrorCode::invalid_argument, "halo finder requires a positive mean");
  const double threshold = threshold_factor * mean;

  const int64_t n = static_cast<int64_t>(field.size());
  std::vector<uint8_t> state(n, 0); // 0 below threshold, 1 candidate, 2 visited
  for (int64_t i = 0; i < n; ++i)
    if (field[i] >= threshold) state[i] = 1;

  std::vector<Halo> halos;
  std::vector<int64_t> queue;
  for (int64_t seed = 0; seed < n; ++seed) {
    if (state[seed] != 1) continue;
    queue.clear();
    queue.push_back(seed);
    state[seed] = 2;
    Halo h;
    h.min_cell_index = seed;
    double cx = 0, cy = 0, cz = 0;
    size_t head = 0;
    while (head < queue.size()) {
      const int64_t i = queue[head++];
      const int x = static_cast<int>(i % side);
      const int y = static_cast<int>((i / side) % side);
      const int z = static_cast<int>(i / (static_cast<int64_t>(side) * side));
      const double m = field[i];
      h.mass += m;
      h.cell_count++;
      cx += m * x;
      cy += m * y;
      cz += m * z;
      const int deltas[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
      for (const auto &d : deltas) {
        const int nx = x + d[0], ny = y + d[1], nz = z + d[2];
        if (nx < 0 || ny < 0 || nz < 0 || nx >= side || ny >= side || nz >= side) continue;
        const int64_t j = (static_cast<int64_t>(nz) * side + ny) * side + nx;
        if (state[j] == 1) {
          state[j] = 2;
          queue.push_back(j);
        }
      }
    }
    if (h.cell_count < min_cells) continue;
    h.center_of_mass[0] = cx / h.mass;
    h.center_of_mass[1] = cy / h.mass;
    h.center_of_mass[2] = cz / h.mass;
    halos.push_back(h);
  }
  std::sort(halos.begin(), halos.end(), [](const Halo &a, const Halo &b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.min_cell_index < b.min_cell_index;
  });
  return halos;
}

HaloDiff halo_compare(const std::vector<Halo> &reference, const std::vector<Halo> &candidate) {
  if (reference.empty() || candidate.empty())
    fail(ErrorCode::invalid_argument, "halo_compare requires non-empty halo lists");
  const Halo &r = reference.front(); // lists are sorted by mass descending
  const Halo &c = candidate.front();
  HaloDiff d;
  d.rel_mass_diff = std::abs(c.mass - r.mass) / r.mass;
  d.cell_count_diff = std::llabs(c.cell_count - r.cell_count);
  return d;
}

} // namespace tac

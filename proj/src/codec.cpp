#include "tac/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "huffman.hpp"
#include "tac/bytes.hpp"

namespace tac {

namespace {

constexpr char kMagic[4] = {'T', 'A', 'C', 'B'};
constexpr uint8_t kVersion = 1;
constexpr int32_t kQuantRadius = 1 << 15; // 2^16 bins centered at zero
constexpr uint16_t kOutlierSymbol = 0;

double snap(double v, ValueType t) {
  return t == ValueType::f32 ? static_cast<double>(static_cast<float>(v)) : v;
}

struct SlabShape {
  int64_t nx = 1, ny = 1, nz = 1;
  int64_t slabs = 1;
};

SlabShape slab_shape(std::span<const int64_t> dims) {
  SlabShape s;
  if (!dims.empty()) s.nx = dims[0];
  if (dims.size() > 1) s.ny = dims[1];
  if (dims.size() > 2) s.nz = dims[2];
  if (dims.size() > 3) s.slabs = dims[3];
  return s;
}

// First-order Lorenzo stencil over previously reconstructed values.
double predict(const std::vector<double> &recon, const SlabShape &s, int64_t base, int64_t x,
               int64_t y, int64_t z) {
  auto r = [&](int64_t dx, int64_t dy, int64_t dz) -> double {
    if (x < dx || y < dy || z < dz) return 0.0;
    return recon[base + ((z - dz) * s.ny + (y - dy)) * s.nx + (x - dx)];
  };
  return r(1, 0, 0) + r(0, 1, 0) + r(0, 0, 1) - r(1, 1, 0) - r(1, 0, 1) - r(0, 1, 1) +
         r(1, 1, 1);
}

} // namespace

double ErrorBound::resolve(std::span<const double> values) const {
  if (mode == ErrorBoundMode::absolute) return magnitude;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (values.empty() || !(hi > lo)) return 0.0;
  return magnitude * (hi - lo);
}

int64_t BlockHeader::value_count() const {
  int64_t n = 1;
  for (int i = 0; i < rank; ++i) n *= dims[i];
  return n;
}

EncodedBlock encode(std::span<const double> values, std::span<const int64_t> dims,
                    const ErrorBound &bound, ValueType value_type, CodecKind codec) {
  if (values.empty()) fail(ErrorCode::invalid_argument, "cannot encode an empty array");
  if (dims.empty() || dims.size() > 4) fail(ErrorCode::invalid_argument, "rank must be 1..4");
  int64_t n = 1;
  for (int64_t d : dims) {
    if (d < 1) fail(ErrorCode::invalid_argument, "dims must be positive");
    n *= d;
  }
  if (n != static_cast<int64_t>(values.size()))
    fail(ErrorCode::invalid_argument, "dims product does not match value count");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "non-finite input value");
  if (codec == CodecKind::lorenzo && !(bound.magnitude > 0.0))
    fail(ErrorCode::invalid_argument, "error bound must be positive");

  const double eb = codec == CodecKind::lorenzo ? bound.resolve(values) : 0.0;

  std::vector<uint16_t> symbols;
  ByteWriter outliers;

  if (codec == CodecKind::lossless_ref) {
    for (double v : values) {
      if (value_type == ValueType::f32)
        outliers.f32(static_cast<float>(v));
      else
        outliers.f64(v);
    }
  } else {
    symbols.reserve(values.size());
    const SlabShape s = slab_shape(dims);
    std::vector<double> recon(values.size());
    const double width = 2.0 * eb;
    int64_t i = 0;
    for (int64_t slab = 0; slab < s.slabs; ++slab) {
      const int64_t base = slab * s.nx * s.ny * s.nz;
      for (int64_t z = 0; z < s.nz; ++z)
        for (int64_t y = 0; y < s.ny; ++y)
          for (int64_t x = 0; x < s.nx; ++x, ++i) {
            const double v = values[i];
            if (x == 0 && y == 0 && z == 0) {
              // No prediction context: each slab opens with a literal that
              // never enters the symbol stream.
              if (value_type == ValueType::f32)
                outliers.f32(static_cast<float>(v));
              else
                outliers.f64(v);
              recon[i] = snap(v, value_type);
              continue;
            }
            const double pred = predict(recon, s, base, x, y, z);
            bool literal = true;
            if (eb > 0.0 && std::isfinite(pred)) {
              const double q = std::round((v - pred) / width);
              if (std::abs(q) < kQuantRadius) {
                const double r = snap(pred + q * width, value_type);
                if (std::abs(v - r) <= eb) {
                  symbols.push_back(static_cast<uint16_t>(static_cast<int32_t>(q) + kQuantRadius));
                  recon[i] = r;
                  literal = false;
                }
              }
            } else if (eb == 0.0 && v == pred) {
              symbols.push_back(kQuantRadius); // q = 0, exact
              recon[i] = v;
              literal = false;
            }
            if (literal) {
              symbols.push_back(kOutlierSymbol);
              if (value_type == ValueType::f32)
                outliers.f32(static_cast<float>(v));
              else
                outliers.f64(v);
              recon[i] = snap(v, value_type);
            }
          }
    }
  }

  huffman::Table table = huffman::build_table(symbols);
  ByteWriter table_bytes;
  if (codec == CodecKind::lorenzo) huffman::write_table(table_bytes, table);
  const std::vector<uint8_t> quant_bits =
      codec == CodecKind::lorenzo ? huffman::encode(symbols, table) : std::vector<uint8_t>{};

  ByteWriter w;
  w.raw(kMagic, 4);
  w.u8(kVersion);
  w.u8(static_cast<uint8_t>(value_type));
  w.u8(static_cast<uint8_t>(dims.size()));
  for (int64_t d : dims) w.u32(static_cast<uint32_t>(d));
  w.f64(eb);
  w.u8(static_cast<uint8_t>(codec));
  w.u32(static_cast<uint32_t>(table_bytes.size()));
  w.u32(static_cast<uint32_t>(quant_bits.size()));
  w.u32(static_cast<uint32_t>(outliers.size()));
  w.raw(table_bytes.bytes().data(), table_bytes.size());
  w.raw(quant_bits.data(), quant_bits.size());
  w.raw(outliers.bytes().data(), outliers.size());

  EncodedBlock block;
  block.bytes = w.take();
  return block;
}

namespace {

BlockHeader parse_header(ByteReader &r) {
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) fail(ErrorCode::format, "bad block magic");
  if (r.u8() != kVersion) fail(ErrorCode::format, "unsupported block version");
  BlockHeader h;
  const uint8_t vt = r.u8();
  if (vt > 1) fail(ErrorCode::format, "unknown value type tag");
  h.value_type = static_cast<ValueType>(vt);
  h.rank = r.u8();
  if (h.rank < 1 || h.rank > 4) fail(ErrorCode::format, "rank out of range");
  for (int i = 0; i < h.rank; ++i) {
    h.dims[i] = r.u32();
    if (h.dims[i] < 1) fail(ErrorCode::format, "non-positive dim");
  }
  h.resolved_bound = r.f64();
  const uint8_t ck = r.u8();
  if (ck > 1) fail(ErrorCode::format, "unknown codec tag");
  h.codec = static_cast<CodecKind>(ck);
  return h;
}

} // namespace

BlockHeader peek_header(const EncodedBlock &block) {
  ByteReader r(block.bytes.data(), block.bytes.size());
  return parse_header(r);
}

std::vector<double> decode(const EncodedBlock &block, BlockHeader *header_out) {
  ByteReader r(block.bytes.data(), block.bytes.size());
  const BlockHeader h = parse_header(r);
  if (header_out) *header_out = h;

  const uint32_t table_len = r.u32();
  const uint32_t quant_len = r.u32();
  const uint32_t outlier_len = r.u32();
  if (r.remaining() != static_cast<size_t>(table_len) + quant_len + outlier_len)
    fail(ErrorCode::format, "stream lengths do not match payload size");

  const int64_t n = h.value_count();
  const int word = value_type_bytes(h.value_type);

  if (h.codec == CodecKind::lossless_ref) {
    if (table_len != 0 || quant_len != 0) fail(ErrorCode::format, "unexpected streams");
    if (static_cast<int64_t>(outlier_len) != n * word)
      fail(ErrorCode::format, "literal stream does not match dims product");
    std::vector<double> out(n);
    for (auto &v : out) v = h.value_type == ValueType::f32 ? r.f32() : r.f64();
    return out;
  }

  huffman::Table table = huffman::read_table(r);
  if (r.pos() != 28 + static_cast<size_t>(h.rank) * 4 + table_len)
    fail(ErrorCode::format, "table length mismatch");
  const SlabShape s = slab_shape(std::span<const int64_t>(h.dims.data(), h.rank));
  const int64_t symbol_count = n - s.slabs; // slab-first cells are literals
  std::vector<uint16_t> symbols =
      huffman::decode(block.bytes.data() + r.pos(), quant_len, table, symbol_count);
  ByteReader outlier_reader(block.bytes.data() + r.pos() + quant_len, outlier_len);

  const double width = 2.0 * h.resolved_bound;
  std::vector<double> out(n);
  int64_t i = 0;
  int64_t next_symbol = 0;
  for (int64_t slab = 0; slab < s.slabs; ++slab) {
    const int64_t base = slab * s.nx * s.ny * s.nz;
    for (int64_t z = 0; z < s.nz; ++z)
      for (int64_t y = 0; y < s.ny; ++y)
        for (int64_t x = 0; x < s.nx; ++x, ++i) {
          if (x == 0 && y == 0 && z == 0) {
            out[i] = h.value_type == ValueType::f32 ? outlier_reader.f32() : outlier_reader.f64();
            continue;
          }
          const uint16_t sym = symbols[next_symbol++];
          if (sym == kOutlierSymbol) {
            out[i] = h.value_type == ValueType::f32 ? outlier_reader.f32() : outlier_reader.f64();
          } else {
            const double pred = predict(out, s, base, x, y, z);
            const double q = static_cast<double>(static_cast<int32_t>(sym) - kQuantRadius);
            out[i] = snap(pred + q * width, h.value_type);
          }
        }
  }
  if (outlier_reader.remaining() != 0) fail(ErrorCode::format, "trailing outlier bytes");
  return out;
}

} // namespace tac

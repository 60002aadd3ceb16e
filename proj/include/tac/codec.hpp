#ifndef TAC_CODEC_HPP
#define TAC_CODEC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "tac/common.hpp"

namespace tac {

enum class ErrorBoundMode : uint8_t { absolute = 0, value_range_relative = 1 };

struct ErrorBound {
  ErrorBoundMode mode = ErrorBoundMode::absolute;
  double magnitude = 0.0;

  // Relative bounds scale with the input's value range; constant inputs
  // resolve to 0, which the codec treats as a lossless request.
  double resolve(std::span<const double> values) const;
};

enum class CodecKind : uint8_t { lossless_ref = 0, lorenzo = 1 };

// Self-describing encoded array. Layout (little-endian):
//   "TACB" | version u8 | value-type u8 | rank u8 | dims u32*rank |
//   resolved bound f64 | predictor u8 | table_len u32 | quant_len u32 |
//   outlier_len u32 | table | quant bits | outlier literals
// Quantization symbol 0 marks an outlier whose literal value follows in the
// outlier stream (4 or 8 bytes per the value type). Each slab's first cell
// has no prediction context and is always a literal, outside the symbol
// stream.
struct EncodedBlock {
  std::vector<uint8_t> bytes;
  size_t size() const { return bytes.size(); }
};

struct BlockHeader {
  ValueType value_type = ValueType::f32;
  int rank = 0;
  std::array<int64_t, 4> dims{1, 1, 1, 1};
  double resolved_bound = 0.0;
  CodecKind codec = CodecKind::lorenzo;
  int64_t value_count() const;
};

// dims are x-fastest; rank 4 arrays are coded as independent 3D slabs that
// share one entropy table. Guarantees max |decoded - original| <= the
// resolved absolute bound (0 means bit-exact for the stored value type).
EncodedBlock encode(std::span<const double> values, std::span<const int64_t> dims,
                    const ErrorBound &bound, ValueType value_type,
                    CodecKind codec = CodecKind::lorenzo);

BlockHeader peek_header(const EncodedBlock &block);
std::vector<double> decode(const EncodedBlock &block, BlockHeader *header_out = nullptr);

} // namespace tac

#endif

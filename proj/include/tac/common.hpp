#ifndef TAC_COMMON_HPP
#define TAC_COMMON_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tac {

enum class ValueType : uint8_t { f32 = 0, f64 = 1 };

inline int value_type_bits(ValueType t) { return t == ValueType::f32 ? 32 : 64; }
inline int value_type_bytes(ValueType t) { return t == ValueType::f32 ? 4 : 8; }

enum class ErrorCode {
  invalid_argument,
  io,
  format,
  structure,
  codec,
  checksum,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &msg) { throw Error(code, msg); }

// Axis tags in fixed priority order; ties in axis selection resolve to the
// lowest enumerator.
enum class Axis : uint8_t { x = 0, y = 1, z = 2 };

using Index3 = std::array<int, 3>;

// Row-major with x fastest: idx = (z * ny + y) * nx + x.
inline int64_t linear_index(const Index3 &dims, int x, int y, int z) {
  return (static_cast<int64_t>(z) * dims[1] + y) * dims[0] + x;
}

inline int64_t cell_count(const Index3 &dims) {
  return static_cast<int64_t>(dims[0]) * dims[1] * dims[2];
}

} // namespace tac

#endif

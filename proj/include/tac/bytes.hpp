#ifndef TAC_BYTES_HPP
#define TAC_BYTES_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "tac/common.hpp"

namespace tac {

// Little-endian byte stream helpers used by the codec block format and the
// archive container. All multi-byte integers are written LSB first regardless
// of host order so files are portable.

class ByteWriter {
public:
  const std::vector<uint8_t> &bytes() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }
  size_t size() const { return buf_.size(); }

  void raw(const void *data, size_t n) {
    const uint8_t *p = static_cast<const uint8_t *>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }

private:
  std::vector<uint8_t> buf_;
};

class ByteReader {
public:
  ByteReader(const uint8_t *data, size_t n) : data_(data), size_(n) {}

  size_t pos() const { return pos_; }
  size_t remaining() const { return size_ - pos_; }

  void raw(void *out, size_t n) {
    need(n);
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  uint16_t u16() {
    need(2);
    uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<uint16_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

private:
  void need(size_t n) const {
    if (pos_ + n > size_) fail(ErrorCode::format, "truncated stream");
  }
  const uint8_t *data_;
  size_t size_;
  size_t pos_ = 0;
};

// CRC-32 (IEEE 802.3 polynomial, reflected), used by the archive container.
uint32_t crc32(const uint8_t *data, size_t n, uint32_t seed = 0);

void write_file_atomic(const std::string &path, const std::vector<uint8_t> &bytes);
std::vector<uint8_t> read_file(const std::string &path);

} // namespace tac

#endif

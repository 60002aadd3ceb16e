#include "tac/bytes.hpp"

#include <array>
#include <cstdio>
#include <filesystem>

namespace tac {

namespace {

std::array<uint32_t, 256> make_crc_table() {
  std::array<uint32_t, 256> table{};
  for (uint32_t i = 0; i < 256; ++i) {
    uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

} // namespace

uint32_t crc32(const uint8_t *data, size_t n, uint32_t seed) {
  static const std::array<uint32_t, 256> table = make_crc_table();
  uint32_t c = seed ^ 0xFFFFFFFFu;
  for (size_t i = 0; i < n; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void write_file_atomic(const std::string &path, const std::vector<uint8_t> &bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::FILE *f = std::fopen(tmp.c_str(), "wb");
    if (!f) fail(ErrorCode::io, "cannot open for writing: " + tmp);
    size_t written = bytes.empty() ? 0 : std::fwrite(bytes.data(), 1, bytes.size(), f);
    int rc = std::fclose(f);
    if (written != bytes.size() || rc != 0) {
      std::remove(tmp.c_str());
      fail(ErrorCode::io, "short write: " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    fail(ErrorCode::io, "cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

std::vector<uint8_t> read_file(const std::string &path) {
  std::FILE *f = std::fopen(path.c_str(), "rb");
  if (!f) fail(ErrorCode::io, "cannot open: " + path);
  std::fseek(f, 0, SEEK_END);
  long size = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<uint8_t> bytes(size > 0 ? static_cast<size_t>(size) : 0);
  size_t got = bytes.empty() ? 0 : std::fread(bytes.data(), 1, bytes.size(), f);
  std::fclose(f);
  if (got != bytes.size()) fail(ErrorCode::io, "short read: " + path);
  return bytes;
}

} // namespace tac

#ifndef TAC_HUFFMAN_HPP
#define TAC_HUFFMAN_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "tac/bytes.hpp"

namespace tac::huffman {

// Canonical Huffman over 16-bit symbols. A single-symbol alphabet uses
// zero-length codes (the decoder replays the symbol from the count alone).
// Table wire format: u32 entry count, then (u16 symbol, u8 length) sorted by
// symbol.

struct Table {
  std::vector<uint16_t> symbols; // present symbols, ascending
  std::vector<uint8_t> lengths;  // parallel to symbols
};

Table build_table(std::span<const uint16_t> data);

void write_table(ByteWriter &w, const Table &table);
Table read_table(ByteReader &r);

std::vector<uint8_t> encode(std::span<const uint16_t> data, const Table &table);
std::vector<uint16_t> decode(const uint8_t *bits, size_t byte_len, const Table &table,
                             size_t symbol_count);

} // namespace tac::huffman

#endif

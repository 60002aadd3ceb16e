#include "huffman.hpp"

#include <algorithm>
#include <queue>

#include "tac/common.hpp"

namespace tac::huffman {

namespace {

constexpr int kMaxCodeLength = 57; // leaves headroom in a 64-bit accumulator

struct CanonicalLayout {
  // Codes assigned by (length, symbol) order.
  std::vector<uint16_t> sorted_symbols;
  std::vector<uint8_t> sorted_lengths;
  std::vector<uint64_t> first_code; // per length 1..max
  std::vector<size_t> first_index;  // offset of each length run in sorted_symbols
  int max_length = 0;
};

CanonicalLayout layout_of(const Table &table) {
  CanonicalLayout lay;
  const size_t n = table.symbols.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (table.lengths[a] != table.lengths[b]) return table.lengths[a] < table.lengths[b];
    return table.symbols[a] < table.symbols[b];
  });
  lay.sorted_symbols.resize(n);
  lay.sorted_lengths.resize(n);
  for (size_t i = 0; i < n; ++i) {
    lay.sorted_symbols[i] = table.symbols[order[i]];
    lay.sorted_lengths[i] = table.lengths[order[i]];
    lay.max_length = std::max<int>(lay.max_length, table.lengths[order[i]]);
  }
  lay.first_code.assign(lay.max_length + 1, 0);
  lay.first_index.assign(lay.max_length + 1, 0);
  uint64_t code = 0;
  int prev_len = 0;
  for (size_t i = 0; i < n; ++i) {
    const int len = lay.sorted_lengths[i];
    if (len == 0) continue; // single-symbol alphabet
    code <<= (len - prev_len);
    if (len != prev_len) {
      lay.first_code[len] = code;
      lay.first_index[len] = i;
      prev_len = len;
    }
    ++code;
  }
  return lay;
}

std::vector<uint64_t> symbol_codes(const CanonicalLayout &lay) {
  std::vector<uint64_t> codes(lay.sorted_symbols.size());
  uint64_t code = 0;
  int prev_len = 0;
  for (size_t i = 0; i < lay.sorted_symbols.size(); ++i) {
    const int len = lay.sorted_lengths[i];
    if (len == 0) continue;
    code <<= (len - prev_len);
    prev_len = len;
    codes[i] = code++;
  }
  return codes;
}

} // namespace

Table build_table(std::span<const uint16_t> data) {
  std::vector<uint64_t> freq(1 << 16, 0);
  for (uint16_t s : data) freq[s]++;

  std::vector<uint16_t> present;
  for (uint32_t s = 0; s < (1u << 16); ++s)
    if (freq[s] > 0) present.push_back(static_cast<uint16_t>(s));

  Table table;
  if (present.empty()) return table;
  table.symbols = present;
  table.lengths.assign(present.size(), 0);
  if (present.size() == 1) return table; // zero-length code

  // Standard Huffman merge with deterministic ties (frequency, creation id).
  struct Node {
    uint64_t freq;
    int32_t left = -1, right = -1;
  };
  std::vector<Node> nodes;
  nodes.reserve(present.size() * 2);
  using Entry = std::pair<uint64_t, int32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (size_t i = 0; i < present.size(); ++i) {
    nodes.push_back({freq[present[i]], -1, -1});
    heap.emplace(nodes.back().freq, static_cast<int32_t>(i));
  }
  while (heap.size() > 1) {
    auto [fa, a] = heap.top();
    heap.pop();
    auto [fb, bidx] = heap.top();
    heap.pop();
    nodes.push_back({fa + fb, a, bidx});
    heap.emplace(fa + fb, static_cast<int32_t>(nodes.size() - 1));
  }

  // Depths by iterative traversal from the root.
  std::vector<std::pair<int32_t, int>> stack{{heap.top().second, 0}};
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node &n = nodes[idx];
    if (n.left < 0) {
      if (depth > kMaxCodeLength) fail(ErrorCode::internal, "huffman code length overflow");
      table.lengths[idx] = static_cast<uint8_t>(depth);
      continue;
    }
    stack.push_back({n.left, depth + 1});
    stack.push_back({n.right, depth + 1});
  }
  return table;
}

void write_table(ByteWriter &w, const Table &table) {
  w.u32(static_cast<uint32_t>(table.symbols.size()));
  for (size_t i = 0; i < table.symbols.size(); ++i) {
    w.u16(table.symbols[i]);
    w.u8(table.lengths[i]);
  }
}

Table read_table(ByteReader &r) {
  const uint32_t n = r.u32();
  if (n > (1u << 16)) fail(ErrorCode::format, "huffman table too large");
  Table table;
  table.symbols.resize(n);
  table.lengths.resize(n);
  uint32_t prev = 0;
  for (uint32_t i = 0; i < n; ++i) {
    table.symbols[i] = r.u16();
    table.lengths[i] = r.u8();
    if (i > 0 && table.symbols[i] <= prev) fail(ErrorCode::format, "huffman table not sorted");
    if (table.lengths[i] > kMaxCodeLength) fail(ErrorCode::format, "huffman code length invalid");
    if (n > 1 && table.lengths[i] == 0) fail(ErrorCode::format, "huffman zero-length code");
    prev = table.symbols[i];
  }
  return table;
}

std::vector<uint8_t> encode(std::span<const uint16_t> data, const Table &table) {
  if (table.symbols.empty()) {
    if (!data.empty()) fail(ErrorCode::internal, "huffman table empty for non-empty data");
    return {};
  }
  const CanonicalLayout lay = layout_of(table);
  if (lay.max_length == 0) return {}; // single symbol, zero bits

  const std::vector<uint64_t> codes = symbol_codes(lay);
  std::vector<uint32_t> code_index(1 << 16, UINT32_MAX);
  for (size_t i = 0; i < lay.sorted_symbols.size(); ++i)
    code_index[lay.sorted_symbols[i]] = static_cast<uint32_t>(i);

  std::vector<uint8_t> out;
  out.reserve(data.size() / 2 + 16);
  uint64_t acc = 0;
  int acc_bits = 0;
  for (uint16_t s : data) {
    const uint32_t i = code_index[s];
    if (i == UINT32_MAX) fail(ErrorCode::internal, "symbol missing from huffman table");
    const int len = lay.sorted_lengths[i];
    acc = (acc << len) | codes[i];
    acc_bits += len;
    while (acc_bits >= 8) {
      out.push_back(static_cast<uint8_t>(acc >> (acc_bits - 8)));
      acc_bits -= 8;
    }
  }
  if (acc_bits > 0) out.push_back(static_cast<uint8_t>(acc << (8 - acc_bits)));
  return out;
}

std::vector<uint16_t> decode(const uint8_t *bits, size_t byte_len, const Table &table,
                             size_t symbol_count) {
  std::vector<uint16_t> out;
  out.reserve(symbol_count);
  if (symbol_count == 0) return out;
  if (table.symbols.empty()) fail(ErrorCode::format, "huffman table empty");

  const CanonicalLayout lay = layout_of(table);
  if (lay.max_length == 0) {
    out.assign(symbol_count, table.symbols[0]);
    return out;
  }

  // Per-length counts for range checks during the bit walk.
  std::vector<size_t> run_len(lay.max_length + 1, 0);
  for (uint8_t l : lay.sorted_lengths) run_len[l]++;

  size_t bitpos = 0;
  const size_t total_bits = byte_len * 8;
  for (size_t n = 0; n < symbol_count; ++n) {
    uint64_t code = 0;
    int len = 0;
    while (true) {
      if (bitpos >= total_bits) fail(ErrorCode::format, "huffman stream exhausted");
      code = (code << 1) | ((bits[bitpos >> 3] >> (7 - (bitpos & 7))) & 1);
      ++bitpos;
      ++len;
      if (len > lay.max_length) fail(ErrorCode::format, "huffman code not found");
      if (run_len[len] > 0 && code >= lay.first_code[len] &&
          code - lay.first_code[len] < run_len[len]) {
        out.push_back(lay.sorted_symbols[lay.first_index[len] + (code - lay.first_code[len])]);
        break;
      }
    }
  }
  return out;
}

} // namespace tac::huffman

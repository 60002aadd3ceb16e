#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tac/amr.hpp"
#include "tac/codec.hpp"

using namespace tac;

namespace {

std::vector<double> smooth_field(int side, uint64_t seed, ValueType vt = ValueType::f32) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::vector<double> field(static_cast<size_t>(side) * side * side);
  for (int z = 0; z < side; ++z)
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x)
        field[(size_t(z) * side + y) * side + x] = canonical_value(
            std::sin(0.21 * x) * std::cos(0.13 * y) + 0.4 * std::sin(0.08 * z) + jitter(rng), vt);
  return field;
}

double max_abs_err(const std::vector<double> &a, const std::vector<double> &b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

} // namespace

TEST_CASE("constant arrays become tiny and stay exactly constant") {
  const std::vector<double> data(size_t(32) * 32 * 32, 7.25);
  const std::array<int64_t, 3> dims{32, 32, 32};
  for (ErrorBoundMode mode : {ErrorBoundMode::absolute, ErrorBoundMode::value_range_relative}) {
    const EncodedBlock block = encode(data, dims, {mode, 1e-3}, ValueType::f32);
    CHECK(block.size() <= data.size() * 4 / 50); // <= 2% of raw
    const std::vector<double> out = decode(block);
    REQUIRE(out.size() == data.size());
    for (size_t i = 1; i < out.size(); ++i) CHECK(out[i] == out[0]);
    CHECK(std::abs(out[0] - 7.25) <= 1e-3);
  }
}

TEST_CASE("a bound wider than the range still bounds the error") {
  const std::vector<double> data = smooth_field(16, 3);
  const std::array<int64_t, 3> dims{16, 16, 16};
  const EncodedBlock block = encode(data, dims, {ErrorBoundMode::absolute, 100.0}, ValueType::f32);
  const std::vector<double> out = decode(block);
  CHECK(max_abs_err(data, out) <= 100.0);
}

TEST_CASE("relative bound 1e-3 holds point-wise on smooth fields") {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    const std::vector<double> data = smooth_field(32, seed);
    const std::array<int64_t, 3> dims{32, 32, 32};
    const ErrorBound bound{ErrorBoundMode::value_range_relative, 1e-3};
    const double resolved = bound.resolve(data);
    const EncodedBlock block = encode(data, dims, bound, ValueType::f32);
    BlockHeader header;
    const std::vector<double> out = decode(block, &header);
    CHECK(header.resolved_bound == doctest::Approx(resolved));
    CHECK(max_abs_err(data, out) <= resolved);
  }
}

TEST_CASE("error bound holds for adversarial and f64 inputs") {
  std::mt19937_64 rng(9);
  SUBCASE("outlier-heavy spikes") {
    std::vector<double> data(4096);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto &v : data) v = unit(rng) < 0.05 ? 1e6 * (unit(rng) - 0.5) : unit(rng);
    for (auto &v : data) v = canonical_value(v, ValueType::f32);
    const std::array<int64_t, 1> dims{4096};
    const ErrorBound bound{ErrorBoundMode::absolute, 1e-4};
    const std::vector<double> out = decode(encode(data, dims, bound, ValueType::f32));
    CHECK(max_abs_err(data, out) <= 1e-4);
  }
  SUBCASE("denormal-scale values") {
    std::vector<double> data(512);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto &v : data) v = unit(rng) * 1e-310;
    const std::array<int64_t, 1> dims{512};
    const ErrorBound bound{ErrorBoundMode::value_range_relative, 1e-2};
    const double resolved = bound.resolve(data);
    const std::vector<double> out = decode(encode(data, dims, bound, ValueType::f64));
    CHECK(max_abs_err(data, out) <= resolved);
  }
  SUBCASE("f64 smooth field") {
    const std::vector<double> data = smooth_field(16, 5, ValueType::f64);
    const std::array<int64_t, 3> dims{16, 16, 16};
    const std::vector<double> out =
        decode(encode(data, dims, {ErrorBoundMode::absolute, 1e-9}, ValueType::f64));
    CHECK(max_abs_err(data, out) <= 1e-9);
  }
}

TEST_CASE("encode rejects bad inputs") {
  const std::array<int64_t, 1> dims{4};
  const std::vector<double> data{1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(encode({}, {}, {ErrorBoundMode::absolute, 1e-3}, ValueType::f32), Error);
  CHECK_THROWS_AS(encode(data, dims, {ErrorBoundMode::absolute, -1.0}, ValueType::f32), Error);
  CHECK_THROWS_AS(encode(data, dims, {ErrorBoundMode::absolute, 0.0}, ValueType::f32), Error);
  const std::vector<double> bad{1.0, std::nan(""), 3.0, 4.0};
  CHECK_THROWS_AS(encode(bad, dims, {ErrorBoundMode::absolute, 1e-3}, ValueType::f32), Error);
  const std::array<int64_t, 2> mismatched{4, 2};
  CHECK_THROWS_AS(encode(data, mismatched, {ErrorBoundMode::absolute, 1e-3}, ValueType::f32),
                  Error);
}

TEST_CASE("decode rejects corrupted blocks") {
  const std::vector<double> data = smooth_field(8, 1);
  const std::array<int64_t, 3> dims{8, 8, 8};
  const EncodedBlock block =
      encode(data, dims, {ErrorBoundMode::absolute, 1e-3}, ValueType::f32);

  SUBCASE("truncated payload") {
    EncodedBlock cut = block;
    cut.bytes.resize(cut.bytes.size() / 2);
    CHECK_THROWS_AS(decode(cut), Error);
  }
  SUBCASE("dims do not match streams") {
    EncodedBlock tampered = block;
    tampered.bytes[7] = 9; // first dim low byte
    CHECK_THROWS_AS(decode(tampered), Error);
  }
  SUBCASE("bad magic") {
    EncodedBlock tampered = block;
    tampered.bytes[0] = 'X';
    CHECK_THROWS_AS(decode(tampered), Error);
  }
}

TEST_CASE("encode is deterministic") {
  const std::vector<double> data = smooth_field(16, 7);
  const std::array<int64_t, 3> dims{16, 16, 16};
  const ErrorBound bound{ErrorBoundMode::value_range_relative, 1e-3};
  const EncodedBlock a = encode(data, dims, bound, ValueType::f32);
  const EncodedBlock b = encode(data, dims, bound, ValueType::f32);
  CHECK(a.bytes == b.bytes);
}

TEST_CASE("bit-rate never grows when the bound widens") {
  const std::vector<double> data = smooth_field(32, 11);
  const std::array<int64_t, 3> dims{32, 32, 32};
  size_t prev = SIZE_MAX;
  for (double eb : {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
    const EncodedBlock block =
        encode(data, dims, {ErrorBoundMode::value_range_relative, eb}, ValueType::f32);
    CHECK(block.size() <= prev);
    prev = block.size();
  }
}

TEST_CASE("rank-4 slabs share a table and round trip") {
  std::vector<double> data;
  for (int s = 0; s < 3; ++s) {
    const auto slab = smooth_field(8, 20 + s);
    data.insert(data.end(), slab.begin(), slab.end());
  }
  const std::array<int64_t, 4> dims{8, 8, 8, 3};
  const ErrorBound bound{ErrorBoundMode::absolute, 1e-3};
  const EncodedBlock block = encode(data, dims, bound, ValueType::f32);
  BlockHeader header;
  const std::vector<double> out = decode(block, &header);
  CHECK(header.rank == 4);
  CHECK(max_abs_err(data, out) <= 1e-3);
}

TEST_CASE("lossless reference codec is bit exact and bound-agnostic") {
  const std::vector<double> data = smooth_field(16, 31);
  const std::array<int64_t, 3> dims{16, 16, 16};
  const EncodedBlock block = encode(data, dims, {ErrorBoundMode::absolute, 0.0}, ValueType::f32,
                                    CodecKind::lossless_ref);
  const std::vector<double> out = decode(block);
  CHECK(out == data);
}

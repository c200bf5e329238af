#pragma once

// Expected LEB128 size of a value drawn uniformly from [0, N], as an exact
// fraction, for comparison with a fixed 4-byte encoding.

#include <compare>
#include <cstdint>
#include <string>

namespace bebop::bench {

/// Always in lowest terms with a positive denominator.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    return static_cast<unsigned __int128>(a.num) * b.den <=> static_cast<unsigned __int128>(b.num) * a.den;
  }
};

Rational make_rational(std::uint64_t num, std::uint64_t den);

/// Bytes needed for v as an unsigned LEB128 varint: 1 for v < 2^7, up to 5.
constexpr unsigned varint_size(std::uint32_t v) noexcept {
  unsigned n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}

/// Sums bucket sizes: values with k bytes number min(N, 2^(7k) - 1) - 2^(7(k-1)) + 1,
/// with v = 0 in the first bucket.
Rational expected_varint_size(std::uint32_t n) noexcept;

/// Smallest N whose expected size exceeds `bytes`, or nullopt-like 0 when no
/// 32-bit N does. Relies on the expectation being nondecreasing in N.
std::uint32_t first_n_exceeding(std::uint64_t bytes) noexcept;

}  // namespace bebop::bench

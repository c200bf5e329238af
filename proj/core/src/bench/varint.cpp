#include "bebop/bench/varint.hpp"

#include <numeric>

namespace bebop::bench {

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational make_rational(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

Rational expected_varint_size(std::uint32_t n) noexcept {
  std::uint64_t total = 0;
  std::uint64_t low = 0;
  for (unsigned k = 1; k <= 5 && low <= n; ++k) {
    const std::uint64_t high = k == 5 ? n : std::min<std::uint64_t>(n, (1ULL << (7 * k)) - 1);
    total += (high - low + 1) * k;
    low = 1ULL << (7 * k);
  }
  return make_rational(total, static_cast<std::uint64_t>(n) + 1);
}

std::uint32_t first_n_exceeding(std::uint64_t bytes) noexcept {
  const Rational target{bytes, 1};
  if (expected_varint_size(UINT32_MAX) <= target) return 0;
  std::uint64_t lo = 0, hi = UINT32_MAX;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (expected_varint_size(static_cast<std::uint32_t>(mid)) > target) hi = mid;
    else lo = mid + 1;
  }
  return static_cast<std::uint32_t>(lo);
}

}  // namespace bebop::bench

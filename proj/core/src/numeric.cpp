#include "ustat/numeric.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ust {

std::optional<uint128> binomial_exact(std::uint64_t n, std::uint64_t k) {
  if (k > n) return uint128{0};
  k = std::min(k, n - k);
  uint128 result = 1;
  // After step i, result == binom(n - k + i, i), so every division is exact.
  // The gcd split keeps the intermediate product as small as possible.
  for (std::uint64_t i = 1; i <= k; ++i) {
    std::uint64_t num = n - k + i;
    std::uint64_t den = i;
    const std::uint64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
    // result is divisible by den here since gcd(num, den) == 1.
    const uint128 reduced = result / den;
    uint128 next;
    if (__builtin_mul_overflow(reduced, static_cast<uint128>(num), &next)) {
      return std::nullopt;
    }
    result = next;
  }
  return result;
}

double binomial(std::uint64_t n, std::uint64_t k) {
  if (auto exact = binomial_exact(n, k)) return static_cast<double>(*exact);
  return std::exp(log_binomial(n, k));
}

double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

bool relative_equal(double a, double b, double tol) noexcept {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace ust

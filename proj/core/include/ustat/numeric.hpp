#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

namespace ust {

// Neumaier's variant of Kahan summation. Kernel sums over binom(n, m) terms
// of mixed sign lose digits with naive accumulation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

__extension__ typedef unsigned __int128 uint128;

// binom(n, k) in exact 128-bit arithmetic, or nullopt if it does not fit.
std::optional<uint128> binomial_exact(std::uint64_t n, std::uint64_t k);

// binom(n, k) as a double: exact integer conversion when it fits in 128 bits,
// otherwise exp(log_binomial).
double binomial(std::uint64_t n, std::uint64_t k);

double log_binomial(std::uint64_t n, std::uint64_t k);

// |a - b| <= tol * max(|a|, |b|); two exact zeros compare equal.
bool relative_equal(double a, double b, double tol) noexcept;

}  // namespace ust

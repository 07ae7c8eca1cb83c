#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ustat/kernel.hpp"
#include "ustat/parallel.hpp"
#include "ustat/point.hpp"

namespace ust::engine {

// 1 <= i_1 < i_2 < ... < i_m <= n (1-based, as an element of Inc^m_n).
class IndexTuple {
 public:
  explicit IndexTuple(std::vector<std::size_t> indices);

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t operator[](std::size_t l) const { return indices_[l]; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }

  friend bool operator==(const IndexTuple&, const IndexTuple&) = default;

 private:
  std::vector<std::size_t> indices_;
};

// Lexicographic stream over Inc^m_n. Yields binom(n, m) tuples; nothing when
// m > n.
//
//   IncreasingTuples tuples(n, m);
//   while (tuples.next()) use(tuples.current());
class IncreasingTuples {
 public:
  IncreasingTuples(std::size_t n, std::size_t m);

  bool next();
  // 1-based indices of the current tuple; valid after next() returned true.
  std::span<const std::size_t> current() const noexcept { return current_; }
  IndexTuple tuple() const { return IndexTuple(current_); }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<std::size_t> current_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<IndexTuple> enumerate_increasing_tuples(std::size_t n, std::size_t m);

// U_{m,n,h} as a function of n.
struct PrefixSeries {
  std::vector<std::size_t> checkpoints;
  std::vector<double> values;
};

class TruncationLevel {
 public:
  explicit TruncationLevel(double r);
  double value() const noexcept { return r_; }

 private:
  double r_;
};

// Kernel (or factor) evaluations needed for an exact U-statistic at size n.
double exact_evaluation_cost(const Kernel& k, std::size_t n);

// Exact U_{m,n,h}: the average of h over Inc^m_n. Product-form kernels use an
// O(n m) recursion; everything else enumerates all binom(n, m) tuples.
// Results are bit-identical for every worker count.
double u_statistic(const SamplePath& path, const Kernel& k, ExecPolicy policy = {});

// U-statistics of the first checkpoints[j] points. One pass over the data:
// adding X_{j} contributes the sum over (m-1)-tuples of earlier points, so the
// total cost equals that of the largest checkpoint alone.
PrefixSeries prefix_u_statistics(const SamplePath& path, const Kernel& k,
                                 std::span<const std::size_t> checkpoints,
                                 ExecPolicy policy = {});

// As prefix_u_statistics but always enumerates tuples, ignoring product form.
PrefixSeries prefix_u_statistics_enumerated(const SamplePath& path, const Kernel& k,
                                            std::span<const std::size_t> checkpoints,
                                            ExecPolicy policy = {});

// (1/n^m) * sum of h over the full grid {1..n}^m.
double v_statistic(const SamplePath& path, const Kernel& k);

// Unnormalized sum of h over grid tuples with at least one repeated index.
double diagonal_sum(const SamplePath& path, const Kernel& k);

// (n^m V - diagonal_sum) / (m! binom(n, m)); equals u_statistic for symmetric h.
double u_from_v_decomposition(const SamplePath& path, const Kernel& k);

// Average of h over B tuples drawn uniformly with replacement from Inc^m_n.
// Kernels with a symmetrization base are evaluated through the base on a
// uniformly permuted copy of each tuple, which has the same expectation.
double incomplete_u_statistic(const SamplePath& path, const Kernel& k, std::size_t samples,
                              std::uint64_t rng_seed);

// phi_R: clamp to [-R, R], with t == R mapped to R.
double truncate_value(double t, TruncationLevel r);

// h_R = phi_R o h. Order and symmetry are preserved.
Kernel truncate_kernel(const Kernel& k, TruncationLevel r);

// (1/binom(n, m+1)) * sum_{j=m+1}^n binom(j-1, m) f_j, where values holds
// f_{m+1}, ..., f_n.
double weighted_average(std::span<const double> values, std::size_t m);

// (1/j) * sum_{i<j} h_R(X_i, X_j), with 1-based j in [2, n].
double d_jR(const SamplePath& path, const Kernel& k2, std::size_t j, TruncationLevel r);

}  // namespace ust::engine

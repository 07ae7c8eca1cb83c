#include "ustat/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ustat/errors.hpp"
#include "ustat/numeric.hpp"
#include "ustat/rng.hpp"

namespace ust::engine {

IndexTuple::IndexTuple(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  if (indices_.empty()) throw DomainError("IndexTuple: must contain at least one index");
  if (indices_.front() < 1) throw DomainError("IndexTuple: indices are 1-based");
  for (std::size_t l = 1; l < indices_.size(); ++l) {
    if (indices_[l] <= indices_[l - 1]) {
      throw DomainError("IndexTuple: indices must be strictly increasing");
    }
  }
}

IncreasingTuples::IncreasingTuples(std::size_t n, std::size_t m) : n_(n), m_(m) {
  if (m_ == 0) throw DomainError("IncreasingTuples: order must be at least 1");
  if (m_ > n_) done_ = true;
}

bool IncreasingTuples::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    current_.resize(m_);
    std::iota(current_.begin(), current_.end(), std::size_t{1});
    return true;
  }
  // Rightmost position that can still move; position l tops out at n - m + 1 + l.
  std::size_t l = m_;
  while (l > 0 && current_[l - 1] == n_ - m_ + l) --l;
  if (l == 0) {
    done_ = true;
    return false;
  }
  ++current_[l - 1];
  for (std::size_t q = l; q < m_; ++q) current_[q] = current_[q - 1] + 1;
  return true;
}

std::vector<IndexTuple> enumerate_increasing_tuples(std::size_t n, std::size_t m) {
  std::vector<IndexTuple> out;
  IncreasingTuples tuples(n, m);
  while (tuples.next()) out.push_back(tuples.tuple());
  return out;
}

TruncationLevel::TruncationLevel(double r) : r_(r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("TruncationLevel: R must be positive and finite");
  }
}

namespace {

void require_order_fits(const SamplePath& path, const Kernel& k, const char* who) {
  if (path.size() < k.order()) {
    throw DomainError(std::string(who) + ": path length " + std::to_string(path.size()) +
                      " is smaller than kernel order " + std::to_string(k.order()));
  }
  if (k.input_dim() != 0 && path.dim() != k.input_dim()) {
    throw DomainError(std::string(who) + ": path dimension " + std::to_string(path.dim()) +
                      " does not match kernel input dimension " +
                      std::to_string(k.input_dim()));
  }
}

void require_checkpoints(std::span<const std::size_t> checkpoints, std::size_t m,
                         std::size_t n) {
  if (checkpoints.empty()) throw DomainError("prefix_u_statistics: no checkpoints");
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    if (c > 0 && checkpoints[c] <= checkpoints[c - 1]) {
      throw DomainError("prefix_u_statistics: checkpoints must be strictly increasing");
    }
    if (checkpoints[c] < m) {
      throw DomainError("prefix_u_statistics: checkpoint smaller than kernel order");
    }
  }
  if (checkpoints.back() > n) {
    throw DomainError("prefix_u_statistics: checkpoint exceeds path length");
  }
}

double require_finite_result(double value, const char* who) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string(who) + ": kernel produced a non-finite value");
  }
  return value;
}

// Sum of h over all tuples whose largest (0-based) index is `last`.
double block_sum(const SamplePath& path, const Kernel& k, std::size_t last) {
  const std::size_t m = k.order();
  std::vector<PointView> args(m);
  args[m - 1] = path.point(last);
  if (m == 1) return k(args);

  const std::size_t free = m - 1;
  std::vector<std::size_t> idx(free);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t l = 0; l < free; ++l) args[l] = path.point(idx[l]);

  CompensatedSum sum;
  for (;;) {
    sum.add(k(args));
    std::size_t l = free;
    while (l > 0 && idx[l - 1] == last - free + l - 1) --l;
    if (l == 0) break;
    ++idx[l - 1];
    args[l - 1] = path.point(idx[l - 1]);
    for (std::size_t q = l; q < free; ++q) {
      idx[q] = idx[q - 1] + 1;
      args[q] = path.point(idx[q]);
    }
  }
  return sum.value();
}

PrefixSeries enumerate_prefix(const SamplePath& path, const Kernel& k,
                              std::span<const std::size_t> checkpoints, ExecPolicy policy) {
  const std::size_t m = k.order();
  const std::size_t n_max = checkpoints.back();
  const std::size_t first = m - 1;
  std::vector<double> blocks(n_max, 0.0);

  // Largest blocks first so dynamic scheduling balances the tail.
  parallel_for(
      n_max - first,
      [&](std::size_t b) {
        const std::size_t last = n_max - 1 - b;
        blocks[last] = block_sum(path, k, last);
      },
      policy);

  PrefixSeries out{{checkpoints.begin(), checkpoints.end()}, {}};
  out.values.reserve(checkpoints.size());
  CompensatedSum total;
  std::size_t c = 0;
  for (std::size_t last = first; last < n_max; ++last) {
    total.add(blocks[last]);
    if (last + 1 == checkpoints[c]) {
      out.values.push_back(
          require_finite_result(total.value() / binomial(last + 1, m), "u_statistic"));
      ++c;
    }
  }
  return out;
}

// For h = prod_l f_l(x_l): level[l] holds the sum over increasing l-tuples of
// the first j points of f_1(x_{i_1}) ... f_l(x_{i_l}).
PrefixSeries product_prefix(const SamplePath& path, const Kernel& k,
                            std::span<const std::size_t> checkpoints) {
  const std::size_t m = k.order();
  const auto& factors = k.factors();
  std::vector<CompensatedSum> level(m + 1);
  level[0].add(1.0);

  PrefixSeries out{{checkpoints.begin(), checkpoints.end()}, {}};
  out.values.reserve(checkpoints.size());
  std::size_t c = 0;
  for (std::size_t j = 0; j < checkpoints.back(); ++j) {
    const PointView x = path.point(j);
    for (std::size_t l = m; l >= 1; --l) {
      const double prev = level[l - 1].value();
      if (prev != 0.0) {
        const double f = factors[l - 1](x);
        if (f != 0.0) level[l].add(f * prev);
      }
    }
    if (j + 1 == checkpoints[c]) {
      out.values.push_back(
          require_finite_result(level[m].value() / binomial(j + 1, m), "u_statistic"));
      ++c;
    }
  }
  return out;
}

// Visits every tuple of {0..n-1}^m.
template <typename Visit>
void for_each_grid_tuple(std::size_t n, std::size_t m, Visit&& visit) {
  std::vector<std::size_t> idx(m, 0);
  for (;;) {
    visit(std::span<const std::size_t>(idx));
    std::size_t l = m;
    while (l > 0 && idx[l - 1] == n - 1) {
      idx[l - 1] = 0;
      --l;
    }
    if (l == 0) return;
    ++idx[l - 1];
  }
}

double factorial(std::size_t m) {
  double f = 1.0;
  for (std::size_t i = 2; i <= m; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

double exact_evaluation_cost(const Kernel& k, std::size_t n) {
  if (!k.factors().empty()) return static_cast<double>(n) * static_cast<double>(k.order());
  return binomial(n, k.order());
}

double u_statistic(const SamplePath& path, const Kernel& k, ExecPolicy policy) {
  require_order_fits(path, k, "u_statistic");
  const std::size_t n = path.size();
  return prefix_u_statistics(path, k, std::span<const std::size_t>(&n, 1), policy).values[0];
}

PrefixSeries prefix_u_statistics(const SamplePath& path, const Kernel& k,
                                 std::span<const std::size_t> checkpoints, ExecPolicy policy) {
  require_order_fits(path, k, "prefix_u_statistics");
  require_checkpoints(checkpoints, k.order(), path.size());
  if (!k.factors().empty()) return product_prefix(path, k, checkpoints);
  return enumerate_prefix(path, k, checkpoints, policy);
}

PrefixSeries prefix_u_statistics_enumerated(const SamplePath& path, const Kernel& k,
                                            std::span<const std::size_t> checkpoints,
                                            ExecPolicy policy) {
  require_order_fits(path, k, "prefix_u_statistics");
  require_checkpoints(checkpoints, k.order(), path.size());
  return enumerate_prefix(path, k, checkpoints, policy);
}

double v_statistic(const SamplePath& path, const Kernel& k) {
  const std::size_t n = path.size();
  const std::size_t m = k.order();
  std::vector<PointView> args(m);
  CompensatedSum sum;
  for_each_grid_tuple(n, m, [&](std::span<const std::size_t> idx) {
    for (std::size_t l = 0; l < m; ++l) args[l] = path.point(idx[l]);
    sum.add(k(args));
  });
  return require_finite_result(sum.value() / std::pow(static_cast<double>(n), m),
                               "v_statistic");
}

double diagonal_sum(const SamplePath& path, const Kernel& k) {
  const std::size_t n = path.size();
  const std::size_t m = k.order();
  std::vector<PointView> args(m);
  std::vector<std::size_t> sorted(m);
  CompensatedSum sum;
  for_each_grid_tuple(n, m, [&](std::span<const std::size_t> idx) {
    std::copy(idx.begin(), idx.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) return;
    for (std::size_t l = 0; l < m; ++l) args[l] = path.point(idx[l]);
    sum.add(k(args));
  });
  return require_finite_result(sum.value(), "diagonal_sum");
}

double u_from_v_decomposition(const SamplePath& path, const Kernel& k) {
  if (!k.symmetric()) {
    throw DomainError("u_from_v_decomposition: requires a symmetric kernel");
  }
  require_order_fits(path, k, "u_from_v_decomposition");
  const std::size_t n = path.size();
  const std::size_t m = k.order();
  const double grid = std::pow(static_cast<double>(n), m);
  const double full = v_statistic(path, k) * grid;
  return (full - diagonal_sum(path, k)) / (factorial(m) * binomial(n, m));
}

double incomplete_u_statistic(const SamplePath& path, const Kernel& k, std::size_t samples,
                              std::uint64_t rng_seed) {
  require_order_fits(path, k, "incomplete_u_statistic");
  if (samples == 0) throw DomainError("incomplete_u_statistic: B must be at least 1");

  const std::size_t n = path.size();
  const std::size_t m = k.order();
  const Evaluator& base = k.symmetrization_base();
  auto engine = rng::make_engine(rng_seed, rng::Stream::incomplete);

  std::vector<std::size_t> idx;
  idx.reserve(m);
  std::vector<PointView> args(m);
  CompensatedSum sum;
  for (std::size_t b = 0; b < samples; ++b) {
    // Floyd's algorithm: a uniformly random m-subset of {0, ..., n-1}.
    idx.clear();
    for (std::size_t j = n - m; j < n; ++j) {
      const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(engine);
      if (std::find(idx.begin(), idx.end(), t) == idx.end()) {
        idx.push_back(t);
      } else {
        idx.push_back(j);
      }
    }
    std::sort(idx.begin(), idx.end());
    if (base) {
      std::shuffle(idx.begin(), idx.end(), engine);
      for (std::size_t l = 0; l < m; ++l) args[l] = path.point(idx[l]);
      sum.add(base(args));
    } else {
      for (std::size_t l = 0; l < m; ++l) args[l] = path.point(idx[l]);
      sum.add(k(args));
    }
  }
  return require_finite_result(sum.value() / static_cast<double>(samples),
                               "incomplete_u_statistic");
}

double truncate_value(double t, TruncationLevel r) {
  const double bound = r.value();
  if (t < -bound) return -bound;
  if (t < bound) return t;
  return bound;
}

Kernel truncate_kernel(const Kernel& k, TruncationLevel r) {
  // Already inside [-R, R]: phi_R is the identity, keep every shortcut.
  if (k.bound() && *k.bound() <= r.value()) return k;

  Evaluator inner = k.evaluator();
  Kernel out(k.name() + "_truncated", k.order(), k.symmetric(),
             [inner, r](KernelArgs args) { return truncate_value(inner(args), r); });
  out.with_input_dim(k.input_dim()).with_bound(r.value());
  return out;
}

double weighted_average(std::span<const double> values, std::size_t m) {
  if (values.empty()) throw DomainError("weighted_average: no values");
  const std::size_t n = m + values.size();
  CompensatedSum sum;
  for (std::size_t j = m + 1; j <= n; ++j) {
    sum.add(binomial(j - 1, m) * values[j - m - 1]);
  }
  return sum.value() / binomial(n, m + 1);
}

double d_jR(const SamplePath& path, const Kernel& k2, std::size_t j, TruncationLevel r) {
  if (k2.order() != 2) throw DomainError("d_jR: kernel must have order 2");
  if (j < 2 || j > path.size()) throw DomainError("d_jR: j must lie in [2, n]");
  std::vector<PointView> args(2);
  args[1] = path.point(j - 1);
  CompensatedSum sum;
  for (std::size_t i = 1; i < j; ++i) {
    args[0] = path.point(i - 1);
    sum.add(truncate_value(k2(args), r));
  }
  return sum.value() / static_cast<double>(j);
}

}  // namespace ust::engine

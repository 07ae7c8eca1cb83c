#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ustat/point.hpp"

namespace ust {

namespace limits {
class RandomMeasureModel;
}

using KernelArgs = std::span<const PointView>;
using Evaluator = std::function<double(KernelArgs)>;
using Factor = std::function<double(PointView)>;

// A closed-form value of the limit integral for one model. `from_box_probabilities`
// marks values assembled from exact box probabilities of an indicator product.
struct LimitValue {
  double value = 0.0;
  bool from_box_probabilities = false;
};

// Returns nullopt when the closed form does not apply to the given model.
using LimitHook = std::function<std::optional<LimitValue>(const limits::RandomMeasureModel&)>;

// An order-m kernel h: S^m -> R. Immutable once built; the evaluator must be
// pure so kernels can be shared across worker threads.
class Kernel {
 public:
  Kernel(std::string name, std::size_t order, bool symmetric, Evaluator evaluator);

  const std::string& name() const noexcept { return name_; }
  std::size_t order() const noexcept { return order_; }
  bool symmetric() const noexcept { return symmetric_; }

  double operator()(KernelArgs args) const { return evaluator_(args); }
  const Evaluator& evaluator() const noexcept { return evaluator_; }

  // Dimension of each argument point; 0 accepts any dimension.
  std::size_t input_dim() const noexcept { return input_dim_; }
  // sup |h| when known.
  const std::optional<double>& bound() const noexcept { return bound_; }
  const LimitHook& analytic_limit() const noexcept { return analytic_limit_; }

  // Non-empty iff h(x_1..x_m) = factors[0](x_1) * ... * factors[m-1](x_m).
  // The engine then sums over increasing tuples with an O(n m) recursion.
  const std::vector<Factor>& factors() const noexcept { return factors_; }

  // When set, h is the average of this function over all m! argument orders.
  // Sampling estimators may evaluate it on a uniformly permuted tuple instead.
  const Evaluator& symmetrization_base() const noexcept { return symmetrization_base_; }

  Kernel& with_name(std::string name);
  Kernel& with_input_dim(std::size_t dim);
  Kernel& with_bound(double bound);
  Kernel& with_analytic_limit(LimitHook hook);
  Kernel& with_factors(std::vector<Factor> factors);
  Kernel& with_symmetrization_base(Evaluator base);
  Kernel& without_analytic_limit();
  Kernel& without_bound();
  Kernel& without_factors();

 private:
  std::string name_;
  std::size_t order_;
  bool symmetric_;
  Evaluator evaluator_;
  std::size_t input_dim_ = 1;
  std::optional<double> bound_;
  LimitHook analytic_limit_;
  std::vector<Factor> factors_;
  Evaluator symmetrization_base_;
};

// Spot check of permutation invariance: draws `trials` random argument tuples
// (standard normal coordinates) and one random non-identity permutation per
// trial, and compares the two evaluations to relative tolerance 1e-12.
bool validate_kernel_symmetry(const Kernel& k, std::size_t trials, std::uint64_t rng_seed);

}  // namespace ust

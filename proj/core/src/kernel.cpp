#include "ustat/kernel.hpp"

#include <algorithm>
#include <numeric>

#include "ustat/errors.hpp"
#include "ustat/numeric.hpp"
#include "ustat/rng.hpp"

namespace ust {

Kernel::Kernel(std::string name, std::size_t order, bool symmetric, Evaluator evaluator)
    : name_(std::move(name)),
      order_(order),
      symmetric_(symmetric),
      evaluator_(std::move(evaluator)) {
  if (order_ == 0) throw DomainError("Kernel: order must be at least 1");
  if (!evaluator_) throw DomainError("Kernel: evaluator must be set");
}

Kernel& Kernel::with_name(std::string name) {
  name_ = std::move(name);
  return *this;
}

Kernel& Kernel::with_input_dim(std::size_t dim) {
  input_dim_ = dim;
  return *this;
}

Kernel& Kernel::with_bound(double bound) {
  if (!(bound >= 0.0)) throw DomainError("Kernel: bound must be non-negative");
  bound_ = bound;
  return *this;
}

Kernel& Kernel::with_analytic_limit(LimitHook hook) {
  analytic_limit_ = std::move(hook);
  return *this;
}

Kernel& Kernel::with_factors(std::vector<Factor> factors) {
  if (factors.size() != order_) throw DomainError("Kernel: need one factor per argument");
  factors_ = std::move(factors);
  return *this;
}

Kernel& Kernel::with_symmetrization_base(Evaluator base) {
  symmetrization_base_ = std::move(base);
  return *this;
}

Kernel& Kernel::without_analytic_limit() {
  analytic_limit_ = nullptr;
  return *this;
}

Kernel& Kernel::without_bound() {
  bound_.reset();
  return *this;
}

Kernel& Kernel::without_factors() {
  factors_.clear();
  return *this;
}

bool validate_kernel_symmetry(const Kernel& k, std::size_t trials, std::uint64_t rng_seed) {
  if (k.order() < 2) throw DomainError("validate_kernel_symmetry: order must be at least 2");
  if (trials == 0) throw DomainError("validate_kernel_symmetry: trials must be at least 1");

  const std::size_t m = k.order();
  const std::size_t d = std::max<std::size_t>(1, k.input_dim());
  auto engine = rng::make_engine(rng_seed, rng::Stream::diagnostic);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> coords(m * d);
  std::vector<PointView> args(m);
  std::vector<PointView> permuted(m);
  std::vector<std::size_t> perm(m);

  for (std::size_t t = 0; t < trials; ++t) {
    for (double& c : coords) c = normal(engine);
    for (std::size_t l = 0; l < m; ++l) args[l] = PointView(coords.data() + l * d, d);
    // Uniform over the non-identity permutations; the identity proves nothing.
    do {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), engine);
    } while (std::is_sorted(perm.begin(), perm.end()));
    for (std::size_t l = 0; l < m; ++l) permuted[l] = args[perm[l]];

    if (!relative_equal(k(args), k(permuted), 1e-12)) return false;
  }
  return true;
}

}  // namespace ust

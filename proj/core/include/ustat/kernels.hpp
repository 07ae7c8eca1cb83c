#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ustat/config.hpp"
#include "ustat/kernel.hpp"
#include "ustat/point.hpp"

namespace ust::kernels {

// Product of half-open intervals [lo, hi) in R^d; infinite bounds allowed.
class Box {
 public:
  explicit Box(std::vector<Interval> intervals);
  static Box whole_space(std::size_t dim);

  std::size_t dim() const noexcept { return intervals_.size(); }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  bool contains(PointView x) const;

  friend bool operator==(const Box& a, const Box& b);

 private:
  std::vector<Interval> intervals_;
};

// h(x1, x2, x3) = sgn(2x1 - x2 - x3) + sgn(2x2 - x1 - x3) + sgn(2x3 - x1 - x2).
// Symmetric, values in {-3, ..., 3}; the limit is 0 under any atomless law
// symmetric about a point.
Kernel symmetry_test_kernel();

// d(z1, z2) - d(z1, z3) - d(z2, z4) + d(z3, z4).
double dcov_f(PointView z1, PointView z2, PointView z3, PointView z4,
              const Metric& metric = euclidean_distance);

// Which y arguments enter the second factor of g.
enum class DcovIndexing {
  displayed,  // f(x1, x2, x3, x4) f(y1, y2, y3, y4)
  standard,   // f(x1, x2, x3, x4) f(y1, y2, y5, y6)
};

// g over six paired points; each point stores x in its first x_dim coordinates.
double dcov_g(KernelArgs pairs, std::size_t x_dim, const Metric& metric = euclidean_distance,
              DcovIndexing indexing = DcovIndexing::displayed);

// Average of dcov_g over all 720 orderings of the six pairs. The pairs are put
// in a canonical order first, so the value is exactly permutation invariant.
double dcov_h(KernelArgs pairs, std::size_t x_dim, const Metric& metric = euclidean_distance,
              DcovIndexing indexing = DcovIndexing::displayed);

// Order-6 symmetric kernel dcov_h on S^2 = R^x_dim x R^y_dim, with dcov_g as its
// symmetrization base. The limit is 0 when x and y are independent under mu_omega.
Kernel dcov_kernel(std::size_t x_dim = 1, std::size_t y_dim = 1,
                   DcovIndexing indexing = DcovIndexing::displayed,
                   Metric metric = euclidean_distance);

// prod_l 1{x_l in boxes[l]}. Symmetric iff all boxes coincide; the limit is
// prod_l mu_omega(boxes[l]).
Kernel indicator_product_kernel(std::vector<Box> boxes);

// prod_l p(x_l) with p(x) = sum_k coefficients[k] x^k; the limit is
// (E_omega p(X))^m.
Kernel polynomial_product_kernel(std::vector<double> coefficients, std::size_t order);

Kernel constant_kernel(double value, std::size_t order);

// Piecewise-constant kernel on the real line: bins [edges[b], edges[b+1]),
// values[b_1 * k^{m-1} + ... + b_m] on the cell (b_1, ..., b_m) and 0 when an
// argument falls outside every bin.
Kernel table_kernel(std::vector<double> edges, std::vector<double> values, std::size_t order);

// Serialized kernel choice: `name` plus string parameters, as found in the
// [kernel] section of an experiment file.
struct KernelSpec {
  std::string name;
  std::map<std::string, std::string> parameters;
};

KernelSpec parse_kernel_spec(const config::Document& doc, const std::string& section = "kernel");

// Registry lookup. Throws ConfigError naming the parameter on bad input and
// listing the registry on an unknown name.
Kernel build_kernel(const KernelSpec& spec);

std::vector<std::string> registered_kernels();

}  // namespace ust::kernels

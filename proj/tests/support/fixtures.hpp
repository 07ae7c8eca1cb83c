#pragma once

// Random paths and kernels shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "ustat/kernel.hpp"
#include "ustat/point.hpp"

namespace fixtures {

inline ust::SamplePath random_path(std::size_t n, std::size_t dim, std::mt19937_64& gen,
                                   double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> data(n * dim);
  for (auto& v : data) v = u(gen);
  return ust::SamplePath(std::move(data), dim);
}

inline oracle::Pts to_points(const ust::SamplePath& path) {
  oracle::Pts out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto p = path.point(i);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

inline oracle::Fn as_oracle_fn(const ust::Kernel& k) {
  return [k](const std::vector<const std::vector<double>*>& args) {
    std::vector<ust::PointView> views;
    for (const auto* a : args) views.emplace_back(*a);
    return k(views);
  };
}

// h(x_1..x_m) = c0 + sum_l a_l x_l + b prod_l x_l + c sin(sum_l w_l x_l):
// generic, non-symmetric, one-dimensional.
inline ust::Kernel random_kernel(std::size_t m, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c0 = u(gen);
  std::vector<double> a(m);
  std::vector<double> w(m);
  for (auto& v : a) v = u(gen);
  for (auto& v : w) v = 3.0 * u(gen);
  const double b = u(gen);
  const double c = u(gen);
  return ust::Kernel("random", m, false, [=](ust::KernelArgs x) {
    double lin = c0;
    double prod = 1.0;
    double phase = 0.0;
    for (std::size_t l = 0; l < x.size(); ++l) {
      lin += a[l] * x[l][0];
      prod *= x[l][0];
      phase += w[l] * x[l][0];
    }
    return lin + b * prod + c * std::sin(phase);
  });
}

// Same family applied to the sorted arguments, so exactly symmetric. The
// offset keeps values away from zero.
inline ust::Kernel random_symmetric_kernel(std::size_t m, std::mt19937_64& gen) {
  const ust::Kernel base = random_kernel(m, gen);
  const double offset = std::uniform_real_distribution<double>(30.0, 40.0)(gen);
  return ust::Kernel("random-symmetric", m, true, [=](ust::KernelArgs x) {
    std::vector<double> sorted;
    for (const auto& p : x) sorted.push_back(p[0]);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> storage = sorted;
    std::vector<ust::PointView> views;
    for (const double& v : storage) views.emplace_back(&v, 1);
    return offset + base(views);
  });
}

}  // namespace fixtures

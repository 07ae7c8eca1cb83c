#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "ustat/errors.hpp"
#include "ustat/kernel.hpp"
#include "ustat/numeric.hpp"
#include "ustat/parallel.hpp"
#include "ustat/point.hpp"
#include "ustat/rng.hpp"

using namespace ust;

TEST(Sign, Convention) {
  EXPECT_EQ(sgn(2.0), Sign::positive);
  EXPECT_EQ(sgn(0.0), Sign::zero);
  EXPECT_EQ(sgn(-0.0), Sign::zero);
  EXPECT_EQ(sgn(-0.5), Sign::negative);
  EXPECT_EQ(sgn(std::numeric_limits<double>::denorm_min()), Sign::positive);
}

TEST(Sign, RejectsNonFinite) {
  EXPECT_THROW(sgn(std::nan("")), DomainError);
  EXPECT_THROW(sgn(INFINITY), DomainError);
}

TEST(Sign, IsOdd) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> z;
  for (int i = 0; i < 1000; ++i) {
    const double t = z(gen);
    EXPECT_EQ(to_int(sgn(-t)), -to_int(sgn(t)));
  }
}

TEST(EuclideanDistance, Examples) {
  const Point o{0.0};
  const Point three{3.0};
  EXPECT_EQ(euclidean_distance(o.view(), o.view()), 0.0);
  EXPECT_EQ(euclidean_distance(o.view(), three.view()), 3.0);
  const Point a{1.0, 2.0};
  const Point b{4.0, 6.0};
  EXPECT_DOUBLE_EQ(euclidean_distance(a.view(), b.view()), 5.0);
}

TEST(EuclideanDistance, DimensionMismatch) {
  const Point a{1.0};
  const Point b{1.0, 2.0};
  EXPECT_THROW(euclidean_distance(a.view(), b.view()), DomainError);
}

TEST(EuclideanDistance, TriangleInequality) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> z;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> a(3), b(3), c(3);
    for (int j = 0; j < 3; ++j) {
      a[j] = z(gen);
      b[j] = z(gen);
      c[j] = z(gen);
    }
    const double ab = euclidean_distance(a, b);
    const double bc = euclidean_distance(b, c);
    const double ac = euclidean_distance(a, c);
    EXPECT_LE(ac, (ab + bc) * (1 + 1e-12));
    EXPECT_EQ(ab, euclidean_distance(b, a));
  }
}

TEST(Point, RejectsNonFinite) {
  EXPECT_THROW(Point({1.0, std::nan("")}), DomainError);
  EXPECT_THROW(Point({INFINITY}), DomainError);
}

TEST(Point, PairParts) {
  const Point p(std::vector<double>{1.0, 2.0, 3.0}, 1);
  ASSERT_EQ(p.x().size(), 1u);
  ASSERT_EQ(p.y().size(), 2u);
  EXPECT_EQ(p.y()[1], 3.0);
}

TEST(SamplePath, Validation) {
  EXPECT_THROW(SamplePath({}, 1), DomainError);
  EXPECT_THROW(SamplePath({1.0, 2.0, 3.0}, 2), DomainError);
  EXPECT_THROW(SamplePath({1.0, NAN}, 1), DomainError);
  EXPECT_THROW(SamplePath::from_points({Point{1.0}, Point{1.0, 2.0}}), DomainError);
}

TEST(SamplePath, PrefixKeepsMetadata) {
  const SamplePath path({1, 2, 3, 4, 5, 6}, 2, 9, 1, "demo");
  const auto head = path.prefix(2);
  EXPECT_EQ(head.size(), 2u);
  EXPECT_EQ(head.dim(), 2u);
  EXPECT_EQ(head.seed(), 9u);
  EXPECT_EQ(head.latent_component(), std::optional<std::size_t>(1));
  EXPECT_EQ(head.point(1)[1], 4.0);
  EXPECT_THROW(path.prefix(0), DomainError);
  EXPECT_THROW(path.prefix(4), DomainError);
}

TEST(Binomial, MatchesPascal) {
  const auto t = oracle::pascal(66);
  for (std::uint64_t n = 0; n <= 66; ++n) {
    for (std::uint64_t k = 0; k <= n + 1; ++k) {
      const auto exact = binomial_exact(n, k);
      ASSERT_TRUE(exact.has_value());
      EXPECT_EQ(static_cast<std::uint64_t>(*exact), oracle::choose(t, n, k)) << n << " " << k;
    }
  }
}

TEST(Binomial, LargeValues) {
  // binom(200, 6) = 82408626300 (the intermediate product overflows 64 bits).
  EXPECT_EQ(static_cast<std::uint64_t>(*binomial_exact(200, 6)), 82408626300ULL);
  EXPECT_EQ(binomial(2000, 3), 1331334000.0);
  EXPECT_FALSE(binomial_exact(200, 100).has_value());
  EXPECT_NEAR(binomial(200, 100) / 9.0548514656103281e58, 1.0, 1e-10);
  EXPECT_NEAR(log_binomial(10, 3), std::log(120.0), 1e-12);
}

TEST(CompensatedSum, RecoversLostDigits) {
  CompensatedSum s;
  s += 1.0;
  for (int i = 0; i < 1000; ++i) s += 1e-16;
  s += -1.0;
  EXPECT_NEAR(s.value(), 1e-13, 1e-26);
}

TEST(RelativeEqual, Semantics) {
  EXPECT_TRUE(relative_equal(0.0, 0.0, 1e-12));
  EXPECT_TRUE(relative_equal(1.0, 1.0 + 1e-13, 1e-12));
  EXPECT_FALSE(relative_equal(1.0, 1.0 + 1e-11, 1e-12));
  EXPECT_FALSE(relative_equal(0.0, 1e-300, 1e-12));
}

TEST(Rng, StreamsAreDistinctAndStable) {
  EXPECT_EQ(rng::derive_seed(1, rng::Stream::path, 0), rng::derive_seed(1, rng::Stream::path, 0));
  EXPECT_NE(rng::derive_seed(1, rng::Stream::path, 0), rng::derive_seed(1, rng::Stream::latent, 0));
  EXPECT_NE(rng::derive_seed(1, rng::Stream::replicate, 0),
            rng::derive_seed(1, rng::Stream::replicate, 1));
  EXPECT_NE(rng::derive_seed(1, rng::Stream::path, 0), rng::derive_seed(2, rng::Stream::path, 0));
}

TEST(Parallel, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, ExecPolicy{threads});
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(
                   10,
                   [](std::size_t i) {
                     if (i == 7) throw std::runtime_error("boom");
                   },
                   ExecPolicy{3}),
               std::runtime_error);
}

TEST(KernelSymmetry, AntisymmetricKernelFails) {
  const Kernel diff("diff", 2, false, [](KernelArgs a) { return a[0][0] - a[1][0]; });
  EXPECT_FALSE(validate_kernel_symmetry(diff, 1, 3));
  EXPECT_FALSE(validate_kernel_symmetry(diff, 100, 4));
}

TEST(KernelSymmetry, SymmetricKernelsPass) {
  const Kernel constant("c", 3, true, [](KernelArgs) { return 2.5; });
  EXPECT_TRUE(validate_kernel_symmetry(constant, 100, 5));
  const Kernel prod("prod", 2, true, [](KernelArgs a) { return a[0][0] * a[1][0]; });
  EXPECT_TRUE(validate_kernel_symmetry(prod, 100, 6));
}

TEST(KernelSymmetry, Preconditions) {
  const Kernel one("id", 1, true, [](KernelArgs a) { return a[0][0]; });
  EXPECT_THROW(validate_kernel_symmetry(one, 10, 1), DomainError);
  const Kernel two("c", 2, true, [](KernelArgs) { return 1.0; });
  EXPECT_THROW(validate_kernel_symmetry(two, 0, 1), DomainError);
}

TEST(Kernel, FactorCountMustMatchOrder) {
  Kernel k("p", 2, true, [](KernelArgs a) { return a[0][0] * a[1][0]; });
  EXPECT_THROW(k.with_factors({[](PointView x) { return x[0]; }}), DomainError);
  EXPECT_THROW(Kernel("zero", 0, true, [](KernelArgs) { return 0.0; }), DomainError);
}

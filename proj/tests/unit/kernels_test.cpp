#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "ustat/config.hpp"
#include "ustat/engine.hpp"
#include "ustat/errors.hpp"
#include "ustat/kernels.hpp"
#include "ustat/limits.hpp"
#include "ustat/numeric.hpp"

using namespace ust;
using namespace ust::kernels;

namespace {

double eval(const Kernel& k, const std::vector<std::vector<double>>& pts) {
  std::vector<PointView> views(pts.begin(), pts.end());
  return k(views);
}

double eval1(const Kernel& k, std::vector<double> xs) {
  std::vector<std::vector<double>> pts;
  for (double x : xs) pts.push_back({x});
  return eval(k, pts);
}

// Six 1-D pairs as 2-D points plus the split x / y lists.
struct Pairs {
  std::vector<std::vector<double>> joined;
  oracle::Pts xs;
  oracle::Pts ys;
};

Pairs random_pairs(std::mt19937_64& gen, std::size_t dx = 1, std::size_t dy = 1) {
  std::normal_distribution<double> z;
  Pairs p;
  for (int i = 0; i < 6; ++i) {
    std::vector<double> x(dx), y(dy);
    for (auto& v : x) v = z(gen);
    for (auto& v : y) v = z(gen);
    std::vector<double> both = x;
    both.insert(both.end(), y.begin(), y.end());
    p.joined.push_back(both);
    p.xs.push_back(x);
    p.ys.push_back(y);
  }
  return p;
}

KernelSpec spec(std::string name, std::map<std::string, std::string> params = {}) {
  return KernelSpec{std::move(name), std::move(params)};
}

}  // namespace

TEST(SymmetryKernel, HandValues) {
  const auto k = symmetry_test_kernel();
  EXPECT_EQ(k.order(), 3u);
  EXPECT_TRUE(k.symmetric());
  EXPECT_EQ(eval1(k, {0, 0, 0}), 0.0);
  EXPECT_EQ(eval1(k, {1, 0, 0}), -1.0);
  std::array<double, 3> x{3, 1, -2};
  const double base = eval1(k, {x[0], x[1], x[2]});
  std::sort(x.begin(), x.end());
  do {
    EXPECT_EQ(eval1(k, {x[0], x[1], x[2]}), base);
  } while (std::next_permutation(x.begin(), x.end()));
}

TEST(SymmetryKernel, BoundedIntegerAndOdd) {
  const auto k = symmetry_test_kernel();
  std::mt19937_64 gen(41);
  std::normal_distribution<double> z;
  for (int i = 0; i < 5000; ++i) {
    const double a = z(gen), b = z(gen), c = z(gen);
    const double v = eval1(k, {a, b, c});
    EXPECT_LE(std::abs(v), 3.0);
    EXPECT_EQ(v, std::round(v));
    EXPECT_EQ(eval1(k, {-a, -b, -c}), -v);
  }
  EXPECT_TRUE(validate_kernel_symmetry(k, 100, 1));
}

TEST(SymmetryKernel, LimitHook) {
  const auto k = symmetry_test_kernel();
  const auto normal = limits::RandomMeasureModel::marginal(processes::Normal{2.0, 3.0});
  ASSERT_TRUE(k.analytic_limit()(normal).has_value());
  EXPECT_EQ(k.analytic_limit()(normal)->value, 0.0);
  const auto skewed = limits::RandomMeasureModel::marginal(processes::Exponential{1.0, 0.0});
  EXPECT_FALSE(k.analytic_limit()(skewed).has_value());
}

TEST(Dcov, FExamples) {
  const std::vector<double> z{0.7, -1.0};
  const std::vector<double> w{2.0, 0.5};
  EXPECT_EQ(dcov_f(z, z, z, z), 0.0);
  const std::vector<double> zero{0.0}, one{1.0};
  EXPECT_EQ(dcov_f(zero, one, zero, one), 2.0);
  EXPECT_EQ(dcov_f(z, w, w, z), 0.0);
  EXPECT_THROW(dcov_f(z, w, zero, z), DomainError);
}

TEST(Dcov, GExamples) {
  std::vector<std::vector<double>> same(6, {0.3, -0.2});
  std::vector<PointView> views(same.begin(), same.end());
  EXPECT_EQ(dcov_g(views, 1), 0.0);

  std::vector<std::vector<double>> flat_x{{1, 0}, {1, 5}, {1, -2}, {1, 3}, {1, 1}, {1, 9}};
  views.assign(flat_x.begin(), flat_x.end());
  EXPECT_EQ(dcov_g(views, 1), 0.0);

  std::vector<std::vector<double>> p{{0, 0}, {1, 1}, {0, 0}, {1, 1}, {5, -3}, {2, 7}};
  views.assign(p.begin(), p.end());
  EXPECT_EQ(dcov_g(views, 1, euclidean_distance, DcovIndexing::displayed), 4.0);
  // Standard indexing pairs y_1, y_2 with y_5, y_6: f(0, 1, -3, 7) = 1 - 3 - 6 + 10.
  EXPECT_EQ(dcov_g(views, 1, euclidean_distance, DcovIndexing::standard), 2.0 * 2.0);
}

TEST(Dcov, GRejectsBadShapes) {
  std::vector<std::vector<double>> five(5, {0.0, 1.0});
  std::vector<PointView> views(five.begin(), five.end());
  EXPECT_THROW(dcov_g(views, 1), DomainError);
  std::vector<std::vector<double>> six(6, {0.0, 1.0});
  views.assign(six.begin(), six.end());
  EXPECT_THROW(dcov_g(views, 2), DomainError);
}

TEST(Dcov, HMatchesHeapPermutationOracle) {
  EXPECT_EQ(oracle::heap_permutations(6).size(), 720u);
  std::mt19937_64 gen(51);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_pairs(gen);
    std::vector<PointView> views(p.joined.begin(), p.joined.end());
    for (auto idx : {DcovIndexing::displayed, DcovIndexing::standard}) {
      const double expected = oracle::dcov_average(p.xs, p.ys, idx == DcovIndexing::standard);
      EXPECT_TRUE(relative_equal(dcov_h(views, 1, euclidean_distance, idx), expected, 1e-12));
    }
  }
}

TEST(Dcov, HMatchesOracleInHigherDimensions) {
  std::mt19937_64 gen(52);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_pairs(gen, 2, 3);
    std::vector<PointView> views(p.joined.begin(), p.joined.end());
    const double expected = oracle::dcov_average(p.xs, p.ys, true);
    EXPECT_TRUE(relative_equal(dcov_h(views, 2, euclidean_distance, DcovIndexing::standard),
                               expected, 1e-12));
  }
}

TEST(Dcov, HIsPermutationInvariant) {
  std::mt19937_64 gen(53);
  const auto k = dcov_kernel(1, 1, DcovIndexing::standard);
  EXPECT_EQ(k.order(), 6u);
  EXPECT_TRUE(k.symmetric());
  EXPECT_EQ(k.input_dim(), 2u);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_pairs(gen);
    const double base = eval(k, p.joined);
    std::shuffle(p.joined.begin(), p.joined.end(), gen);
    EXPECT_TRUE(relative_equal(eval(k, p.joined), base, 1e-12));
  }
  std::vector<std::vector<double>> same(6, {1.5, 2.5});
  EXPECT_EQ(eval(k, same), 0.0);
}

TEST(Dcov, IndependenceHook) {
  const auto k = dcov_kernel();
  const auto x = limits::RandomMeasureModel::marginal(processes::Normal{0.0, 1.0});
  const auto pair = limits::RandomMeasureModel::paired(x, x);
  ASSERT_TRUE(k.analytic_limit()(pair).has_value());
  EXPECT_EQ(k.analytic_limit()(pair)->value, 0.0);
}

TEST(Box, Validation) {
  EXPECT_THROW(Box({Interval{1.0, 1.0}}), DomainError);
  EXPECT_THROW(Box({Interval{2.0, 1.0}}), DomainError);
  EXPECT_THROW(Box(std::vector<Interval>{}), DomainError);
  const Box b({Interval{0.0, 1.0}});
  EXPECT_TRUE(b.contains(std::vector<double>{0.0}));
  EXPECT_FALSE(b.contains(std::vector<double>{1.0}));
}

TEST(IndicatorKernel, Examples) {
  const auto all = indicator_product_kernel({Box::whole_space(1), Box::whole_space(1)});
  EXPECT_TRUE(all.symmetric());
  EXPECT_EQ(eval1(all, {-1e300, 4.0}), 1.0);

  const auto far = indicator_product_kernel({Box({Interval{100.0, 200.0}})});
  EXPECT_EQ(engine::u_statistic(SamplePath::from_values({0.1, 0.2, 0.3}), far), 0.0);

  const auto k = indicator_product_kernel({Box({Interval{0, 1}}), Box({Interval{1, 2}})});
  EXPECT_FALSE(k.symmetric());
  EXPECT_EQ(eval1(k, {0.5, 1.5}), 1.0);
  EXPECT_EQ(eval1(k, {1.5, 0.5}), 0.0);
  EXPECT_THROW(indicator_product_kernel({Box::whole_space(1), Box::whole_space(2)}), DomainError);
}

TEST(IndicatorKernel, ProductStructure) {
  const std::vector<Box> boxes{Box({Interval{-1, 0.5}, Interval{0, 2}}),
                               Box({Interval{0, 1}, Interval{-INFINITY, 0}})};
  const auto k = indicator_product_kernel(boxes);
  std::mt19937_64 gen(61);
  std::normal_distribution<double> z;
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::vector<double>> pts{{z(gen), z(gen)}, {z(gen), z(gen)}};
    const double v = eval(k, pts);
    EXPECT_TRUE(v == 0.0 || v == 1.0);
    const double expected = (boxes[0].contains(pts[0]) ? 1.0 : 0.0) * (boxes[1].contains(pts[1]) ? 1.0 : 0.0);
    EXPECT_EQ(v, expected);
  }
}

TEST(IndicatorKernel, ExactBoxHook) {
  const auto k = indicator_product_kernel({Box({Interval{-INFINITY, 0.0}}), Box({Interval{0.0, 1.0}})});
  const auto model = limits::RandomMeasureModel::marginal(processes::Uniform{-1.0, 3.0});
  const auto v = k.analytic_limit()(model);
  ASSERT_TRUE(v.has_value());
  EXPECT_TRUE(v->from_box_probabilities);
  EXPECT_DOUBLE_EQ(v->value, 0.25 * 0.25);
}

TEST(PolynomialKernel, ValuesAndHook) {
  const auto k = polynomial_product_kernel({1.0, 2.0}, 3);
  EXPECT_DOUBLE_EQ(eval1(k, {0.0, 1.0, -1.0}), 1.0 * 3.0 * -1.0);
  const auto model = limits::RandomMeasureModel::marginal(processes::Normal{3.0, 1.0});
  EXPECT_DOUBLE_EQ(k.analytic_limit()(model)->value, 7.0 * 7.0 * 7.0);
}

TEST(TableKernel, ValuesSymmetryAndHook) {
  // Two bins [0,1) and [1,2); symmetric 2x2 table.
  const auto k = table_kernel({0, 1, 2}, {1, 2, 2, 5}, 2);
  EXPECT_TRUE(k.symmetric());
  EXPECT_EQ(eval1(k, {0.5, 1.5}), 2.0);
  EXPECT_EQ(eval1(k, {1.5, 1.5}), 5.0);
  EXPECT_EQ(eval1(k, {2.5, 0.5}), 0.0);
  const auto model = limits::RandomMeasureModel::marginal(processes::Uniform{0.0, 2.0});
  EXPECT_DOUBLE_EQ(k.analytic_limit()(model)->value, (1 + 2 + 2 + 5) / 4.0);
  EXPECT_FALSE(table_kernel({0, 1, 2}, {1, 2, 3, 5}, 2).symmetric());
  EXPECT_THROW(table_kernel({0, 1, 2}, {1, 2, 3}, 2), DomainError);
  EXPECT_THROW(table_kernel({0, 0}, {1}, 1), DomainError);
}

TEST(Registry, Examples) {
  const auto s3 = build_kernel(spec("symmetry3"));
  EXPECT_EQ(s3.order(), 3u);
  EXPECT_TRUE(s3.symmetric());

  const auto ind = build_kernel(spec("indicator", {{"boxes", "-inf:0 | 0:1"}}));
  EXPECT_EQ(ind.order(), 2u);
  EXPECT_EQ(eval1(ind, {-0.5, 0.5}), 1.0);

  try {
    build_kernel(spec("nope"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown kernel"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("symmetry3"), std::string::npos);
  }
}

TEST(Registry, AllNamesBuild) {
  const std::map<std::string, std::map<std::string, std::string>> params{
      {"indicator", {{"boxes", "0:1"}}},
      {"polynomial-product", {{"coefficients", "0,1"}}},
      {"poly-product", {{"coefficients", "0,1"}}},
      {"user-table", {{"edges", "0,1"}, {"values", "1"}}},
      {"constant", {{"value", "2"}}},
  };
  for (const auto& name : registered_kernels()) {
    auto it = params.find(name);
    EXPECT_NO_THROW(build_kernel(spec(name, it == params.end() ? std::map<std::string, std::string>{} : it->second)))
        << name;
  }
}

TEST(Registry, FieldNamesInErrors) {
  auto field_of = [](const KernelSpec& s) -> std::string {
    try {
      build_kernel(s);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "no error";
  };
  EXPECT_EQ(field_of(spec("indicator")), "kernel.boxes");
  EXPECT_EQ(field_of(spec("indicator", {{"boxes", "1:0"}})), "kernel.boxes");
  EXPECT_EQ(field_of(spec("poly-product", {{"coefficients", "1,x"}})), "kernel.coefficients");
  EXPECT_EQ(field_of(spec("symmetry3", {{"color", "blue"}})), "kernel.color");
  EXPECT_EQ(field_of(spec("dcov6", {{"metric", "cosine"}})), "kernel.metric");
  EXPECT_EQ(field_of(spec("constant", {{"value", "1"}, {"order", "0"}})), "kernel");
}

TEST(Registry, ParsesSection) {
  const auto doc = config::Document::parse_string(
      "[kernel]\nname = dcov6-standard\nx_dim = 2\ny_dim = 1\nmetric = manhattan\n");
  const auto k = build_kernel(parse_kernel_spec(doc));
  EXPECT_EQ(k.order(), 6u);
  EXPECT_EQ(k.input_dim(), 3u);
}

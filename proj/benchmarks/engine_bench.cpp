#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ustat/engine.hpp"
#include "ustat/kernels.hpp"
#include "ustat/processes.hpp"

using namespace ust;

namespace {

SamplePath normal_path(std::size_t n, std::size_t dim = 1) {
  auto spec = processes::make_iid(processes::Normal{0.0, 1.0});
  if (dim == 2) spec = processes::make_paired(spec, spec);
  return processes::simulate(spec, n, 12345);
}

}  // namespace

// Full enumeration over increasing triples.
static void BM_ExactSymmetry3(benchmark::State& state) {
  const auto path = normal_path(static_cast<std::size_t>(state.range(0)));
  const auto k = kernels::symmetry_test_kernel();
  for (auto _ : state) benchmark::DoNotOptimize(engine::u_statistic(path, k));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(engine::exact_evaluation_cost(k, path.size())));
}
BENCHMARK(BM_ExactSymmetry3)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_ExactSymmetry3Threads(benchmark::State& state) {
  const auto path = normal_path(200);
  const auto k = kernels::symmetry_test_kernel();
  const ExecPolicy policy{static_cast<unsigned>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(engine::u_statistic(path, k, policy));
}
BENCHMARK(BM_ExactSymmetry3Threads)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

// Product-form kernels take the O(n m) path.
static void BM_ProductForm(benchmark::State& state) {
  const auto path = normal_path(static_cast<std::size_t>(state.range(0)));
  const auto k = kernels::polynomial_product_kernel({0.0, 1.0}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(engine::u_statistic(path, k));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProductForm)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity(benchmark::oN);

static void BM_PrefixSeriesPairs(benchmark::State& state) {
  const auto path = normal_path(2000);
  const auto k = engine::truncate_kernel(kernels::polynomial_product_kernel({0.0, 1.0}, 2),
                                         engine::TruncationLevel(5.0));
  const std::vector<std::size_t> checkpoints{250, 500, 1000, 2000};
  for (auto _ : state) benchmark::DoNotOptimize(engine::prefix_u_statistics(path, k, checkpoints));
}
BENCHMARK(BM_PrefixSeriesPairs)->Unit(benchmark::kMillisecond);

static void BM_IncompleteSymmetry3(benchmark::State& state) {
  const auto path = normal_path(2000);
  const auto k = kernels::symmetry_test_kernel();
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(engine::incomplete_u_statistic(path, k, samples, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IncompleteSymmetry3)->Arg(10000)->Arg(200000)->Unit(benchmark::kMillisecond);

static void BM_IncompleteDcov(benchmark::State& state) {
  const auto path = normal_path(500, 2);
  const auto k = kernels::dcov_kernel(1, 1, kernels::DcovIndexing::standard);
  for (auto _ : state) benchmark::DoNotOptimize(engine::incomplete_u_statistic(path, k, 200000, 7));
}
BENCHMARK(BM_IncompleteDcov)->Unit(benchmark::kMillisecond);

// One evaluation of the fully symmetrized order-6 kernel.
static void BM_DcovSymmetrized(benchmark::State& state) {
  const auto path = normal_path(6, 2);
  std::vector<PointView> args;
  for (std::size_t i = 0; i < 6; ++i) args.push_back(path.point(i));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dcov_h(args, 1));
}
BENCHMARK(BM_DcovSymmetrized)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();

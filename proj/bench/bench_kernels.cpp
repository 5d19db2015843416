#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>

#include "gencap/compiler.hpp"
#include "gencap/kernels.hpp"
#include "gencap/measures.hpp"
#include "gencap/random.hpp"

using namespace gencap;

namespace {

const ReluNetwork& bench_network() {
  static const ReluNetwork net = [] {
    Rng rng = make_rng(1);
    const NetworkBudget b{22, 8, 3};
    std::vector<double> z{0.0};
    for (std::size_t k = 0; k <= budget_max_breakpoints(b); ++k) z.push_back(z.back() + 0.1 + uniform_open(rng));
    std::vector<std::vector<double>> v(z.size(), std::vector<double>(3));
    for (auto& r : v)
      for (auto& x : r) x = uniform_open(rng);
    return compile_deep(CpwlMap(z, v), b);
  }();
  return net;
}

template <bool Parallel>
void BM_Forward(benchmark::State& state) {
  const auto& net = bench_network();
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng = make_rng(2);
  std::vector<double> zs(n);
  for (auto& z : zs) z = 20.0 * uniform_open(rng);
  std::vector<double> out(n * net.output_dim());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::forward_omp(net, zs, out);
    } else {
      kernels::forward_serial(net, zs, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

template <bool Parallel>
void BM_CostMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = TargetSampler::uniform_cube(3).sample(n, 3);
  const auto b = TargetSampler::uniform_cube(3).sample(200, 4);
  for (auto _ : state) {
    auto c = Parallel ? kernels::cost_matrix_omp(a, b, 1.0) : kernels::cost_matrix_serial(a, b, 1.0);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0) * 200);
}

template <bool Parallel>
void BM_NearestDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto q = TargetSampler::uniform_cube(2).sample(n, 5);
  const auto s = TargetSampler::uniform_cube(2).sample(256, 6);
  for (auto _ : state) {
    auto d = Parallel ? kernels::nearest_distance_omp(q, s) : kernels::nearest_distance_serial(q, s);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

template <bool Parallel>
void BM_BallCounts(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pts = TargetSampler::uniform_cube(2).sample(n, 7);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pts[x][0] < pts[y][0]; });
  for (auto _ : state) {
    auto c = Parallel ? kernels::ball_counts_omp(pts, order, 0.0025) : kernels::ball_counts_serial(pts, order, 0.0025);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

}  // namespace

BENCHMARK(BM_Forward<false>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_Forward<true>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_CostMatrix<false>)->Arg(5000)->Arg(50000);
BENCHMARK(BM_CostMatrix<true>)->Arg(5000)->Arg(50000);
BENCHMARK(BM_NearestDistance<false>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_NearestDistance<true>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_BallCounts<false>)->Arg(5000)->Arg(20000);
BENCHMARK(BM_BallCounts<true>)->Arg(5000)->Arg(20000);

BENCHMARK_MAIN();

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "gencap/compiler.hpp"
#include "gencap/kernels.hpp"
#include "gencap/measures.hpp"
#include "gencap/random.hpp"

using namespace gencap;

namespace {

std::vector<std::size_t> order_by_first(const PointSet& pts) {
  std::vector<std::size_t> o(pts.size());
  std::iota(o.begin(), o.end(), 0);
  std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return pts[a][0] < pts[b][0]; });
  return o;
}

}  // namespace

// The parallel kernels must reproduce the serial reference bit for bit.

TEST(Kernels, ForwardBitIdentical) {
  Rng rng = make_rng(4);
  std::vector<double> z{0.0};
  for (int k = 0; k < 40; ++k) z.push_back(z.back() + 0.1 + uniform_open(rng));
  std::vector<std::vector<double>> v(z.size(), std::vector<double>(3));
  for (auto& r : v)
    for (auto& x : r) x = uniform_open(rng);
  auto net = compile_deep(CpwlMap(z, v), {22, 8, 3});
  std::vector<double> zs(5000);
  for (auto& x : zs) x = 45.0 * uniform_open(rng) - 2.0;
  std::vector<double> a(zs.size() * 3), b(zs.size() * 3);
  kernels::forward_serial(net, zs, a);
  kernels::forward_omp(net, zs, b);
  EXPECT_EQ(a, b);
  EXPECT_EQ(net.eval_batch(zs).coords(), a);
}

TEST(Kernels, CostMatrixBitIdentical) {
  auto a = TargetSampler::gaussian(3).sample(300, 1);
  auto b = TargetSampler::gaussian(3).sample(200, 2);
  for (double p : {1.0, 2.0, 1.5}) {
    auto s = kernels::cost_matrix_serial(a, b, p);
    EXPECT_EQ(s, kernels::cost_matrix_omp(a, b, p));
    EXPECT_NEAR(s[5 * 200 + 7], std::pow(distance(a[5], b[7]), p), 1e-12);
  }
}

TEST(Kernels, NearestDistanceBitIdentical) {
  auto q = TargetSampler::uniform_cube(2).sample(2000, 3);
  auto s = TargetSampler::uniform_cube(2).sample(100, 4);
  auto a = kernels::nearest_distance_serial(q, s);
  EXPECT_EQ(a, kernels::nearest_distance_omp(q, s));
  for (std::size_t i = 0; i < 50; ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j < s.size(); ++j) best = std::min(best, distance(q[i], s[j]));
    EXPECT_EQ(a[i], best);
  }
}

TEST(Kernels, BallCountsMatchBruteForce) {
  auto pts = TargetSampler::uniform_cube(2).sample(1500, 5);
  const auto order = order_by_first(pts);
  const double r2 = 0.01;
  auto s = kernels::ball_counts_serial(pts, order, r2);
  EXPECT_EQ(s, kernels::ball_counts_omp(pts, order, r2));
  for (std::size_t i = 0; i < 100; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) c += squared_distance(pts[i], pts[j]) < r2;
    EXPECT_EQ(s[i], c);
  }
  EXPECT_GE(kernels::max_threads(), 1);
}

#include <gtest/gtest.h>

#include <cmath>

#include "gencap/cpwl.hpp"
#include "gencap/error.hpp"
#include "gencap/random.hpp"
#include "oracles.hpp"

using namespace gencap;

namespace {

CpwlMap random_map(Rng& rng, std::size_t interior, std::size_t d) {
  std::vector<double> z{0.0};
  for (std::size_t k = 0; k <= interior; ++k) z.push_back(z.back() + 0.05 + uniform_open(rng));
  std::vector<std::vector<double>> v(z.size(), std::vector<double>(d));
  for (auto& row : v)
    for (auto& x : row) x = 4.0 * uniform_open(rng) - 2.0;
  return CpwlMap(z, v);
}

}  // namespace

TEST(Cpwl, Examples) {
  CpwlMap f({0.0, 1.0}, std::vector<std::vector<double>>{{0.0}, {1.0}});
  EXPECT_EQ(f.eval(0.5)[0], 0.5);
  EXPECT_EQ(f.eval(-7.0)[0], 0.0);
  EXPECT_EQ(f.eval(9.0)[0], 1.0);
  CpwlMap hat({0.0, 1.0, 2.0}, std::vector<std::vector<double>>{{0.0}, {2.0}, {0.0}});
  EXPECT_EQ(hat.eval(1.5)[0], 1.0);
  EXPECT_EQ(hat.breakpoint_count(), 1u);
  EXPECT_EQ(f.breakpoint_count(), 0u);
  EXPECT_TRUE(hat.zero_boundary());
  EXPECT_FALSE(f.zero_boundary());
}

TEST(Cpwl, ConstructionErrors) {
  using V = std::vector<std::vector<double>>;
  EXPECT_THROW(CpwlMap({0.0, 0.0}, V{{0.0}, {1.0}}), Error);
  EXPECT_THROW(CpwlMap({1.0, 0.0}, V{{0.0}, {1.0}}), Error);
  EXPECT_THROW(CpwlMap({0.0, INFINITY}, V{{0.0}, {1.0}}), Error);
  EXPECT_THROW(CpwlMap({0.0, 1.0}, V{{0.0}}), Error);
}

TEST(Cpwl, AffineReparam) {
  using V = std::vector<std::vector<double>>;
  auto g = affine_reparam(CpwlMap({2.0, 4.0}, V{{1.0}, {3.0}}));
  EXPECT_EQ(g.breakpoints(), (std::vector<double>{0.0, 1.0}));
  auto h = affine_reparam(CpwlMap({-1.0, 0.0, 3.0}, V{{1.0}, {3.0}, {0.0}}));
  EXPECT_DOUBLE_EQ(h.breakpoints()[1], 0.25);
  EXPECT_EQ(h.breakpoints().back(), 1.0);

  Rng rng = make_rng(3);
  auto f = random_map(rng, 7, 2);
  auto r = affine_reparam(f);
  const double a = f.breakpoints().front(), b = f.breakpoints().back();
  for (int k = 0; k <= 1000; ++k) {
    const double z = a - 1.0 + (b - a + 2.0) * k / 1000.0;
    auto x = f.eval(z), y = r.eval((z - a) / (b - a));
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(x[i], y[i], 1e-12);
  }
}

TEST(Cpwl, MatchesInterpolationOracle) {
  Rng rng = make_rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_map(rng, 1 + trial, 1 + trial % 3);
    auto rows = f.values().to_rows();
    const double a = f.breakpoints().front() - 1.0, b = f.breakpoints().back() + 1.0;
    for (int k = 0; k <= 2000; ++k) {
      const double z = a + (b - a) * k / 2000.0;
      auto want = oracle::cpwl_eval(f.breakpoints(), rows, z);
      auto got = f.eval(z);
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
  }
}

TEST(Cpwl, ExactAtBreakpointsAndLipschitz) {
  Rng rng = make_rng(8);
  auto f = random_map(rng, 12, 3);
  for (std::size_t j = 0; j < f.breakpoints().size(); ++j) {
    auto v = f.eval(f.breakpoints()[j]);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(v[i], f.value(j)[i]);
  }
  const double lip = f.lipschitz();
  for (int k = 0; k < 2000; ++k) {
    const double z = 14.0 * uniform_open(rng) - 1.0, h = 1e-3 * uniform_open(rng);
    auto x = f.eval(z), y = f.eval(z + h);
    EXPECT_LE(distance(x, y), lip * h * (1 + 1e-9) + 1e-12);
  }
}

TEST(Cpwl, RefineAndPadPreserveFunction) {
  Rng rng = make_rng(12);
  auto f = random_map(rng, 5, 2);
  auto g = f.refine(0.5 * (f.breakpoints()[2] + f.breakpoints()[3]));
  EXPECT_EQ(g.breakpoint_count(), f.breakpoint_count() + 1);
  auto h = pad_breakpoints(f, 40);
  EXPECT_EQ(h.breakpoint_count(), 40u);
  for (int k = 0; k <= 5000; ++k) {
    const double z = -1.0 + (f.breakpoints().back() + 2.0) * k / 5000.0;
    auto a = f.eval(z), b = g.eval(z), c = h.eval(z);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12);
      EXPECT_NEAR(a[i], c[i], 1e-12);
    }
  }
  EXPECT_THROW(f.refine(f.breakpoints()[1]), Error);
}

TEST(Cpwl, BatchEvalMatchesScalar) {
  Rng rng = make_rng(1);
  auto f = random_map(rng, 9, 2);
  std::vector<double> zs;
  for (int k = 0; k < 300; ++k) zs.push_back(12.0 * uniform_open(rng) - 1.0);
  auto batch = f.eval(zs);
  for (std::size_t k = 0; k < zs.size(); ++k) {
    auto v = f.eval(zs[k]);
    EXPECT_EQ(batch[k][0], v[0]);
    EXPECT_EQ(batch[k][1], v[1]);
  }
}

#include <gtest/gtest.h>

#include <cmath>

#include "gencap/error.hpp"
#include "gencap/metrics.hpp"
#include "gencap/quantize.hpp"
#include "oracles.hpp"

using namespace gencap;

namespace {

PointSet line(const std::vector<double>& xs) {
  PointSet p(1);
  for (double x : xs) p.push_back(std::vector<double>{x});
  return p;
}

void check_cover(const PointSet& samples, const CoveringResult& c) {
  std::size_t assigned = 0;
  std::vector<std::size_t> sizes(c.centers.size(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto a = c.assignment[i];
    if (a < 0) continue;
    ++assigned;
    ++sizes[static_cast<std::size_t>(a)];
    EXPECT_LT(distance(samples[i], c.centers[static_cast<std::size_t>(a)]), c.radius);
  }
  EXPECT_EQ(sizes, c.cell_size);
  EXPECT_DOUBLE_EQ(c.covered_mass, static_cast<double>(assigned) / static_cast<double>(samples.size()));
  for (std::size_t k = 0; k < c.centers.size(); ++k) {
    EXPECT_EQ(c.centers[k][0], samples[c.center_index[k]][0]);
  }
}

}  // namespace

TEST(Cover, Examples) {
  auto three = line({0.0, 0.5, 1.0});
  auto c = greedy_cover(three, 0.6);
  EXPECT_EQ(c.centers.size(), 1u);
  EXPECT_EQ(c.center_index[0], 1u);
  EXPECT_EQ(greedy_cover(line({4.0}), 0.1).centers.size(), 1u);
  EXPECT_EQ(greedy_cover(line({0.0, 1.0}), 0.4).centers.size(), 2u);

  std::vector<double> xs(99, 0.0);
  xs.push_back(100.0);
  auto r = robust_cover(line(xs), 1.0, 0.02);
  EXPECT_EQ(r.centers.size(), 1u);
  EXPECT_DOUBLE_EQ(r.covered_mass, 0.99);
  EXPECT_EQ(r.assignment.back(), -1);
}

TEST(Cover, Errors) {
  EXPECT_THROW(greedy_cover(PointSet(2), 1.0), Error);
  EXPECT_THROW(greedy_cover(line({0.0}), 0.0), Error);
  EXPECT_THROW(robust_cover(line({0.0}), 1.0, -0.1), Error);
}

TEST(Cover, InvariantsAndDeltaMonotone) {
  auto pts = TargetSampler::uniform_cube(2).sample(3000, 8);
  auto g = greedy_cover(pts, 0.1);
  check_cover(pts, g);
  EXPECT_EQ(g.covered_mass, 1.0);
  auto r0 = robust_cover(pts, 0.1, 0.0);
  EXPECT_EQ(r0.center_index, g.center_index);
  std::size_t prev = g.centers.size();
  for (double delta : {0.01, 0.05, 0.1, 0.3, 0.6}) {
    auto r = robust_cover(pts, 0.1, delta);
    check_cover(pts, r);
    EXPECT_GE(r.covered_mass, 1.0 - delta);
    EXPECT_LE(r.centers.size(), prev);
    prev = r.centers.size();
  }
}

TEST(Cover, GreedyWithinLogFactorOfOptimum) {
  Rng rng = make_rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<double>> pts(9, std::vector<double>(2));
    for (auto& p : pts)
      for (auto& x : p) x = uniform_open(rng);
    const double eps = 0.2 + 0.3 * uniform_open(rng);
    const std::size_t best = oracle::min_cover_bruteforce(pts, eps);
    const std::size_t greedy = greedy_cover(PointSet::from_rows(pts), eps).centers.size();
    EXPECT_GE(greedy, best);
    // Greedy set cover is within H(9) < 2.83 of optimal.
    EXPECT_LE(static_cast<double>(greedy), 2.83 * static_cast<double>(best));
  }
}

TEST(QuantizeCover, Examples) {
  auto few = line({0.1, 0.4, 0.9});
  auto exact = quantize_cover(few, 5, 1.0, 10.0, 1.0);
  EXPECT_EQ(exact.size(), 3u);
  EXPECT_NEAR(wasserstein_1d(exact, DiscreteMeasure::uniform(few), 1.0), 0.0, 1e-15);

  auto same = line(std::vector<double>(50, 0.3));
  auto one = quantize_cover(same, 4, 1.0, 10.0, 0.3);
  EXPECT_EQ(one.size(), 1u);

  auto xs = TargetSampler::uniform_cube(1).sample(10000, 21);
  auto r = quantize_cover_detailed(xs, 4, 1.0, 1e6, empirical_moment(xs, 1e6));
  EXPECT_LE(r.measure.size(), 4u);
  const double w = wasserstein_1d(DiscreteMeasure::uniform(xs), r.measure, 1.0);
  EXPECT_LE(w, 0.125);
  EXPECT_LE(std::pow(w, 1.0), r.bound * (1 + 1e-12));
}

TEST(QuantizeCover, SupportBoundAndError) {
  auto xs = TargetSampler::uniform_cube(2).sample(4000, 3);
  for (std::size_t n : {2, 5, 17, 64}) {
    auto r = quantize_cover_detailed(xs, n, 1.0, 10.0, empirical_moment(xs, 10.0));
    EXPECT_LE(r.measure.size(), n);
    EXPECT_LE(quantization_error(xs, r.measure, 1.0), r.bound);
  }
  EXPECT_THROW(quantize_cover(xs, 1, 1.0, 10.0, 1.0), Error);
  EXPECT_THROW(quantize_cover(xs, 4, 2.0, 2.0, 1.0), Error);
}

TEST(Shells, RegimeSelection) {
  EXPECT_EQ(select_regime(1.0, 2.0, 2), ShellRegime::Fast);
  EXPECT_EQ(select_regime(1.0, 1.2, 2), ShellRegime::Slow);
  EXPECT_EQ(select_regime(1.0, 1.5, 2), ShellRegime::Slow);
}

TEST(Shells, InsideUnitBallIsSingleShellCover) {
  auto xs = TargetSampler::uniform_sphere(1, 2, 0.9).sample(2000, 5);
  ShellReport rep;
  auto nu = quantize_shells(xs, 16, 1.0, 10.0, empirical_moment(xs, 10.0), &rep);
  EXPECT_LE(nu.size(), 16u);
  EXPECT_EQ(rep.shell_size[0], 2000u);
  for (std::size_t j = 1; j < rep.shell_size.size(); ++j) EXPECT_EQ(rep.shell_size[j], 0u);
  EXPECT_EQ(rep.tail_mass, 0.0);
  EXPECT_EQ(rep.budget[0], 16u);
}

TEST(Shells, HeavyTailsGoToOrigin) {
  auto xs = TargetSampler::gaussian(2).sample(5000, 6);
  for (auto& c : xs.coords()) c *= 6.0;
  ShellReport rep;
  auto nu = quantize_shells(xs, 32, 1.0, 10.0, empirical_moment(xs, 10.0), &rep);
  EXPECT_LE(nu.size(), 32u);
  EXPECT_EQ(rep.regime, ShellRegime::Fast);
  EXPECT_EQ(rep.k, 4u);
  std::size_t total = 0;
  for (std::size_t s : rep.shell_size) total += s;
  EXPECT_NEAR(rep.tail_mass, 1.0 - static_cast<double>(total) / 5000.0, 1e-12);
  if (rep.tail_mass > 0.0) {
    bool has_origin = false;
    for (std::size_t i = 0; i < nu.size(); ++i) has_origin |= norm(nu.atoms()[i]) == 0.0;
    EXPECT_TRUE(has_origin);
  }
  std::size_t budget = 0;
  for (std::size_t b : rep.budget) budget += b;
  EXPECT_LE(budget + (rep.tail_mass > 0 ? 1 : 0), 32u);
}

TEST(Shells, ErrorShrinksWithAtoms) {
  auto xs = TargetSampler::uniform_cube(2).sample(5000, 9);
  const double m = empirical_moment(xs, 10.0);
  double prev = INFINITY;
  for (std::size_t n : {8, 32, 128}) {
    const double w = quantization_error(xs, quantize_shells(xs, n, 1.0, 10.0, m), 1.0);
    EXPECT_LT(w, prev);
    prev = w;
  }
}

TEST(Probe, Examples) {
  auto point = TargetSampler::empirical(PointSet::from_rows({{0.5, 0.5}}));
  EXPECT_EQ(lower_bound_probe(point, 8, 1.0, 1.0, 0.1, 1, {2000, 10.0}).witness_mass, 0.0);

  auto few = PointSet::from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  EXPECT_EQ(lower_bound_probe(few, 5, 1.0, 1.0, 0.1).witness_mass, 0.0);

  auto cube = lower_bound_probe(TargetSampler::uniform_cube(2), 64, 1.0, 1.0, 0.05, 2, {5000, 10.0});
  EXPECT_NEAR(cube.epsilon, 1.0 / 64.0, 1e-15);
  EXPECT_GT(cube.witness_mass, 0.5);
  EXPECT_TRUE(cube.activated);
  EXPECT_LE(cube.atoms, 64u);
}

#include <gtest/gtest.h>

#include <cmath>

#include "gencap/error.hpp"
#include "gencap/metrics.hpp"
#include "gencap/transport.hpp"
#include "oracles.hpp"

using namespace gencap;

namespace {

const SourceDistribution kUnit = SourceDistribution::uniform(0.0, 1.0);

DiscreteMeasure two_point() { return DiscreteMeasure::make({{0.0}, {1.0}}, {0.5, 0.5}); }

DiscreteMeasure random_target(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<std::vector<double>> atoms(n, std::vector<double>(d));
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : atoms[i]) x = 2.0 * uniform_open(rng) - 1.0;
    w[i] = 0.1 + uniform_open(rng);
  }
  return DiscreteMeasure::make(atoms, w);
}

}  // namespace

TEST(Ordering, Examples) {
  auto mu = DiscreteMeasure::make({{0.0}, {10.0}, {1.0}}, {1, 1, 1});
  EXPECT_EQ(order_atoms(mu), (std::vector<std::size_t>{0, 2, 1}));
  EXPECT_EQ(order_atoms(DiscreteMeasure::make({{3.0, 1.0}}, {1.0})), (std::vector<std::size_t>{0}));
  EXPECT_EQ(order_atoms(DiscreteMeasure::make({{2.0, 0.0}, {1.0, 5.0}}, {1, 1})), (std::vector<std::size_t>{1, 0}));
}

TEST(Ordering, IsGreedyNearestNeighbourPath) {
  Rng rng = make_rng(6);
  auto mu = random_target(rng, 25, 2);
  auto ord = order_atoms(mu);
  ASSERT_EQ(ord.size(), 25u);
  std::vector<char> seen(25, 0);
  for (std::size_t k = 0; k < ord.size(); ++k) {
    seen[ord[k]] = 1;
    if (k + 1 == ord.size()) break;
    const double step = distance(mu.atoms()[ord[k]], mu.atoms()[ord[k + 1]]);
    for (std::size_t j = 0; j < 25; ++j)
      if (!seen[j]) EXPECT_LE(step, distance(mu.atoms()[ord[k]], mu.atoms()[j]));
  }
}

TEST(Synthesis, TwoPointExample) {
  auto tm = synthesize_cpwl(make_plan_spec(two_point(), kUnit, 1.0, 0.1));
  const auto& z = tm.map.breakpoints();
  ASSERT_EQ(z.size(), 2u);
  EXPECT_NEAR(z[0], 0.5, 1e-15);
  EXPECT_NEAR(z[1], 0.6, 1e-15);
  EXPECT_EQ(tm.map.eval(0.3)[0], 0.0);
  EXPECT_NEAR(tm.map.eval(0.55)[0], 0.5, 1e-12);
  EXPECT_EQ(tm.map.eval(0.9)[0], 1.0);
  EXPECT_NEAR(tm.certificate.coupling_cost_bound, 0.1, 1e-12);

  // Exact W_1 of the push-forward: the ramp spreads mass 0.1 uniformly on
  // [0,1], so W_1 = int_0^1 (1 - t) 0.1 dt = 0.05. Check with a fine
  // discretization of the source and the monotone coupling oracle.
  const int M = 200000;
  std::vector<std::pair<double, double>> push, target{{0.0, 0.5}, {1.0, 0.5}};
  for (int k = 0; k < M; ++k) push.push_back({tm.map.eval((k + 0.5) / M)[0], 1.0 / M});
  EXPECT_NEAR(oracle::w1d_northwest(push, target, 1.0), 0.05, 1e-6);
}

TEST(Synthesis, SingleAtomIsConstant) {
  auto mu = DiscreteMeasure::make({{2.0, -1.0}}, {1.0});
  auto tm = synthesize_cpwl(make_plan_spec(mu, kUnit, 1.0));
  EXPECT_EQ(tm.map.breakpoint_count(), 0u);
  for (double z : {-3.0, 0.5, 9.0}) EXPECT_EQ(tm.map.eval(z), (std::vector<double>{2.0, -1.0}));
}

TEST(Synthesis, InfeasibleEpsilonNamesIndex) {
  try {
    make_plan_spec(two_point(), kUnit, 1.0, 1.1);
    FAIL();
  } catch (const InfeasibleEpsilonError& e) {
    EXPECT_EQ(e.index(), 1u);
    EXPECT_DOUBLE_EQ(e.sup_epsilon(), 0.5);
  }
  EXPECT_DOUBLE_EQ(make_plan_spec(two_point(), kUnit, 1.0).epsilon, 0.25);
}

TEST(Synthesis, TwoMBreakpointsAndMassIdentities) {
  Rng rng = make_rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 20, d = 1 + trial % 3;
    auto mu = random_target(rng, n, d);
    const auto src = trial % 2 ? kUnit : SourceDistribution::gaussian(0.0, 1.0);
    auto spec = make_plan_spec(mu, src, 1.0 + trial % 2);
    auto tm = synthesize_cpwl(spec);
    const std::size_t m = n - 1;
    EXPECT_EQ(tm.map.breakpoint_count() + 2, 2 * m);
    // Plateau masses via the source CDF (independent of the certificate).
    const auto& z = tm.map.breakpoints();
    const auto& w = spec.target.weights();
    double prev = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
      const double upper = i < m ? src.cdf(z[2 * i]) : 1.0;
      const double ramp = i == 0 ? 0.0 : std::pow(spec.epsilon, spec.p) / (m * std::pow(distance(spec.target.atoms()[i], spec.target.atoms()[i - 1]), spec.p));
      const double lower = i == 0 ? 0.0 : src.cdf(z[2 * i - 1]);
      EXPECT_NEAR(upper - lower, w[i] - ramp, 1e-10);
      if (i > 0) EXPECT_NEAR(lower - prev, ramp, 1e-10);
      prev = upper;
    }
    EXPECT_LE(tm.certificate.mass_check_max_abs_err, 1e-10);
    EXPECT_LE(tm.certificate.coupling_cost_bound, std::pow(spec.epsilon, spec.p) * (1 + 1e-9));
  }
}

TEST(Synthesis, SmallerEpsilonShrinksRampMass) {
  Rng rng = make_rng(3);
  auto mu = random_target(rng, 8, 2);
  const double sup = feasibility_sup(make_plan_spec(mu, kUnit, 1.0).target, 1.0);
  double prev = INFINITY;
  for (double f : {0.9, 0.5, 0.2, 0.05}) {
    auto tm = synthesize_cpwl(make_plan_spec(mu, kUnit, 1.0, f * sup));
    EXPECT_EQ(tm.map.breakpoint_count(), 12u);
    EXPECT_LT(tm.certificate.total_ramp_mass, prev);
    prev = tm.certificate.total_ramp_mass;
  }
}

TEST(Generator, CapacityBoundary) {
  auto five = DiscreteMeasure::make({{0.0}, {1.0}, {2.0}, {3.0}, {4.0}}, {1, 1, 1, 1, 1});
  auto six = DiscreteMeasure::make({{0.0}, {1.0}, {2.0}, {3.0}, {4.0}, {5.0}}, {1, 1, 1, 1, 1, 1});
  auto g = synthesize_network(five, kUnit, std::nullopt, 1.0, {8, 2, 1});
  EXPECT_LE(g.network.width(), 8u);
  EXPECT_LE(g.network.depth(), 2u);
  try {
    synthesize_network(six, kUnit, std::nullopt, 1.0, {8, 2, 1});
    FAIL();
  } catch (const CapacityExceededError& e) {
    EXPECT_EQ(e.atoms(), 6u);
    EXPECT_EQ(e.capacity(), 5u);
  }
  auto one = synthesize_network(DiscreteMeasure::make({{1.5}}, {1.0}), kUnit, std::nullopt, 1.0, {8, 2, 1});
  EXPECT_NEAR(one.network.eval(0.3)[0], 1.5, 1e-12);
  EXPECT_NEAR(one.network.eval(-8.0)[0], 1.5, 1e-12);
}

TEST(Pushforward, ConstantAndIdentity) {
  auto c = CpwlMap::constant(std::vector<double>{4.0});
  auto s = pushforward_sample(c, kUnit, 100, 3);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i][0], 4.0);
  CpwlMap id({0.0, 1.0}, std::vector<std::vector<double>>{{0.0}, {1.0}});
  auto xs = pushforward_sample(id, kUnit, 1'000'000, 5);
  double mean = 0.0;
  for (double x : xs.coords()) mean += x;
  EXPECT_NEAR(mean / 1e6, 0.5, 0.01);
  EXPECT_EQ(pushforward_sample(id, kUnit, 100, 9), pushforward_sample(id, kUnit, 100, 9));
}

TEST(Pushforward, PlateauMassThroughNetwork) {
  auto g = synthesize_network(two_point(), kUnit, 0.01, 1.0, {8, 2, 1});
  auto xs = pushforward_sample(g.network, kUnit, 200000, 13);
  double near_one = 0;
  for (double x : xs.coords()) near_one += std::abs(x - 1.0) <= 1e-9;
  EXPECT_NEAR(near_one / 200000.0, 0.49, 0.005);
}

TEST(Pushforward, CouplingEstimateBelowEpsilon) {
  Rng rng = make_rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    auto mu = random_target(rng, 10, 2);
    auto budget = budget_for_atoms(mu.size(), 2);
    auto g = synthesize_network(mu, kUnit, std::nullopt, 1.0, budget);
    auto est = coupling_estimate(g.network, g.transport, kUnit, 100000, trial);
    EXPECT_LE(est.wp, g.transport.certificate.epsilon + 3 * est.ci);
  }
}

TEST(Budgets, ForAtomsIsMinimal) {
  for (std::size_t n : {2, 5, 6, 30, 100}) {
    auto b = budget_for_atoms(n, 2);
    EXPECT_GE(budget_max_atoms(b), n);
  }
}

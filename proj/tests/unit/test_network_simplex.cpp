#include <gtest/gtest.h>

#include <cmath>

#include "gencap/detail/network_simplex.hpp"
#include "gencap/random.hpp"

using namespace gencap;
using gencap::detail::TransportSolution;

namespace {

struct Instance {
  std::vector<double> a, b, c;
};

Instance random_instance(Rng& rng, std::size_t n, std::size_t m, bool integer_costs) {
  Instance in;
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < n; ++i) sa += in.a.emplace_back(uniform_open(rng));
  for (std::size_t j = 0; j < m; ++j) sb += in.b.emplace_back(uniform_open(rng));
  for (auto& x : in.a) x /= sa;
  for (auto& x : in.b) x /= sb;
  for (std::size_t k = 0; k < n * m; ++k) {
    in.c.push_back(integer_costs ? std::floor(uniform_open(rng) * 4) : uniform_open(rng));
  }
  return in;
}

void check_certificate(const Instance& in, const TransportSolution& s) {
  const std::size_t n = in.a.size(), m = in.b.size();
  std::vector<double> rows(n, 0.0), cols(m, 0.0);
  double cost = 0.0;
  for (const auto& e : s.flows) {
    EXPECT_GE(e.mass, 0.0);
    rows[e.i] += e.mass;
    cols[e.j] += e.mass;
    cost += e.mass * in.c[e.i * m + e.j];
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(rows[i], in.a[i], 1e-9);
  for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(cols[j], in.b[j], 1e-9);
  EXPECT_NEAR(cost, s.cost, 1e-12);
  // Dual feasibility and complementary slackness certify optimality.
  double dual = 0.0;
  for (std::size_t i = 0; i < n; ++i) dual += in.a[i] * s.u[i];
  for (std::size_t j = 0; j < m; ++j) dual += in.b[j] * s.v[j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) EXPECT_LE(s.u[i] + s.v[j], in.c[i * m + j] + 1e-9);
  EXPECT_NEAR(dual, s.cost, 1e-9);
}

}  // namespace

TEST(NetworkSimplex, HandExample) {
  // Two suppliers, two consumers; the cross plan costs 0.
  std::vector<double> a{0.5, 0.5}, b{0.5, 0.5}, c{1.0, 0.0, 0.0, 1.0};
  auto s = detail::solve_transport(a, b, c);
  EXPECT_NEAR(s.cost, 0.0, 1e-15);
}

TEST(NetworkSimplex, AgreesWithReference) {
  Rng rng = make_rng(123);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + trial % 12, m = 1 + (trial * 7) % 15;
    auto in = random_instance(rng, n, m, trial % 3 == 0);
    auto fast = detail::solve_transport(in.a, in.b, in.c);
    auto ref = detail::solve_transport_reference(in.a, in.b, in.c);
    EXPECT_NEAR(fast.cost, ref.cost, 1e-12) << "n=" << n << " m=" << m;
    check_certificate(in, fast);
    check_certificate(in, ref);
  }
}

TEST(NetworkSimplex, DegenerateEqualMasses) {
  // Uniform masses make almost every basis degenerate.
  Rng rng = make_rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30;
    Instance in{std::vector<double>(n, 1.0 / n), std::vector<double>(n, 1.0 / n), {}};
    for (std::size_t k = 0; k < n * n; ++k) in.c.push_back(std::floor(uniform_open(rng) * 3));
    auto s = detail::solve_transport(in.a, in.b, in.c);
    check_certificate(in, s);
    EXPECT_NEAR(s.cost, detail::solve_transport_reference(in.a, in.b, in.c).cost, 1e-12);
  }
}

TEST(NetworkSimplex, LargerInstance) {
  Rng rng = make_rng(1);
  auto in = random_instance(rng, 400, 300, false);
  auto s = detail::solve_transport(in.a, in.b, in.c);
  check_certificate(in, s);
  EXPECT_LE(s.flows.size(), 400u + 300u - 1u);
}

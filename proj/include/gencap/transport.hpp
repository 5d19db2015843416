#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gencap/compiler.hpp"
#include "gencap/cpwl.hpp"
#include "gencap/measures.hpp"
#include "gencap/network.hpp"

namespace gencap {

/// Nearest-neighbour path through the atoms starting at the
/// lexicographically smallest one; ties go to the lexicographically smaller
/// candidate. Returns atom indices in visiting order.
std::vector<std::size_t> order_atoms(const DiscreteMeasure& mu);

/// Target reindexed along `ordering` together with the transport parameters.
struct TransportPlanSpec {
  DiscreteMeasure target;  // atoms already in path order
  SourceDistribution source;
  double epsilon;
  double p;
  std::vector<std::size_t> ordering;  // ordering[k] = original index of ordered atom k
};

/// min_i (m p_i)^{1/p} |x_i - x_{i-1}| over the ordered atoms; +inf for a
/// single atom. Transport errors strictly below this are feasible.
double feasibility_sup(const DiscreteMeasure& ordered, double p);

/// Orders the target and fixes epsilon (default: half the feasibility sup).
/// Throws InfeasibleEpsilonError naming the first violated ramp.
TransportPlanSpec make_plan_spec(const DiscreteMeasure& target, const SourceDistribution& source, double p,
                                 std::optional<double> epsilon = std::nullopt);

struct TransportCertificate {
  double epsilon = 0.0;
  double p = 1.0;
  std::size_t n_atoms = 0;
  std::vector<double> breakpoints;
  std::vector<double> plateau_mass;  // per ordered atom, measured through the source CDF
  std::vector<double> ramp_mass;     // per ramp i = 1..m (index i-1)
  double total_ramp_mass = 0.0;
  double mass_check_max_abs_err = 0.0;
  /// sum_i |x_i - x_{i-1}|^p * ramp_i, an upper bound for W_p^p.
  double coupling_cost_bound = 0.0;
};

struct TransportMap {
  CpwlMap map;
  TransportCertificate certificate;
  DiscreteMeasure ordered_target;
};

/// Builds the transport map of the plan: x_0 left of z_{1/2}, ramps from
/// x_{i-1} to x_i on [z_{i-1/2}, z_i] carrying source mass
/// eps^p / (m |x_i - x_{i-1}|^p), plateaus at x_i elsewhere. Breakpoints are
/// source quantiles of the cumulative masses. Throws EpsilonBelowResolution
/// when two quantiles coincide in floating point.
TransportMap synthesize_cpwl(const TransportPlanSpec& spec);

struct Generator {
  ReluNetwork network;
  TransportMap transport;
};

/// synthesize_cpwl followed by compile_deep. Throws CapacityExceededError if
/// the target has more atoms than budget_max_atoms(budget).
Generator synthesize_network(const DiscreteMeasure& target, const SourceDistribution& source,
                             std::optional<double> epsilon, double p, const NetworkBudget& budget);

/// Smallest budget (by W^2 L, then L) whose atom capacity reaches n.
NetworkBudget budget_for_atoms(std::size_t n, std::size_t d, std::size_t max_depth = 64);

PointSet pushforward_sample(const ReluNetwork& net, const SourceDistribution& source, std::size_t n,
                            std::uint64_t seed);
PointSet pushforward_sample(const CpwlMap& map, const SourceDistribution& source, std::size_t n,
                            std::uint64_t seed);

/// Monte-Carlo estimate of the cost of the coupling Z -> (x_{I(Z)}, net(Z)),
/// where I(Z) is the ordered atom whose cumulative-mass interval contains
/// F(Z). The first marginal is exactly the target, so the p-th root of the
/// mean is an upper bound for W_p(target, net # source) up to sampling error.
struct CouplingEstimate {
  double wp = 0.0;        // (mean cost)^{1/p}
  double ci = 0.0;        // 95% half-width for wp (delta method)
  double mean_cost = 0.0;
  std::size_t samples = 0;
};
CouplingEstimate coupling_estimate(const ReluNetwork& net, const TransportMap& tm,
                                   const SourceDistribution& source, std::size_t n, std::uint64_t seed);

}  // namespace gencap

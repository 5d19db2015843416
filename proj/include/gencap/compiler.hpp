#pragma once

#include <cstddef>
#include <vector>

#include "gencap/cpwl.hpp"
#include "gencap/network.hpp"

namespace gencap {

struct NetworkBudget {
  std::size_t W = 0;  // width
  std::size_t L = 0;  // depth (hidden layers)
  std::size_t d = 1;  // output dimension

  friend bool operator==(const NetworkBudget&, const NetworkBudget&) = default;
};

/// Throws BudgetTooSmall unless W >= 7d+1, L >= 2 and d >= 1.
void validate_budget(const NetworkBudget& b);

/// (W-d-1) * floor((W-d-1)/(6d)) * floor(L/2): interior breakpoints a budget
/// can realize.
std::size_t budget_max_breakpoints(const NetworkBudget& b);

/// floor((W-d-1)/2 * floor((W-d-1)/(6d)) * floor(L/2)) + 2: largest atom
/// count whose transport map fits the budget.
std::size_t budget_max_atoms(const NetworkBudget& b);

/// (L-1)W^2 + (L+d+1)W + d: parameters of a fully connected 1 -> W^L -> d net.
std::size_t param_count(std::size_t W, std::size_t L, std::size_t d);

/// Layer shapes of the deep construction for a map with N interior
/// breakpoints, without building it.
struct DeepLayout {
  std::size_t blocks = 0;            // two hidden layers per block
  std::size_t principals = 0;        // principal breakpoints per block
  std::size_t per_principal = 0;     // breakpoints per principal (q)
  std::size_t group_slots = 0;       // hat-group neurons per block (6dq)
  std::vector<std::size_t> widths;   // hidden layer widths
  std::size_t width = 0;
  std::size_t depth = 0;
};
DeepLayout plan_deep_layout(std::size_t N, const NetworkBudget& b);

/// Two-layer network for f vanishing at and beyond its outer breakpoints.
/// The first layer holds W neurons sigma(z - z_0), sigma(z - p_j) for W-1
/// principal breakpoints p_j, so up to floor(W/(6d)) * (W-1) interior
/// breakpoints fit.
ReluNetwork compile_shallow(const CpwlMap& f, std::size_t W);
std::size_t shallow_max_breakpoints(std::size_t W, std::size_t d);

/// Network of width <= b.W and depth <= b.L realizing f exactly (up to
/// round-off) on all of R.
ReluNetwork compile_deep(const CpwlMap& f, const NetworkBudget& b);

}  // namespace gencap

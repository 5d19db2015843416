#pragma once

// Primal network simplex for the balanced transportation problem
//   min sum c_ij x_ij  s.t.  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0
// on the complete bipartite graph. Uses an artificial root with big-M arcs,
// block-search pricing and the strongly feasible leaving-arc rule.

#include <cstddef>
#include <span>
#include <vector>

namespace gencap::detail {

struct TransportSolution {
  struct Entry {
    std::size_t i;
    std::size_t j;
    double mass;
  };
  std::vector<Entry> flows;  // positive flows on real arcs
  std::vector<double> u;     // row duals
  std::vector<double> v;     // column duals, u_i + v_j <= c_ij at optimum
  double cost = 0.0;
  std::size_t pivots = 0;
};

/// cost is row-major (a.size() x b.size()).
TransportSolution solve_transport(std::span<const double> a, std::span<const double> b,
                                  std::span<const double> cost);

/// Textbook variant used as a cross-check: Dantzig pricing and a full
/// potential recomputation after every pivot. Only for small instances.
TransportSolution solve_transport_reference(std::span<const double> a, std::span<const double> b,
                                            std::span<const double> cost);

}  // namespace gencap::detail

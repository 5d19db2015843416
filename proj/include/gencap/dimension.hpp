#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gencap/point_set.hpp"

namespace gencap {

enum class DimensionKind { UpperP, Lower, Minkowski };

std::string to_string(DimensionKind kind);
/// Accepts upper, lower, minkowski.
DimensionKind parse_dimension_kind(const std::string& name);

struct DimensionEstimate {
  DimensionKind kind = DimensionKind::Minkowski;
  double value = 0.0;
  double parameter = 0.0;  // p for UpperP, delta for Lower, unused for Minkowski
  std::vector<double> grid;
  std::vector<std::size_t> raw_counts;  // greedy center counts per radius
  // Counts actually regressed: at each radius the smallest greedy count
  // found at that radius or any smaller one. Every cover at a smaller radius
  // is also a cover at a larger one, so this is still an upper bound on
  // N_eps and is nonincreasing in eps.
  std::vector<std::size_t> counts;
  double residual = 0.0;    // RMS residual of the log-log fit
  bool degenerate = false;  // all samples coincide; value forced to 0
};

/// eps_k = diameter/4 * 2^-k for k = 0..levels-1.
std::vector<double> default_grid(const PointSet& samples, std::size_t levels = 6);

/// Counts from robust_cover with delta = eps^p.
DimensionEstimate estimate_upper_dimension(const PointSet& samples, double p, const std::vector<double>& grid);
/// Counts from robust_cover at a fixed delta in (0, 0.5).
DimensionEstimate estimate_lower_dimension(const PointSet& samples, double delta, const std::vector<double>& grid);
/// Counts from greedy_cover (delta = 0).
DimensionEstimate estimate_minkowski(const PointSet& samples, const std::vector<double>& grid);

}  // namespace gencap

#include "gencap/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "gencap/error.hpp"
#include "gencap/quantize.hpp"

namespace gencap {

std::string to_string(DimensionKind kind) {
  switch (kind) {
    case DimensionKind::UpperP:
      return "upper";
    case DimensionKind::Lower:
      return "lower";
    case DimensionKind::Minkowski:
      return "minkowski";
  }
  return "unknown";
}

DimensionKind parse_dimension_kind(const std::string& name) {
  if (name == "upper" || name == "upper_p") return DimensionKind::UpperP;
  if (name == "lower") return DimensionKind::Lower;
  if (name == "minkowski") return DimensionKind::Minkowski;
  throw Error(ErrorCode::DomainError, "unknown dimension kind '" + name + "' (expected upper, lower or minkowski)");
}

std::vector<double> default_grid(const PointSet& samples, std::size_t levels) {
  if (samples.empty()) throw Error(ErrorCode::EmptyMeasure, "no samples");
  // Exact diameter; quadratic but only run once per estimate.
  double diam2 = 0.0;
  const std::size_t n = samples.size();
#pragma omp parallel for schedule(dynamic, 64) reduction(max : diam2)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) diam2 = std::max(diam2, squared_distance(samples[i], samples[j]));
  }
  std::vector<double> grid(levels);
  for (std::size_t k = 0; k < levels; ++k) grid[k] = std::sqrt(diam2) / 4.0 * std::ldexp(1.0, -static_cast<int>(k));
  return grid;
}

namespace {

template <class DeltaFn>
DimensionEstimate estimate(DimensionKind kind, double parameter, const PointSet& samples,
                           const std::vector<double>& grid, DeltaFn&& delta_of) {
  if (samples.empty()) throw Error(ErrorCode::EmptyMeasure, "no samples");
  if (grid.size() < 4) throw Error(ErrorCode::DomainError, "radius grid needs at least 4 values");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !std::isfinite(grid[k])) throw Error(ErrorCode::DomainError, "radii must be positive");
    if (k > 0 && !(grid[k] < grid[k - 1])) throw Error(ErrorCode::DomainError, "radius grid must be strictly decreasing");
  }
  DimensionEstimate est;
  est.kind = kind;
  est.parameter = parameter;
  est.grid = grid;

  bool single = true;
  for (std::size_t i = 1; i < samples.size() && single; ++i) single = squared_distance(samples[0], samples[i]) == 0.0;

  const auto m = static_cast<std::ptrdiff_t>(grid.size());
  est.raw_counts.assign(grid.size(), 0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < m; ++k) {
    try {
      const auto i = static_cast<std::size_t>(k);
      est.raw_counts[i] = robust_cover(samples, grid[i], delta_of(grid[i])).centers.size();
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  if (std::find(est.raw_counts.begin(), est.raw_counts.end(), 0) != est.raw_counts.end()) {
    throw Error(ErrorCode::DomainError, "delta reaches 1 on this grid, so nothing needs covering; use smaller radii");
  }

  est.counts = est.raw_counts;
  for (std::size_t k = grid.size() - 1; k-- > 0;) est.counts[k] = std::min(est.counts[k], est.counts[k + 1]);

  if (single) {
    est.degenerate = true;
    return est;
  }
  if (est.counts.front() == est.counts.back()) {
    throw Error(ErrorCode::DegenerateGrid, "covering counts are constant over the grid; choose smaller radii");
  }

  // Least squares of log2 N against -log2 eps.
  const double n = static_cast<double>(grid.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = -std::log2(grid[k]);
    const double y = std::log2(static_cast<double>(est.counts[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = std::log2(static_cast<double>(est.counts[k])) - (icpt - slope * std::log2(grid[k]));
    ss += r * r;
  }
  est.value = std::max(0.0, slope);
  est.residual = std::sqrt(ss / n);
  return est;
}

}  // namespace

DimensionEstimate estimate_upper_dimension(const PointSet& samples, double p, const std::vector<double>& grid) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::DomainError, "p must be a finite number >= 1");
  return estimate(DimensionKind::UpperP, p, samples, grid, [p](double eps) { return std::min(std::pow(eps, p), 1.0); });
}

DimensionEstimate estimate_lower_dimension(const PointSet& samples, double delta, const std::vector<double>& grid) {
  if (!(delta > 0.0 && delta < 0.5)) throw Error(ErrorCode::DomainError, "delta must lie in (0, 0.5)");
  return estimate(DimensionKind::Lower, delta, samples, grid, [delta](double) { return delta; });
}

DimensionEstimate estimate_minkowski(const PointSet& samples, const std::vector<double>& grid) {
  return estimate(DimensionKind::Minkowski, 0.0, samples, grid, [](double) { return 0.0; });
}

}  // namespace gencap

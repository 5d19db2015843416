#pragma once

// Hot loops with a plain serial reference and an OpenMP variant. Both
// variants perform the same floating-point operations per output element, so
// their results are bit-identical; the serial ones are kept for tests and
// benchmarks.

#include <cstddef>
#include <span>
#include <vector>

#include "gencap/network.hpp"
#include "gencap/point_set.hpp"

namespace gencap::kernels {

/// Evaluates a scalar-input network at every z; out is row-major (n x d).
void forward_serial(const ReluNetwork& net, std::span<const double> zs, std::span<double> out);
void forward_omp(const ReluNetwork& net, std::span<const double> zs, std::span<double> out);

/// Row-major cost matrix C[i][j] = |a_i - b_j|^p.
std::vector<double> cost_matrix_serial(const PointSet& a, const PointSet& b, double p);
std::vector<double> cost_matrix_omp(const PointSet& a, const PointSet& b, double p);

/// For each query point, the Euclidean distance to the nearest site.
std::vector<double> nearest_distance_serial(const PointSet& queries, const PointSet& sites);
std::vector<double> nearest_distance_omp(const PointSet& queries, const PointSet& sites);

/// For each point, the number of points (itself included) at squared
/// distance < r2. `order` sorts the points by first coordinate and is used
/// to bound the search window.
std::vector<std::size_t> ball_counts_serial(const PointSet& points, std::span<const std::size_t> order,
                                            double r2);
std::vector<std::size_t> ball_counts_omp(const PointSet& points, std::span<const std::size_t> order,
                                         double r2);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace gencap::kernels

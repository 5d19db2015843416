#include "gencap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gencap::kernels {

namespace {

// One forward pass; scratch buffers must hold the widest layer.
inline void forward_one(const ReluNetwork& net, double z, double* out, std::vector<double>& a,
                        std::vector<double>& b) {
  const auto& layers = net.layers();
  const auto& tr = net.transposed();
  a[0] = z;
  std::size_t n = 1;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    const double* T = tr[l].data();
    double* dst = (l + 1 == layers.size()) ? out : b.data();
    std::copy(L.bias.begin(), L.bias.end(), dst);
    for (std::size_t c = 0; c < n; ++c) {
      const double v = a[c];
      if (v == 0.0) continue;  // exact: adding 0*w changes nothing for finite w
      const double* col = T + c * L.out;
      for (std::size_t r = 0; r < L.out; ++r) dst[r] += col[r] * v;
    }
    if (l + 1 < layers.size()) {
      for (std::size_t r = 0; r < L.out; ++r) dst[r] = dst[r] > 0.0 ? dst[r] : 0.0;
      a.swap(b);
      n = L.out;
    }
  }
}

std::size_t scratch_size(const ReluNetwork& net) {
  std::size_t w = 1;
  for (const auto& L : net.layers()) w = std::max(w, L.out);
  return w;
}

inline double powered(double dist, double p) {
  if (p == 1.0) return dist;
  if (p == 2.0) return dist * dist;
  return std::pow(dist, p);
}

inline double cost_entry(std::span<const double> x, std::span<const double> y, double p) {
  if (x.size() == 1) return powered(std::abs(x[0] - y[0]), p);
  const double s = squared_distance(x, y);
  if (p == 2.0) return s;
  return powered(std::sqrt(s), p);
}

inline double nearest_one(std::span<const double> x, const PointSet& sites) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < sites.size(); ++j) best = std::min(best, squared_distance(x, sites[j]));
  return std::sqrt(best);
}

inline std::size_t count_one(const PointSet& pts, std::span<const std::size_t> order, std::size_t s, double r2) {
  const std::size_t n = order.size();
  const auto x = pts[order[s]];
  const double r = std::sqrt(r2);
  std::size_t c = 1;
  for (std::size_t t = s + 1; t < n; ++t) {
    const auto y = pts[order[t]];
    if (y[0] - x[0] >= r) break;
    if (squared_distance(x, y) < r2) ++c;
  }
  for (std::size_t t = s; t-- > 0;) {
    const auto y = pts[order[t]];
    if (x[0] - y[0] >= r) break;
    if (squared_distance(x, y) < r2) ++c;
  }
  return c;
}

}  // namespace

void forward_serial(const ReluNetwork& net, std::span<const double> zs, std::span<double> out) {
  const std::size_t d = net.output_dim();
  std::vector<double> a(scratch_size(net)), b(scratch_size(net));
  for (std::size_t i = 0; i < zs.size(); ++i) forward_one(net, zs[i], out.data() + i * d, a, b);
}

void forward_omp(const ReluNetwork& net, std::span<const double> zs, std::span<double> out) {
  const std::size_t d = net.output_dim();
  const std::size_t w = scratch_size(net);
  const auto n = static_cast<std::ptrdiff_t>(zs.size());
#pragma omp parallel
  {
    std::vector<double> a(w), b(w);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) forward_one(net, zs[i], out.data() + i * d, a, b);
  }
}

std::vector<double> cost_matrix_serial(const PointSet& a, const PointSet& b, double p) {
  std::vector<double> c(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i * b.size() + j] = cost_entry(a[i], b[j], p);
  return c;
}

std::vector<double> cost_matrix_omp(const PointSet& a, const PointSet& b, double p) {
  std::vector<double> c(a.size() * b.size());
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i * b.size() + j] = cost_entry(a[i], b[j], p);
  return c;
}

std::vector<double> nearest_distance_serial(const PointSet& queries, const PointSet& sites) {
  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = nearest_one(queries[i], sites);
  return out;
}

std::vector<double> nearest_distance_omp(const PointSet& queries, const PointSet& sites) {
  std::vector<double> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = nearest_one(queries[i], sites);
  return out;
}

std::vector<std::size_t> ball_counts_serial(const PointSet& points, std::span<const std::size_t> order,
                                            double r2) {
  std::vector<std::size_t> out(points.size());
  for (std::size_t s = 0; s < order.size(); ++s) out[order[s]] = count_one(points, order, s, r2);
  return out;
}

std::vector<std::size_t> ball_counts_omp(const PointSet& points, std::span<const std::size_t> order,
                                         double r2) {
  std::vector<std::size_t> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(order.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t s = 0; s < n; ++s) out[order[s]] = count_one(points, order, s, r2);
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace gencap::kernels

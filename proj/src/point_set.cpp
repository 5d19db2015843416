#include "gencap/point_set.hpp"

#include <algorithm>
#include <cmath>

#include "gencap/error.hpp"

namespace gencap {

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 && !coords_.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "points of dimension 0");
  }
  if (dim_ != 0 && coords_.size() % dim_ != 0) {
    throw Error(ErrorCode::DimensionMismatch, "coordinate count is not a multiple of the dimension");
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return PointSet();
  PointSet out(rows.front().size());
  if (out.dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "points of dimension 0");
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r);
  return out;
}

void PointSet::push_back(std::span<const double> point) {
  if (dim_ == 0 && coords_.empty()) dim_ = point.size();
  if (point.size() != dim_ || dim_ == 0) {
    throw Error(ErrorCode::DimensionMismatch, "expected a point of dimension " + std::to_string(dim_) +
                                                  ", got " + std::to_string(point.size()));
  }
  coords_.insert(coords_.end(), point.begin(), point.end());
}

std::vector<std::vector<double>> PointSet::to_rows() const {
  std::vector<std::vector<double>> rows;
  rows.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto r = (*this)[i];
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() == 1) return std::abs(a[0] - b[0]);
  return std::sqrt(squared_distance(a, b));
}

double norm(std::span<const double> a) {
  if (a.size() == 1) return std::abs(a[0]);
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace gencap

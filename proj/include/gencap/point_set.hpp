#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gencap {

/// A list of points in R^d stored row-major. All points share one dimension.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> coords);

  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> point);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void resize(std::size_t n) { coords_.resize(n * dim_, 0.0); }

  const std::vector<double>& coords() const noexcept { return coords_; }
  std::vector<double>& coords() noexcept { return coords_; }

  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Lexicographic comparison of coordinates.
bool lex_less(std::span<const double> a, std::span<const double> b);

}  // namespace gencap

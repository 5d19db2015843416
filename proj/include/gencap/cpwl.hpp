#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gencap/point_set.hpp"

namespace gencap {

/// Continuous piecewise-linear map R -> R^d stored as values at ordered
/// breakpoints z_0 < ... < z_{N+1}; constant outside [z_0, z_{N+1}].
class CpwlMap {
 public:
  /// Throws DomainError unless breakpoints are finite and strictly
  /// increasing, DimensionMismatch if the value count differs.
  CpwlMap(std::vector<double> breakpoints, PointSet values);
  CpwlMap(std::vector<double> breakpoints, const std::vector<std::vector<double>>& values);

  /// Constant map with breakpoints [0, 1].
  static CpwlMap constant(std::span<const double> value);

  std::size_t dim() const noexcept { return values_.dim(); }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const PointSet& values() const noexcept { return values_; }
  std::span<const double> value(std::size_t j) const { return values_[j]; }

  /// Number of interior breakpoints (total minus the two boundary ones).
  std::size_t breakpoint_count() const noexcept { return breakpoints_.size() - 2; }

  void eval(double z, std::span<double> out) const;
  std::vector<double> eval(double z) const;
  PointSet eval(std::span<const double> zs) const;

  /// max_j |values_j|_inf.
  double max_abs_value() const;
  /// Largest Euclidean slope over the segments.
  double lipschitz() const;
  bool zero_boundary() const;

  /// Inserts a breakpoint at z (strictly inside a segment) carrying the
  /// interpolated value; the function is unchanged.
  CpwlMap refine(double z) const;

  friend bool operator==(const CpwlMap&, const CpwlMap&) = default;

 private:
  std::vector<double> breakpoints_;
  PointSet values_;
};

inline std::size_t breakpoint_count(const CpwlMap& f) { return f.breakpoint_count(); }

/// Reparametrizes so that the outer breakpoints become 0 and 1.
CpwlMap affine_reparam(const CpwlMap& f);

/// Pads f with redundant breakpoints (segment midpoints, longest segment
/// first) until it has `interior` interior breakpoints.
CpwlMap pad_breakpoints(const CpwlMap& f, std::size_t interior);

}  // namespace gencap

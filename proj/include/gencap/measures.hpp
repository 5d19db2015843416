#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gencap/point_set.hpp"
#include "gencap/random.hpp"

namespace gencap {

/// A finitely supported probability measure: the class P(n) with n = size().
///
/// Construction canonicalizes: weights are normalized, exact duplicate atoms
/// are merged (first occurrence keeps its position) and zero-weight atoms are
/// dropped. Values are immutable afterwards.
class DiscreteMeasure {
 public:
  /// Canonicalizing constructor. Throws DimensionMismatch, EmptyMeasure or
  /// DomainError (negative or non-finite input).
  static DiscreteMeasure make(const PointSet& atoms, std::span<const double> weights);
  static DiscreteMeasure make(const std::vector<std::vector<double>>& atoms,
                              const std::vector<double>& weights);
  /// Equal weights on the given points (duplicates merged).
  static DiscreteMeasure uniform(const PointSet& points);
  static DiscreteMeasure dirac(std::span<const double> point);

  const PointSet& atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  std::size_t dim() const noexcept { return atoms_.dim(); }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  DiscreteMeasure() = default;
  PointSet atoms_;
  std::vector<double> weights_;
};

inline DiscreteMeasure make_discrete(const PointSet& atoms, std::span<const double> weights) {
  return DiscreteMeasure::make(atoms, weights);
}

/// One-dimensional absolutely continuous source law.
class SourceDistribution {
 public:
  enum class Family { Uniform, Gaussian };

  static SourceDistribution uniform(double a, double b);
  static SourceDistribution gaussian(double mean, double stddev);
  /// Parses "uniform:a,b" or "gaussian:mean,stddev".
  static SourceDistribution parse(const std::string& text);

  Family family() const noexcept { return family_; }
  double first() const noexcept { return first_; }
  double second() const noexcept { return second_; }

  double cdf(double x) const;
  /// F^{-1}(u) for u in (0,1); DomainError otherwise.
  double quantile(double u) const;
  double sample(Rng& rng) const;
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  std::string to_string() const;

  friend bool operator==(const SourceDistribution&, const SourceDistribution&) = default;

 private:
  SourceDistribution(Family f, double a, double b) : family_(f), first_(a), second_(b) {}
  Family family_;
  double first_;
  double second_;
};

inline double quantile(const SourceDistribution& source, double u) { return source.quantile(u); }

/// Standard normal CDF and its inverse. The inverse uses a minimax rational
/// approximation followed by one Halley correction; absolute error < 1e-9
/// on (0,1) and typically at round-off level.
double standard_normal_cdf(double x);
double standard_normal_quantile(double u);

/// Seedable sampler for the target families. Draws are a pure function of
/// (family, seed, count).
class TargetSampler {
 public:
  enum class Family { UniformCube, UniformSphere, Gaussian, Mixture, Empirical, Discrete };

  static TargetSampler uniform_cube(std::size_t d);
  /// s-sphere of the given radius placed in the first s+1 coordinates of R^d.
  static TargetSampler uniform_sphere(std::size_t s, std::size_t d, double radius);
  static TargetSampler gaussian(std::size_t d);
  static TargetSampler mixture(std::vector<TargetSampler> components, std::vector<double> weights);
  /// Uniform resampling of a fixed point cloud.
  static TargetSampler empirical(PointSet points);
  /// Draws from the atoms of a discrete measure according to its weights.
  static TargetSampler discrete(const DiscreteMeasure& measure);

  Family family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t intrinsic_dim() const noexcept { return intrinsic_; }
  double radius() const noexcept { return radius_; }
  const std::vector<TargetSampler>& components() const noexcept { return components_; }
  std::span<const double> weights() const noexcept { return weights_; }
  const PointSet& points() const noexcept { return points_; }

  PointSet sample(std::size_t n, std::uint64_t seed) const;
  void draw(Rng& rng, std::span<double> out) const;

 private:
  TargetSampler() = default;
  Family family_ = Family::UniformCube;
  std::size_t dim_ = 0;
  std::size_t intrinsic_ = 0;
  double radius_ = 1.0;
  std::vector<TargetSampler> components_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  PointSet points_;
};

/// Generic point sampler: (count, seed) -> points.
using PointSampler = std::function<PointSet(std::size_t, std::uint64_t)>;
PointSampler as_point_sampler(const TargetSampler& sampler);

struct MomentProfile {
  double q = 1.0;
  double m_q = 0.0;
  std::size_t sample_count = 0;
};

/// Monte-Carlo estimate of M_q = (E|X|^q)^{1/q} from n draws.
MomentProfile estimate_moment(const TargetSampler& sampler, double q, std::size_t n,
                              std::uint64_t seed);
/// Same estimate on an explicit sample set.
double empirical_moment(const PointSet& samples, double q);

// CSV point files: one point per row, comma separated.
PointSet parse_points_csv(const std::string& text);
PointSet read_points_csv(const std::filesystem::path& path);
std::string format_points_csv(const PointSet& points);
void write_points_csv(const std::filesystem::path& path, const PointSet& points);

TargetSampler load_empirical(const std::filesystem::path& path);

/// Measure CSV: d coordinate columns followed by a weight column.
void save_measure_csv(const std::filesystem::path& path, const DiscreteMeasure& measure);
DiscreteMeasure load_measure_csv(const std::filesystem::path& path);

}  // namespace gencap

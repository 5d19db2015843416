#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gencap/point_set.hpp"

namespace gencap {

/// Affine map x -> M x + b with M stored row-major (out x in).
struct AffineLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  AffineLayer() = default;
  AffineLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return weights[r * in + c]; }
  double at(std::size_t r, std::size_t c) const { return weights[r * in + c]; }

  friend bool operator==(const AffineLayer&, const AffineLayer&) = default;
};

/// Feed-forward ReLU network: ReLU after every layer except the last.
/// depth() counts hidden layers, width() is the widest hidden layer.
class ReluNetwork {
 public:
  /// Throws ShapeMismatch if consecutive layers do not compose or a layer's
  /// buffers disagree with its declared shape.
  explicit ReluNetwork(std::vector<AffineLayer> layers);

  const std::vector<AffineLayer>& layers() const noexcept { return layers_; }
  std::size_t input_dim() const noexcept { return layers_.front().in; }
  std::size_t output_dim() const noexcept { return layers_.back().out; }
  std::size_t depth() const noexcept { return layers_.size() - 1; }
  std::size_t width() const noexcept;
  /// Total number of weights and biases.
  std::size_t parameter_count() const noexcept;

  /// Scalar-input evaluation.
  std::vector<double> eval(double z) const;
  std::vector<double> eval(std::span<const double> x) const;
  /// Batch evaluation of a scalar-input network; parallel when OpenMP is
  /// available, bit-identical to the serial path.
  PointSet eval_batch(std::span<const double> zs) const;

  /// Transposed weights (in x out) used by the vectorized forward pass.
  const std::vector<std::vector<double>>& transposed() const noexcept { return transposed_; }

  friend bool operator==(const ReluNetwork& a, const ReluNetwork& b) { return a.layers_ == b.layers_; }

 private:
  std::vector<AffineLayer> layers_;
  std::vector<std::vector<double>> transposed_;
};

}  // namespace gencap

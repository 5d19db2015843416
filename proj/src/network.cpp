#include "gencap/network.hpp"

#include <algorithm>

#include "gencap/error.hpp"
#include "gencap/kernels.hpp"

namespace gencap {

ReluNetwork::ReluNetwork(std::vector<AffineLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorCode::ShapeMismatch, "network without layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    if (L.in == 0 || L.out == 0) throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(l) + " is empty");
    if (L.weights.size() != L.in * L.out || L.bias.size() != L.out) {
      throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(l) + " buffers do not match its shape");
    }
    if (l > 0 && layers_[l - 1].out != L.in) {
      throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(l) + " expects " + std::to_string(L.in) +
                                                " inputs but the previous layer has " +
                                                std::to_string(layers_[l - 1].out) + " outputs");
    }
  }
  transposed_.reserve(layers_.size());
  for (const auto& L : layers_) {
    std::vector<double> t(L.in * L.out);
    for (std::size_t r = 0; r < L.out; ++r)
      for (std::size_t c = 0; c < L.in; ++c) t[c * L.out + r] = L.weights[r * L.in + c];
    transposed_.push_back(std::move(t));
  }
}

std::size_t ReluNetwork::width() const noexcept {
  std::size_t w = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) w = std::max(w, layers_[l].out);
  return w;
}

std::size_t ReluNetwork::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& L : layers_) n += L.weights.size() + L.bias.size();
  return n;
}

std::vector<double> ReluNetwork::eval(double z) const { return eval(std::span<const double>(&z, 1)); }

std::vector<double> ReluNetwork::eval(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorCode::ShapeMismatch, "input has dimension " + std::to_string(x.size()) + ", network expects " +
                                              std::to_string(input_dim()));
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    const auto& T = transposed_[l];
    next.assign(L.bias.begin(), L.bias.end());
    for (std::size_t c = 0; c < L.in; ++c) {
      const double v = cur[c];
      const double* col = T.data() + c * L.out;
      for (std::size_t r = 0; r < L.out; ++r) next[r] += col[r] * v;
    }
    if (l + 1 < layers_.size()) {
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    }
    cur.swap(next);
  }
  return cur;
}

PointSet ReluNetwork::eval_batch(std::span<const double> zs) const {
  if (input_dim() != 1) throw Error(ErrorCode::ShapeMismatch, "batch evaluation needs a scalar-input network");
  PointSet out(output_dim());
  out.resize(zs.size());
  kernels::forward_omp(*this, zs, out.coords());
  return out;
}

}  // namespace gencap

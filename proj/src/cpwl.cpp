#include "gencap/cpwl.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gencap/error.hpp"

namespace gencap {

CpwlMap::CpwlMap(std::vector<double> breakpoints, PointSet values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2) throw Error(ErrorCode::DomainError, "a CPwL map needs at least two breakpoints");
  if (values_.size() != breakpoints_.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(breakpoints_.size()) + " breakpoints but " +
                                                  std::to_string(values_.size()) + " values");
  }
  if (values_.dim() == 0) throw Error(ErrorCode::DimensionMismatch, "values of dimension 0");
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    if (!std::isfinite(breakpoints_[j])) throw Error(ErrorCode::DomainError, "non-finite breakpoint");
    if (j > 0 && !(breakpoints_[j] > breakpoints_[j - 1])) {
      throw Error(ErrorCode::DomainError, "breakpoints must be strictly increasing");
    }
  }
  for (double v : values_.coords()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, "non-finite value");
  }
}

CpwlMap::CpwlMap(std::vector<double> breakpoints, const std::vector<std::vector<double>>& values)
    : CpwlMap(std::move(breakpoints), PointSet::from_rows(values)) {}

CpwlMap CpwlMap::constant(std::span<const double> value) {
  PointSet v(value.size());
  v.push_back(value);
  v.push_back(value);
  return CpwlMap({0.0, 1.0}, std::move(v));
}

void CpwlMap::eval(double z, std::span<double> out) const {
  const auto& b = breakpoints_;
  if (z <= b.front()) {
    auto v = values_[0];
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  if (z >= b.back()) {
    auto v = values_[b.size() - 1];
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  const auto j = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), z) - b.begin());
  // b[j-1] <= z < b[j]
  auto lo = values_[j - 1];
  if (z == b[j - 1]) {
    std::copy(lo.begin(), lo.end(), out.begin());
    return;
  }
  auto hi = values_[j];
  const double t = (z - b[j - 1]) / (b[j] - b[j - 1]);
  for (std::size_t k = 0; k < lo.size(); ++k) out[k] = lo[k] + t * (hi[k] - lo[k]);
}

std::vector<double> CpwlMap::eval(double z) const {
  std::vector<double> out(dim());
  eval(z, out);
  return out;
}

PointSet CpwlMap::eval(std::span<const double> zs) const {
  PointSet out(dim());
  out.resize(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) eval(zs[i], out.row(i));
  return out;
}

double CpwlMap::max_abs_value() const {
  double m = 0.0;
  for (double v : values_.coords()) m = std::max(m, std::abs(v));
  return m;
}

double CpwlMap::lipschitz() const {
  double m = 0.0;
  for (std::size_t j = 1; j < breakpoints_.size(); ++j) {
    m = std::max(m, distance(values_[j], values_[j - 1]) / (breakpoints_[j] - breakpoints_[j - 1]));
  }
  return m;
}

bool CpwlMap::zero_boundary() const {
  auto first = values_[0];
  auto last = values_[values_.size() - 1];
  return std::all_of(first.begin(), first.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(last.begin(), last.end(), [](double v) { return v == 0.0; });
}

CpwlMap CpwlMap::refine(double z) const {
  if (!(z > breakpoints_.front() && z < breakpoints_.back())) {
    throw Error(ErrorCode::DomainError, "refinement point must be interior");
  }
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), z);
  if (*it == z) throw Error(ErrorCode::DomainError, "refinement point is already a breakpoint");
  const auto pos = static_cast<std::size_t>(it - breakpoints_.begin());
  std::vector<double> bp = breakpoints_;
  bp.insert(bp.begin() + static_cast<std::ptrdiff_t>(pos), z);
  PointSet vals(dim());
  vals.reserve(bp.size());
  for (std::size_t j = 0; j < pos; ++j) vals.push_back(values_[j]);
  vals.push_back(eval(z));
  for (std::size_t j = pos; j < values_.size(); ++j) vals.push_back(values_[j]);
  return CpwlMap(std::move(bp), std::move(vals));
}

CpwlMap affine_reparam(const CpwlMap& f) {
  const auto& b = f.breakpoints();
  const double lo = b.front();
  const double span = b.back() - lo;
  std::vector<double> nb(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) nb[j] = (b[j] - lo) / span;
  nb.front() = 0.0;
  nb.back() = 1.0;
  // Guard against ties created by rounding on extremely close breakpoints.
  for (std::size_t j = 1; j < nb.size(); ++j) {
    if (!(nb[j] > nb[j - 1])) throw Error(ErrorCode::DomainError, "breakpoints collapse under reparametrization");
  }
  return CpwlMap(std::move(nb), f.values());
}

CpwlMap pad_breakpoints(const CpwlMap& f, std::size_t interior) {
  const std::size_t have = f.breakpoint_count();
  if (interior < have) throw Error(ErrorCode::TooManyBreakpoints, "cannot pad to fewer breakpoints");
  if (interior == have) return f;

  // Split the longest current segment at its midpoint, repeatedly.  Each
  // original segment k ends up cut into cuts[k] equal pieces.
  const auto& b = f.breakpoints();
  const std::size_t segs = b.size() - 1;
  std::vector<std::size_t> cuts(segs, 1);
  using Item = std::pair<double, std::size_t>;  // (piece length, -segment order via index)
  auto cmp = [](const Item& x, const Item& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second > y.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
  for (std::size_t k = 0; k < segs; ++k) heap.push({b[k + 1] - b[k], k});
  for (std::size_t added = 0; added < interior - have; ++added) {
    auto [len, k] = heap.top();
    heap.pop();
    ++cuts[k];
    heap.push({(b[k + 1] - b[k]) / static_cast<double>(cuts[k]), k});
  }

  std::vector<double> nb;
  PointSet vals(f.dim());
  nb.reserve(interior + 2);
  vals.reserve(interior + 2);
  std::vector<double> buf(f.dim());
  for (std::size_t k = 0; k < segs; ++k) {
    nb.push_back(b[k]);
    vals.push_back(f.value(k));
    for (std::size_t c = 1; c < cuts[k]; ++c) {
      const double t = static_cast<double>(c) / static_cast<double>(cuts[k]);
      const double z = b[k] + t * (b[k + 1] - b[k]);
      auto lo = f.value(k);
      auto hi = f.value(k + 1);
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = lo[i] + t * (hi[i] - lo[i]);
      nb.push_back(z);
      vals.push_back(buf);
    }
  }
  nb.push_back(b.back());
  vals.push_back(f.value(segs));
  return CpwlMap(std::move(nb), std::move(vals));
}

}  // namespace gencap

#include "gencap/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "gencap/error.hpp"
#include "gencap/kernels.hpp"

namespace gencap {

namespace {

std::vector<std::size_t> sort_by_first(const PointSet& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a][0] < pts[b][0]; });
  return order;
}

// Calls fn(t) for every sample t with |x_t - x_s| < eps, s given by its
// position in the sorted order.
template <class Fn>
void for_each_neighbor(const PointSet& pts, const std::vector<std::size_t>& order, std::size_t s, double eps,
                       double r2, Fn&& fn) {
  const auto x = pts[order[s]];
  fn(order[s]);
  for (std::size_t t = s + 1; t < order.size(); ++t) {
    const auto y = pts[order[t]];
    if (y[0] - x[0] >= eps) break;
    if (squared_distance(x, y) < r2) fn(order[t]);
  }
  for (std::size_t t = s; t-- > 0;) {
    const auto y = pts[order[t]];
    if (x[0] - y[0] >= eps) break;
    if (squared_distance(x, y) < r2) fn(order[t]);
  }
}

double bbox_diagonal(const PointSet& pts) {
  const std::size_t d = pts.dim();
  std::vector<double> lo(d, INFINITY), hi(d, -INFINITY);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], pts[i][k]);
      hi[k] = std::max(hi[k], pts[i][k]);
    }
  }
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  return std::sqrt(s);
}

// Smallest positive pairwise distance by a sweep over the sorted order.
double min_positive_distance(const PointSet& pts, const std::vector<std::size_t>& order) {
  double best = INFINITY;
  for (std::size_t s = 0; s < order.size(); ++s) {
    const auto x = pts[order[s]];
    for (std::size_t t = s + 1; t < order.size(); ++t) {
      const auto y = pts[order[t]];
      if (y[0] - x[0] >= best) break;
      const double dd = distance(x, y);
      if (dd > 0.0) best = std::min(best, dd);
    }
  }
  return best;
}

PointSet subset(const PointSet& pts, const std::vector<std::size_t>& idx) {
  PointSet out(pts.dim());
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(pts[i]);
  return out;
}

struct SearchResult {
  CoveringResult cover;
  double radius;
};

// Smallest radius (up to a factor 1 + 1e-3) on [lo, hi] for which the cover
// with delta(radius) uses at most max_centers centers. The predicate holds
// at hi by construction.
template <class DeltaFn>
SearchResult bisect_radius(const PointSet& pts, std::size_t max_centers, DeltaFn&& delta_of) {
  const auto order = sort_by_first(pts);
  double lo = min_positive_distance(pts, order) / 2.0;
  double hi = bbox_diagonal(pts) * (1.0 + 1e-9);
  if (!std::isfinite(lo) || !(hi > 0.0)) {
    // All samples coincide.
    auto c = robust_cover(pts, 1.0, 0.0);
    return {std::move(c), 0.0};
  }
  auto fits = [&](double r) {
    auto c = robust_cover(pts, r, delta_of(r), max_centers);
    return std::pair{c.complete && c.centers.size() <= max_centers, std::move(c)};
  };
  auto [ok_lo, cover_lo] = fits(lo);
  if (ok_lo) return {std::move(cover_lo), lo};
  // Bracket by doubling from below: covers at small radii are cheap, so this
  // keeps the number of expensive large-radius covers low.
  CoveringResult cover_hi;
  for (;;) {
    const double next = std::min(2.0 * lo, hi);
    auto [ok, cover] = fits(next);
    if (ok) {
      hi = next;
      cover_hi = std::move(cover);
      break;
    }
    if (next == hi) throw Error(ErrorCode::InfeasibleBudget, "even the full diameter needs too many centers");
    lo = next;
  }
  while (hi / lo > 1.0 + 1e-3) {
    const double mid = std::sqrt(lo * hi);
    auto [ok, cover] = fits(mid);
    if (ok) {
      hi = mid;
      cover_hi = std::move(cover);
    } else {
      lo = mid;
    }
  }
  return {std::move(cover_hi), hi};
}

}  // namespace

CoveringResult robust_cover(const PointSet& samples, double eps, double delta, std::size_t max_centers) {
  if (samples.empty()) throw Error(ErrorCode::EmptyMeasure, "no samples to cover");
  if (!(eps > 0.0)) throw Error(ErrorCode::DomainError, "cover radius must be positive");
  if (!(delta >= 0.0)) throw Error(ErrorCode::DomainError, "delta must be nonnegative");

  const std::size_t N = samples.size();
  const double r2 = eps * eps;
  const auto order = sort_by_first(samples);
  std::vector<std::size_t> pos(N);
  for (std::size_t s = 0; s < N; ++s) pos[order[s]] = s;

  CoveringResult res;
  res.centers = PointSet(samples.dim());
  res.radius = eps;
  res.assignment.assign(N, -1);

  const double need = 1.0 - delta;
  std::size_t covered = 0;
  auto done = [&] { return static_cast<double>(covered) / static_cast<double>(N) >= need; };
  if (done()) return res;

  auto counts = kernels::ball_counts_omp(samples, order, r2);
  using Key = std::pair<std::size_t, std::ptrdiff_t>;  // (count, -index): max count, then lowest index
  std::priority_queue<Key> heap;
  for (std::size_t i = 0; i < N; ++i) heap.push({counts[i], -static_cast<std::ptrdiff_t>(i)});

  std::vector<std::size_t> fresh;
  while (!done()) {
    const auto [c, neg] = heap.top();
    heap.pop();
    const auto i = static_cast<std::size_t>(-neg);
    if (c != counts[i]) {
      if (counts[i] > 0) heap.push({counts[i], neg});
      continue;
    }
    if (res.centers.size() >= max_centers) {
      res.complete = false;
      break;
    }
    const auto cell = static_cast<std::ptrdiff_t>(res.centers.size());
    res.centers.push_back(samples[i]);
    res.center_index.push_back(i);
    fresh.clear();
    for_each_neighbor(samples, order, pos[i], eps, r2, [&](std::size_t t) {
      if (res.assignment[t] < 0) {
        res.assignment[t] = cell;
        fresh.push_back(t);
      }
    });
    res.cell_size.push_back(fresh.size());
    covered += fresh.size();
    for (std::size_t s : fresh) {
      for_each_neighbor(samples, order, pos[s], eps, r2, [&](std::size_t t) { --counts[t]; });
    }
    if (counts[i] > 0) heap.push({counts[i], neg});
  }
  res.covered_mass = static_cast<double>(covered) / static_cast<double>(N);
  return res;
}

CoveringResult greedy_cover(const PointSet& samples, double eps) { return robust_cover(samples, eps, 0.0); }

QuantizeResult quantize_cover_detailed(const PointSet& samples, std::size_t n, double p, double q, double m_q) {
  if (samples.empty()) throw Error(ErrorCode::EmptyMeasure, "no samples to quantize");
  if (n < 2) throw Error(ErrorCode::DomainError, "atom budget must be at least 2");
  if (!(p >= 1.0) || !(q > p)) throw Error(ErrorCode::DomainError, "need q > p >= 1");
  auto exact = DiscreteMeasure::uniform(samples);
  if (exact.size() <= n) return {std::move(exact), 0.0, 0.0, 0.0};

  const double expo = std::isinf(q) ? p : p * q / (q - p);
  auto delta_of = [&](double r) { return std::pow(r, expo); };
  auto found = bisect_radius(samples, n - 1, delta_of);
  const auto& cover = found.cover;

  const double N = static_cast<double>(samples.size());
  PointSet atoms = cover.centers;
  std::vector<double> w;
  for (std::size_t s : cover.cell_size) w.push_back(static_cast<double>(s) / N);
  const double rest = 1.0 - cover.covered_mass;
  if (rest > 0.0) {
    const std::vector<double> origin(samples.dim(), 0.0);
    atoms.push_back(origin);
    w.push_back(rest);
  }
  const double bound = (std::pow(m_q, p) + 1.0) * std::pow(found.radius, p);
  return {DiscreteMeasure::make(atoms, w), found.radius, rest, bound};
}

DiscreteMeasure quantize_cover(const PointSet& samples, std::size_t n, double p, double q, double m_q) {
  return quantize_cover_detailed(samples, n, p, q, m_q).measure;
}

ShellRegime select_regime(double p, double q, std::size_t d) {
  return q > p + p / static_cast<double>(d) ? ShellRegime::Fast : ShellRegime::Slow;
}

DiscreteMeasure quantize_shells(const PointSet& samples, std::size_t n, double p, double q, double m_q,
                                ShellReport* report) {
  (void)m_q;  // the construction does not depend on the moment, only its error bound does
  if (samples.empty()) throw Error(ErrorCode::EmptyMeasure, "no samples to quantize");
  if (n < 2) throw Error(ErrorCode::DomainError, "atom budget must be at least 2");
  if (!(p >= 1.0) || !(q > p)) throw Error(ErrorCode::DomainError, "need q > p >= 1");
  const std::size_t d = samples.dim();
  ShellReport rep;
  rep.regime = select_regime(p, q, d);
  const double lg = std::log2(static_cast<double>(n));
  if (rep.regime == ShellRegime::Fast) {
    rep.k = static_cast<std::size_t>(std::max(0.0, std::floor(lg) - 1.0));
  } else {
    rep.k = static_cast<std::size_t>(std::ceil(p / (static_cast<double>(d) * (q - p)) * lg));
  }

  auto exact = DiscreteMeasure::uniform(samples);
  if (exact.size() <= n) {
    if (report) *report = rep;
    return exact;
  }

  // Shell membership; index k+1 is the tail.
  const std::size_t K = rep.k;
  std::vector<std::vector<std::size_t>> members(K + 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = norm(samples[i]);
    std::size_t j = 0;
    double outer = 1.0;
    // A relative slack of 1e-12 keeps points sampled on a shell sphere from
    // being split across two shells by rounding.
    while (j <= K && r > outer * (1.0 + 1e-12)) {
      ++j;
      outer *= 2.0;
    }
    members[j].push_back(i);
  }

  std::vector<double> weight(K + 1, 0.0);
  double wsum = 0.0;
  for (std::size_t j = 0; j <= K; ++j) {
    if (members[j].empty()) continue;
    weight[j] = rep.regime == ShellRegime::Fast ? std::ldexp(1.0, static_cast<int>(K - j)) : 1.0;
    wsum += weight[j];
  }
  // Largest-remainder apportionment of the centers. The origin atom is only
  // reserved when something actually ends up in the tail.
  auto apportion = [&](std::size_t total) {
    std::vector<std::size_t> out(K + 1, 0);
    std::vector<std::pair<double, std::size_t>> frac;
    std::size_t given = 0;
    for (std::size_t j = 0; j <= K; ++j) {
      if (weight[j] == 0.0) continue;
      const double raw = static_cast<double>(total) * weight[j] / wsum;
      out[j] = static_cast<std::size_t>(std::floor(raw));
      given += out[j];
      frac.push_back({raw - std::floor(raw), j});
    }
    std::stable_sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t t = 0; given < total && t < frac.size(); ++t, ++given) ++out[frac[t].second];
    return out;
  };
  rep.budget = apportion(n);
  bool needs_tail = !members[K + 1].empty();
  for (std::size_t j = 0; j <= K; ++j) needs_tail = needs_tail || (weight[j] > 0.0 && rep.budget[j] == 0);
  if (needs_tail) rep.budget = apportion(n - 1);

  const double N = static_cast<double>(samples.size());
  PointSet atoms(d);
  std::vector<double> w;
  std::size_t tail = members[K + 1].size();
  rep.shell_size.assign(K + 1, 0);
  rep.radius.assign(K + 1, 0.0);
  for (std::size_t j = 0; j <= K; ++j) {
    rep.shell_size[j] = members[j].size();
    if (members[j].empty()) continue;
    if (rep.budget[j] == 0) {
      tail += members[j].size();
      continue;
    }
    const PointSet shell = subset(samples, members[j]);
    auto shell_exact = DiscreteMeasure::uniform(shell);
    if (shell_exact.size() <= rep.budget[j]) {
      for (std::size_t a = 0; a < shell_exact.size(); ++a) {
        atoms.push_back(shell_exact.atoms()[a]);
        w.push_back(shell_exact.weights()[a] * static_cast<double>(shell.size()) / N);
      }
      continue;
    }
    auto found = bisect_radius(shell, rep.budget[j], [](double) { return 0.0; });
    rep.radius[j] = found.radius;
    for (std::size_t c = 0; c < found.cover.centers.size(); ++c) {
      atoms.push_back(found.cover.centers[c]);
      w.push_back(static_cast<double>(found.cover.cell_size[c]) / N);
    }
  }
  if (tail > 0) {
    const std::vector<double> origin(d, 0.0);
    atoms.push_back(origin);
    w.push_back(static_cast<double>(tail) / N);
  }
  rep.tail_mass = static_cast<double>(tail) / N;
  if (report) *report = rep;
  return DiscreteMeasure::make(atoms, w);
}

LowerBoundProbe lower_bound_probe(const PointSet& samples, std::size_t n, double p, double t, double delta,
                                  double q) {
  if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "t must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::DomainError, "delta must lie in (0,1)");
  const auto nu = quantize_cover(samples, n, p, q, 0.0);
  LowerBoundProbe out;
  out.atoms = nu.size();
  out.epsilon = std::pow(static_cast<double>(n), -1.0 / t);
  const auto dist = kernels::nearest_distance_omp(samples, nu.atoms());
  std::size_t far = 0;
  for (double x : dist) far += x >= out.epsilon ? 1 : 0;
  out.witness_mass = static_cast<double>(far) / static_cast<double>(samples.size());
  out.activated = out.witness_mass >= delta;
  out.implied_bound = out.epsilon * std::pow(out.witness_mass, 1.0 / p);
  return out;
}

LowerBoundProbe lower_bound_probe(const TargetSampler& sampler, std::size_t n, double p, double t, double delta,
                                  std::uint64_t seed, const ProbeOptions& opt) {
  return lower_bound_probe(sampler.sample(opt.samples, seed), n, p, t, delta, opt.q);
}

}  // namespace gencap

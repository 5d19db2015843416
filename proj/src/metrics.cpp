#include "gencap/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "gencap/detail/network_simplex.hpp"
#include "gencap/error.hpp"
#include "gencap/kernels.hpp"

namespace gencap {

namespace {

void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  if (mu.dim() != nu.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "measures live in R^" + std::to_string(mu.dim()) + " and R^" + std::to_string(nu.dim()));
  }
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::DomainError, "p must be a finite number >= 1");
}

using Solver = detail::TransportSolution (*)(std::span<const double>, std::span<const double>,
                                             std::span<const double>);

WassersteinResult solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, Solver solver) {
  check_pair(mu, nu, p);
  if (mu.size() > kMaxExactAtoms || nu.size() > kMaxExactAtoms) {
    throw Error(ErrorCode::SizeLimit, "exact transport is limited to " + std::to_string(kMaxExactAtoms) +
                                          " atoms per side (got " + std::to_string(mu.size()) + " and " +
                                          std::to_string(nu.size()) + "); use the Monte-Carlo estimator");
  }
  const auto cost = kernels::cost_matrix_omp(mu.atoms(), nu.atoms(), p);
  const auto sol = solver(mu.weights(), nu.weights(), cost);

  const std::size_t n1 = mu.size(), n2 = nu.size();
  std::vector<PlanEntry> entries;
  entries.reserve(sol.flows.size());
  for (const auto& e : sol.flows) entries.push_back({e.i, e.j, e.mass});
  const double total = std::max(0.0, sol.cost);

  // Make the duals exactly feasible: g = c-transform of f.
  std::vector<double> f = sol.u;
  std::vector<double> g(n2, std::numeric_limits<double>::infinity());
  double cmax = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const double c = cost[i * n2 + j];
      g[j] = std::min(g[j], c - f[i]);
      cmax = std::max(cmax, c);
    }
  }
  double dual = 0.0;
  for (std::size_t i = 0; i < n1; ++i) dual += mu.weights()[i] * f[i];
  for (std::size_t j = 0; j < n2; ++j) dual += nu.weights()[j] * g[j];
  const double gap = std::abs(total - dual) / std::max(total, 1e-12 * std::max(cmax, 1e-300));
  return WassersteinResult{std::pow(total, 1.0 / p),
                           TransportPlan{mu, nu, p, std::move(entries), total, std::move(f), std::move(g), dual, gap}};
}

}  // namespace

WassersteinResult wasserstein_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  return solve(mu, nu, p, &detail::solve_transport);
}

WassersteinResult wasserstein_discrete_reference(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  return solve(mu, nu, p, &detail::solve_transport_reference);
}

double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  check_pair(mu, nu, p);
  if (mu.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "closed form needs measures on the real line");
  auto sorted = [](const DiscreteMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return m.atoms()[a][0] < m.atoms()[b][0]; });
    std::vector<double> x(m.size()), cum(m.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      x[k] = m.atoms()[idx[k]][0];
      acc += m.weights()[idx[k]];
      cum[k] = acc;
    }
    cum.back() = 1.0;
    return std::pair{x, cum};
  };
  const auto [xa, ca] = sorted(mu);
  const auto [xb, cb] = sorted(nu);
  double total = 0.0, level = 0.0;
  std::size_t i = 0, j = 0;
  while (i < xa.size() && j < xb.size()) {
    const double next = std::min(ca[i], cb[j]);
    const double diff = std::abs(xa[i] - xb[j]);
    const double c = p == 1.0 ? diff : std::pow(diff, p);
    total += (next - level) * c;
    level = next;
    if (ca[i] == next) ++i;
    if (cb[j] == next) ++j;
  }
  return std::pow(total, 1.0 / p);
}

DiscreteMeasure empirical_measure(const PointSet& points, double snap) {
  if (points.empty()) throw Error(ErrorCode::EmptyMeasure, "no sample points");
  if (snap > 0.0) {
    PointSet snapped = points;
    for (double& c : snapped.coords()) c = std::round(c / snap) * snap;
    return DiscreteMeasure::uniform(snapped);
  }
  return DiscreteMeasure::uniform(points);
}

namespace {

// Exact W_p for a large-by-small pair (many samples against a few atoms).
double solve_unbalanced(const DiscreteMeasure& big, const DiscreteMeasure& small, double p) {
  if (small.size() > kMaxExactAtoms || big.size() * small.size() > kMaxQuantizationCells) {
    throw Error(ErrorCode::SizeLimit, "exact transport is limited to " + std::to_string(kMaxExactAtoms) +
                                          " atoms per side, or " + std::to_string(kMaxQuantizationCells) +
                                          " cost entries when one side is small (got " + std::to_string(big.size()) +
                                          " and " + std::to_string(small.size()) + "); use the Monte-Carlo estimator");
  }
  const auto cost = kernels::cost_matrix_omp(big.atoms(), small.atoms(), p);
  const auto sol = detail::solve_transport(big.weights(), small.weights(), cost);
  return std::pow(std::max(sol.cost, 0.0), 1.0 / p);
}

}  // namespace

double wasserstein_empirical(const PointSet& a, const PointSet& b, double p, double snap) {
  const auto ma = empirical_measure(a, snap);
  const auto mb = empirical_measure(b, snap);
  check_pair(ma, mb, p);
  if (ma.dim() == 1) return wasserstein_1d(ma, mb, p);
  if (ma.size() <= kMaxExactAtoms && mb.size() <= kMaxExactAtoms) return wasserstein_discrete(ma, mb, p).value;
  return ma.size() >= mb.size() ? solve_unbalanced(ma, mb, p) : solve_unbalanced(mb, ma, p);
}

double quantization_error(const PointSet& samples, const DiscreteMeasure& nu, double p) {
  const auto mu = empirical_measure(samples);
  check_pair(mu, nu, p);
  if (mu.dim() == 1) return wasserstein_1d(mu, nu, p);
  return solve_unbalanced(mu, nu, p);
}

std::uint64_t rep_seed(std::uint64_t seed, std::size_t rep, std::uint64_t stream) {
  return mix_seed(mix_seed(seed + rep) + stream);
}

McEstimate wasserstein_mc(const PointSampler& a, const PointSampler& b, double p, const McOptions& opt,
                          std::uint64_t seed) {
  if (opt.reps < 3) throw Error(ErrorCode::DomainError, "Monte-Carlo estimation needs at least 3 repetitions");
  if (opt.batch_a == 0 || opt.batch_b == 0) throw Error(ErrorCode::DomainError, "batch size must be positive");
  McEstimate est;
  est.values.assign(opt.reps, 0.0);
  const auto reps = static_cast<std::ptrdiff_t>(opt.reps);
  // Reps are independent; the first exception stops the remaining reps and
  // is rethrown after the loop.
  std::vector<std::exception_ptr> errors(opt.reps);
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t r = 0; r < reps; ++r) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const auto xa = a(opt.batch_a, rep_seed(seed, static_cast<std::size_t>(r), 0));
      const auto xb = b(opt.batch_b, rep_seed(seed, static_cast<std::size_t>(r), 1));
      est.values[static_cast<std::size_t>(r)] = wasserstein_empirical(xa, xb, p, opt.snap);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  const double n = static_cast<double>(opt.reps);
  double mean = 0.0;
  for (double v : est.values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : est.values) ss += (v - mean) * (v - mean);
  est.estimate = mean;
  est.ci_halfwidth = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return est;
}

McEstimate wasserstein_mc(const PointSampler& a, const PointSampler& b, double p, std::size_t batch,
                          std::size_t reps, std::uint64_t seed) {
  if (batch > 2000) throw Error(ErrorCode::DomainError, "batch is limited to 2000 samples");
  return wasserstein_mc(a, b, p, McOptions{batch, batch, reps, 0.0}, seed);
}

KrCheck kr_dual_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const TransportPlan& plan) {
  if (plan.p != 1.0) throw Error(ErrorCode::DomainError, "Kantorovich-Rubinstein duality needs p = 1");
  if (plan.g.size() != nu.size() || plan.f.size() != mu.size()) {
    throw Error(ErrorCode::DimensionMismatch, "plan does not belong to these measures");
  }
  auto psi = [&](std::span<const double> z) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nu.size(); ++j) v = std::min(v, distance(z, nu.atoms()[j]) - plan.g[j]);
    return v;
  };
  KrCheck kr;
  kr.psi_mu.resize(mu.size());
  kr.psi_nu.resize(nu.size());
  double lhs = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    kr.psi_mu[i] = psi(mu.atoms()[i]);
    lhs += mu.weights()[i] * kr.psi_mu[i];
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    kr.psi_nu[j] = psi(nu.atoms()[j]);
    lhs -= nu.weights()[j] * kr.psi_nu[j];
  }

  PointSet all(mu.dim());
  std::vector<double> vals;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    all.push_back(mu.atoms()[i]);
    vals.push_back(kr.psi_mu[i]);
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    all.push_back(nu.atoms()[j]);
    vals.push_back(kr.psi_nu[j]);
  }
  double diam = 0.0;
  for (std::size_t s = 0; s < all.size(); ++s) {
    for (std::size_t t = s + 1; t < all.size(); ++t) {
      const double dz = distance(all[s], all[t]);
      diam = std::max(diam, dz);
      kr.lipschitz_excess = std::max(kr.lipschitz_excess, std::abs(vals[s] - vals[t]) - dz);
    }
  }
  kr.abs_gap = std::abs(lhs - plan.cost);
  kr.gap = kr.abs_gap / std::max(plan.cost, 1e-12 * std::max(diam, 1e-300));
  return kr;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double f_kl(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }
double f_reverse_kl(double t) { return t > 0.0 ? -std::log(t) : kInf; }
double f_js(double t) {
  if (t == 0.0) return 0.5 * std::numbers::ln2;
  return 0.5 * (t * std::log(2.0 * t / (1.0 + t)) + std::log(2.0 / (1.0 + t)));
}
double f_tv(double t) { return 0.5 * std::abs(t - 1.0); }
double f_chi2(double t) { return (t - 1.0) * (t - 1.0); }

const std::vector<DivergenceGenerator>& table() {
  static const std::vector<DivergenceGenerator> gens = {
      {Divergence::KL, "kl", &f_kl, 0.0, kInf, true},
      {Divergence::ReverseKL, "reverse_kl", &f_reverse_kl, kInf, 0.0, true},
      {Divergence::JS, "js", &f_js, 0.5 * std::numbers::ln2, 0.5 * std::numbers::ln2, true},
      {Divergence::TV, "tv", &f_tv, 0.5, 0.5, false},
      {Divergence::Chi2, "chi2", &f_chi2, 1.0, kInf, true},
  };
  return gens;
}

struct AtomLess {
  bool operator()(const std::vector<double>& a, const std::vector<double>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

std::map<std::vector<double>, double, AtomLess> index(const DiscreteMeasure& m) {
  std::map<std::vector<double>, double, AtomLess> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto r = m.atoms()[i];
    std::vector<double> key(r.begin(), r.end());
    for (double& k : key) {
      if (k == 0.0) k = 0.0;
    }
    out.emplace(std::move(key), m.weights()[i]);
  }
  return out;
}

// Product with the convention inf * 0 = 0.
double times(double limit, double mass) { return mass == 0.0 ? 0.0 : limit * mass; }

}  // namespace

const DivergenceGenerator& generator(Divergence kind) { return table()[static_cast<std::size_t>(kind)]; }

const DivergenceGenerator& generator(const std::string& name) {
  for (const auto& g : table()) {
    if (g.name == name) return g;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown divergence '" + name + "' (expected kl, reverse_kl, js, tv, chi2)");
}

const std::vector<Divergence>& all_divergences() {
  static const std::vector<Divergence> all = {Divergence::KL, Divergence::ReverseKL, Divergence::JS,
                                              Divergence::TV, Divergence::Chi2};
  return all;
}

double f_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const DivergenceGenerator& g) {
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "measures differ in dimension");
  const auto pm = index(mu);
  const auto qm = index(nu);
  double shared = 0.0, shared_p = 0.0, shared_q = 0.0;
  std::size_t nu_only = 0, mu_only = 0;
  for (const auto& [x, q] : qm) {
    auto it = pm.find(x);
    if (it == pm.end()) {
      ++nu_only;
      continue;
    }
    shared += q * g.f(it->second / q);
    shared_p += it->second;
    shared_q += q;
  }
  for (const auto& [x, p] : pm) {
    if (!qm.count(x)) ++mu_only;
  }
  // Off-support masses as complements, so disjoint supports give exactly 1.
  const double nu_rest = nu_only ? std::max(0.0, 1.0 - shared_q) : 0.0;
  const double mu_rest = mu_only ? std::max(0.0, 1.0 - shared_p) : 0.0;
  double total = shared;
  total += times(g.f0, nu_rest);
  total += times(g.fstar0, mu_rest);
  return total;
}

bool supports_disjoint(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const auto pm = index(mu);
  for (const auto& [x, q] : index(nu)) {
    if (pm.count(x)) return false;
  }
  return true;
}

double singularity_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const DivergenceGenerator& g) {
  if (!g.strictly_convex) {
    throw Error(ErrorCode::DomainError, "the singular-pair identity needs a strictly convex generator; '" + g.name +
                                            "' is not");
  }
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "measures differ in dimension");
  if (!supports_disjoint(mu, nu)) throw Error(ErrorCode::NotSingular, "supports share at least one atom");
  const double value = 0.0 + g.f0 + g.fstar0;
  const double direct = f_divergence(mu, nu, g);
  if (!(value == direct || (std::isinf(value) && std::isinf(direct)))) {
    throw std::logic_error("singular-pair divergence disagrees with the direct formula");
  }
  return value;
}

}  // namespace gencap

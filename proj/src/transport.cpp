#include "gencap/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gencap/error.hpp"
#include "gencap/kernels.hpp"

namespace gencap {

std::vector<std::size_t> order_atoms(const DiscreteMeasure& mu) {
  const auto& x = mu.atoms();
  const std::size_t n = x.size();
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<char> used(n, 0);
  std::size_t cur = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (lex_less(x[i], x[cur])) cur = i;
  }
  order.push_back(cur);
  used[cur] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double dd = squared_distance(x[cur], x[i]);
      if (dd < best_d || (dd == best_d && lex_less(x[i], x[best]))) {
        best_d = dd;
        best = i;
      }
    }
    order.push_back(best);
    used[best] = 1;
    cur = best;
  }
  return order;
}

namespace {

double step_length(const DiscreteMeasure& mu, std::size_t i) { return distance(mu.atoms()[i], mu.atoms()[i - 1]); }

// (m p_i)^{1/p} |x_i - x_{i-1}|
double ramp_sup(const DiscreteMeasure& mu, std::size_t i, double p) {
  const double m = static_cast<double>(mu.size() - 1);
  return std::pow(m * mu.weights()[i], 1.0 / p) * step_length(mu, i);
}

}  // namespace

double feasibility_sup(const DiscreteMeasure& ordered, double p) {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ordered.size(); ++i) s = std::min(s, ramp_sup(ordered, i, p));
  return s;
}

TransportPlanSpec make_plan_spec(const DiscreteMeasure& target, const SourceDistribution& source, double p,
                                 std::optional<double> epsilon) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::DomainError, "p must be a finite number >= 1");
  auto ordering = order_atoms(target);
  PointSet atoms(target.dim());
  std::vector<double> w;
  for (std::size_t k : ordering) {
    atoms.push_back(target.atoms()[k]);
    w.push_back(target.weights()[k]);
  }
  DiscreteMeasure ordered = DiscreteMeasure::make(atoms, w);
  const double sup = feasibility_sup(ordered, p);
  double eps = 0.0;
  if (epsilon) {
    eps = *epsilon;
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::DomainError, "epsilon must be positive and finite");
    for (std::size_t i = 1; i < ordered.size(); ++i) {
      if (!(eps < ramp_sup(ordered, i, p))) throw InfeasibleEpsilonError(i, eps, sup);
    }
  } else {
    eps = ordered.size() > 1 ? 0.5 * sup : 1.0;
  }
  return TransportPlanSpec{std::move(ordered), source, eps, p, std::move(ordering)};
}

TransportMap synthesize_cpwl(const TransportPlanSpec& spec) {
  const auto& mu = spec.target;
  const std::size_t n = mu.size();
  TransportCertificate cert;
  cert.epsilon = spec.epsilon;
  cert.p = spec.p;
  cert.n_atoms = n;

  if (n == 1) {
    CpwlMap map = CpwlMap::constant(mu.atoms()[0]);
    cert.breakpoints = map.breakpoints();
    cert.plateau_mass = {1.0};
    return TransportMap{std::move(map), std::move(cert), mu};
  }

  const std::size_t m = n - 1;
  const double eps_p = std::pow(spec.epsilon, spec.p);
  std::vector<double> ramp(m);
  for (std::size_t i = 1; i <= m; ++i) {
    ramp[i - 1] = eps_p / (static_cast<double>(m) * std::pow(step_length(mu, i), spec.p));
    if (!(ramp[i - 1] < mu.weights()[i])) {
      throw InfeasibleEpsilonError(i, spec.epsilon, feasibility_sup(mu, spec.p));
    }
  }

  // Cumulative levels P_0, P_0 + r_1, P_1, P_1 + r_2, ..., P_{m-1} + r_m.
  std::vector<double> levels;
  levels.reserve(2 * m);
  double cum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    cum += mu.weights()[i];
    levels.push_back(cum);
    levels.push_back(cum + ramp[i]);
  }
  std::vector<double> z(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] > 0.0 && levels[k] < 1.0)) {
      throw Error(ErrorCode::EpsilonBelowResolution, "cumulative mass level leaves (0,1)");
    }
    z[k] = spec.source.quantile(levels[k]);
    if (k > 0 && !(z[k] > z[k - 1])) {
      throw Error(ErrorCode::EpsilonBelowResolution,
                  "ramp " + std::to_string(k / 2 + 1) +
                      " is narrower than the source quantile resolution; increase epsilon");
    }
  }

  PointSet vals(mu.dim());
  vals.reserve(z.size());
  for (std::size_t i = 0; i < m; ++i) {
    vals.push_back(mu.atoms()[i]);
    vals.push_back(mu.atoms()[i + 1]);
  }
  CpwlMap map(z, std::move(vals));

  // Realized masses through the source CDF.
  std::vector<double> F(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) F[k] = spec.source.cdf(z[k]);
  cert.plateau_mass.resize(n);
  cert.ramp_mass.resize(m);
  cert.plateau_mass[0] = F[0];
  double err = std::abs(F[0] - mu.weights()[0]);
  for (std::size_t i = 1; i <= m; ++i) {
    const double ramp_real = F[2 * i - 1] - F[2 * i - 2];
    const double plateau = (i < m ? F[2 * i] : 1.0) - F[2 * i - 1];
    cert.ramp_mass[i - 1] = ramp_real;
    cert.plateau_mass[i] = plateau;
    err = std::max(err, std::abs(ramp_real - ramp[i - 1]));
    err = std::max(err, std::abs(plateau - (mu.weights()[i] - ramp[i - 1])));
    cert.total_ramp_mass += ramp_real;
    cert.coupling_cost_bound += std::pow(step_length(mu, i), spec.p) * ramp_real;
  }
  cert.mass_check_max_abs_err = err;
  cert.breakpoints = map.breakpoints();
  return TransportMap{std::move(map), std::move(cert), mu};
}

Generator synthesize_network(const DiscreteMeasure& target, const SourceDistribution& source,
                             std::optional<double> epsilon, double p, const NetworkBudget& budget_in) {
  NetworkBudget budget = budget_in;
  budget.d = target.dim();
  const std::size_t cap = budget_max_atoms(budget);
  if (target.size() > cap) throw CapacityExceededError(target.size(), cap);
  auto tm = synthesize_cpwl(make_plan_spec(target, source, p, epsilon));
  auto net = compile_deep(tm.map, budget);
  return Generator{std::move(net), std::move(tm)};
}

NetworkBudget budget_for_atoms(std::size_t n, std::size_t d, std::size_t max_depth) {
  NetworkBudget best{0, 0, d};
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t L = 2; L <= std::max<std::size_t>(2, max_depth); L += 2) {
    for (std::size_t W = 7 * d + 1;; ++W) {
      const double cost = static_cast<double>(W) * static_cast<double>(W) * static_cast<double>(L);
      if (cost >= best_cost) break;
      if (budget_max_atoms({W, L, d}) >= n) {
        best = {W, L, d};
        best_cost = cost;
        break;
      }
    }
  }
  return best;
}

PointSet pushforward_sample(const ReluNetwork& net, const SourceDistribution& source, std::size_t n,
                            std::uint64_t seed) {
  const auto zs = source.sample(n, seed);
  return net.eval_batch(zs);
}

PointSet pushforward_sample(const CpwlMap& map, const SourceDistribution& source, std::size_t n,
                            std::uint64_t seed) {
  return map.eval(source.sample(n, seed));
}

CouplingEstimate coupling_estimate(const ReluNetwork& net, const TransportMap& tm,
                                   const SourceDistribution& source, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::DomainError, "need at least two samples");
  const auto& mu = tm.ordered_target;
  std::vector<double> cum(mu.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    acc += mu.weights()[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;

  Rng rng = make_rng(seed);
  std::vector<double> u(n), z(n);
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = uniform_open(rng);
    z[k] = source.quantile(u[k]);
  }
  const PointSet out = net.eval_batch(z);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    auto it = std::upper_bound(cum.begin(), cum.end(), u[k]);
    if (it == cum.end()) --it;
    const auto i = static_cast<std::size_t>(it - cum.begin());
    const double c = std::pow(distance(mu.atoms()[i], out[k]), tm.certificate.p);
    s1 += c;
    s2 += c * c;
  }
  CouplingEstimate est;
  est.samples = n;
  const double dn = static_cast<double>(n);
  est.mean_cost = s1 / dn;
  const double var = std::max(0.0, (s2 - s1 * s1 / dn) / (dn - 1.0));
  const double half = 1.96 * std::sqrt(var / dn);
  const double p = tm.certificate.p;
  est.wp = std::pow(est.mean_cost, 1.0 / p);
  est.ci = est.mean_cost > 0.0 ? half * std::pow(est.mean_cost, 1.0 / p - 1.0) / p : half;
  return est;
}

}  // namespace gencap

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gencap/measures.hpp"

namespace gencap {

struct PlanEntry {
  std::size_t i;
  std::size_t j;
  double mass;
};

/// Optimal coupling between two discrete measures with its dual
/// certificate. Duals satisfy f_i + g_j <= c_ij exactly (g is the c-transform
/// of f), so dual_value is a true lower bound on cost.
struct TransportPlan {
  DiscreteMeasure rows;
  DiscreteMeasure cols;
  double p;
  std::vector<PlanEntry> entries;  // nonzero entries of the plan
  double cost;                     // sum pi_ij |x_i - y_j|^p
  std::vector<double> f;           // row potentials
  std::vector<double> g;           // column potentials
  double dual_value;
  double dual_gap;  // |cost - dual_value| / max(cost, 1e-12 * max c_ij)
};

struct WassersteinResult {
  double value;  // W_p = cost^{1/p}
  TransportPlan plan;
};

inline constexpr std::size_t kMaxExactAtoms = 5000;

/// Exact W_p by network simplex. Throws DimensionMismatch, DomainError
/// (p < 1) or SizeLimit when a side has more than kMaxExactAtoms atoms.
WassersteinResult wasserstein_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Same problem solved with the slow textbook simplex (tests only).
WassersteinResult wasserstein_discrete_reference(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Quantile-coupling closed form on the real line. DimensionMismatch if d != 1.
double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Empirical measure of a point cloud. With snap > 0 coordinates are first
/// rounded to the grid snap * Z^d, which moves every point by at most
/// snap * sqrt(d) / 2 and merges numerically coincident outputs.
DiscreteMeasure empirical_measure(const PointSet& points, double snap = 0.0);

inline constexpr std::size_t kMaxQuantizationCells = 20'000'000;

/// W_p between two empirical measures: closed form for d = 1, network
/// simplex otherwise. After snapping, one side may exceed kMaxExactAtoms if
/// the other stays within it and the cost matrix has at most
/// kMaxQuantizationCells entries (a sample cloud against a nearly discrete
/// generator output).
double wasserstein_empirical(const PointSet& a, const PointSet& b, double p, double snap = 0.0);

/// Exact W_p between the empirical measure of a large sample cloud and a
/// small discrete measure (a quantizer output), under the same size rule as
/// wasserstein_empirical.
double quantization_error(const PointSet& samples, const DiscreteMeasure& nu, double p);

struct McOptions {
  std::size_t batch_a = 1000;
  std::size_t batch_b = 1000;
  std::size_t reps = 10;
  double snap = 0.0;
};

struct McEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 * sd / sqrt(reps)
  std::vector<double> values;
};

/// Two-sample Monte-Carlo estimate of W_p(A, B): mean over reps of the exact
/// distance between independent empirical batches. Biased upwards. Rep r
/// draws A with seed mix(seed + r, 0) and B with mix(seed + r, 1).
McEstimate wasserstein_mc(const PointSampler& a, const PointSampler& b, double p, std::size_t batch,
                          std::size_t reps, std::uint64_t seed);
McEstimate wasserstein_mc(const PointSampler& a, const PointSampler& b, double p, const McOptions& opt,
                          std::uint64_t seed);

std::uint64_t rep_seed(std::uint64_t seed, std::size_t rep, std::uint64_t stream);

/// Kantorovich-Rubinstein check for p = 1. The potential
/// psi(z) = min_j (|z - y_j| - g_j) is 1-Lipschitz by construction; the
/// check measures the Lipschitz slack on all atom pairs and the gap
/// |int psi dmu - int psi dnu - W_1|.
struct KrCheck {
  double gap = 0.0;               // relative to max(W_1, tiny)
  double abs_gap = 0.0;
  double lipschitz_excess = 0.0;  // max over pairs of |psi(z)-psi(z')| - |z-z'|, clipped at 0
  std::vector<double> psi_mu;
  std::vector<double> psi_nu;
};
KrCheck kr_dual_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const TransportPlan& plan);

// f-divergences ------------------------------------------------------------

enum class Divergence { KL, ReverseKL, JS, TV, Chi2 };

struct DivergenceGenerator {
  Divergence kind;
  std::string name;
  double (*f)(double);
  double f0;       // lim_{t->0} f(t), possibly +inf
  double fstar0;   // lim_{t->inf} f(t)/t, possibly +inf
  bool strictly_convex;
};

const DivergenceGenerator& generator(Divergence kind);
/// Accepts kl, reverse_kl, js, tv, chi2.
const DivergenceGenerator& generator(const std::string& name);
const std::vector<Divergence>& all_divergences();

/// D_f(mu || nu) with atoms matched by exact coordinate equality. Returns
/// +inf when the formula demands it.
double f_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const DivergenceGenerator& g);

/// f(0) + f*(0) for mutually singular measures, checked against
/// f_divergence. Throws DomainError for non-strictly-convex generators and
/// NotSingular when the supports share an atom.
double singularity_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const DivergenceGenerator& g);

bool supports_disjoint(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace gencap

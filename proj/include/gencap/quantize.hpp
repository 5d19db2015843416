#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "gencap/measures.hpp"

namespace gencap {

/// Greedy ball cover of a sample set. Balls are open: a sample is covered by
/// center c when |x - c| < radius.
struct CoveringResult {
  PointSet centers;
  std::vector<std::size_t> center_index;  // sample index of each center
  double radius = 0.0;
  double covered_mass = 0.0;              // assigned samples / all samples
  std::vector<std::ptrdiff_t> assignment;  // cell of each sample, -1 if uncovered
  std::vector<std::size_t> cell_size;
  bool complete = true;  // false if the center limit stopped the cover early
};

/// Repeatedly opens a ball at the sample covering the most uncovered samples
/// (lowest index on ties) until everything is covered.
CoveringResult greedy_cover(const PointSet& samples, double eps);

/// Same greedy order, stopping once covered_mass >= 1 - delta. The number of
/// centers is nonincreasing in delta on a fixed sample set.
/// max_centers aborts early (complete = false) once exceeded.
CoveringResult robust_cover(const PointSet& samples, double eps, double delta,
                            std::size_t max_centers = std::numeric_limits<std::size_t>::max());

/// Quantizer built from one robust cover: centers weighted by their cells,
/// the uncovered remainder placed on the origin. Uses the smallest radius
/// (bisection, relative width 1e-3) whose cover with delta = eps^{pq/(q-p)}
/// needs at most n-1 centers.
struct QuantizeResult {
  DiscreteMeasure measure;
  double radius;
  double uncovered_mass;
  /// (M_q^p + 1) eps^p, the bound the construction certifies for W_p^p.
  double bound;
};
QuantizeResult quantize_cover_detailed(const PointSet& samples, std::size_t n, double p, double q, double m_q);
DiscreteMeasure quantize_cover(const PointSet& samples, std::size_t n, double p, double q, double m_q);

enum class ShellRegime { Fast, Slow };
/// Fast when q > p + p/d: geometric atom allocation over floor(log2 n) - 1
/// shells. Otherwise ceil(p/(d(q-p)) log2 n) shells with equal allocation.
ShellRegime select_regime(double p, double q, std::size_t d);

struct ShellReport {
  ShellRegime regime;
  std::size_t k = 0;                    // shells B_0..B_k
  std::vector<std::size_t> shell_size;  // samples per shell
  std::vector<std::size_t> budget;      // centers granted per shell
  std::vector<double> radius;           // cover radius per shell (0 if unused)
  double tail_mass = 0.0;               // mass sent to the origin
};

/// Dyadic-shell quantizer: B_0 is the closed unit ball, B_j the shell
/// 2^{j-1} < |x| <= 2^j, and everything beyond 2^k (plus shells without a
/// budget) goes to an atom at the origin. Each shell is covered greedily
/// with the smallest radius fitting its budget.
DiscreteMeasure quantize_shells(const PointSet& samples, std::size_t n, double p, double q, double m_q,
                                ShellReport* report = nullptr);

struct LowerBoundProbe {
  double epsilon = 0.0;       // n^{-1/t}
  double witness_mass = 0.0;  // sample mass at distance >= epsilon from every atom
  bool activated = false;     // witness_mass >= delta
  double implied_bound = 0.0; // epsilon * witness_mass^{1/p} <= W_p(mu_hat, nu)
  std::size_t atoms = 0;
};

struct ProbeOptions {
  std::size_t samples = 10000;
  double q = 10.0;
};

/// Quantizes samples of the target with quantize_cover and measures how much
/// mass stays epsilon = n^{-1/t} away from all atoms.
LowerBoundProbe lower_bound_probe(const TargetSampler& sampler, std::size_t n, double p, double t, double delta,
                                  std::uint64_t seed, const ProbeOptions& opt = {});
LowerBoundProbe lower_bound_probe(const PointSet& samples, std::size_t n, double p, double t, double delta,
                                  double q = 10.0);

}  // namespace gencap

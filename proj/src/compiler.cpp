#include "gencap/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gencap/error.hpp"

namespace gencap {

void validate_budget(const NetworkBudget& b) {
  if (b.d == 0) throw Error(ErrorCode::BudgetTooSmall, "output dimension must be at least 1");
  if (b.W < 7 * b.d + 1) {
    throw Error(ErrorCode::BudgetTooSmall,
                "width " + std::to_string(b.W) + " is below 7d+1 = " + std::to_string(7 * b.d + 1));
  }
  if (b.L < 2) throw Error(ErrorCode::BudgetTooSmall, "depth " + std::to_string(b.L) + " is below 2");
}

std::size_t budget_max_breakpoints(const NetworkBudget& b) {
  validate_budget(b);
  const std::size_t wb = b.W - b.d - 1;
  return wb * (wb / (6 * b.d)) * (b.L / 2);
}

std::size_t budget_max_atoms(const NetworkBudget& b) { return budget_max_breakpoints(b) / 2 + 2; }

std::size_t param_count(std::size_t W, std::size_t L, std::size_t d) {
  return (L - 1) * W * W + (L + d + 1) * W + d;
}

DeepLayout plan_deep_layout(std::size_t N, const NetworkBudget& b) {
  const std::size_t cap = budget_max_breakpoints(b);
  if (N > cap) throw TooManyBreakpointsError(N, cap);
  DeepLayout lay;
  lay.principals = b.W - b.d - 1;
  lay.per_principal = lay.principals / (6 * b.d);
  const std::size_t chunk = lay.principals * lay.per_principal;
  lay.blocks = std::max<std::size_t>(1, (N + chunk - 1) / chunk);
  lay.group_slots = 6 * b.d * lay.per_principal;
  for (std::size_t k = 0; k < lay.blocks; ++k) {
    lay.widths.push_back(1 + lay.principals + b.d);
    lay.widths.push_back(1 + lay.group_slots + b.d);
  }
  lay.width = *std::max_element(lay.widths.begin(), lay.widths.end());
  lay.depth = lay.widths.size();
  return lay;
}

std::size_t shallow_max_breakpoints(std::size_t W, std::size_t d) {
  if (d == 0 || W < 6 * d) return 0;
  return (W / (6 * d)) * (W - 1);
}

namespace {

// A run of q*K consecutive breakpoints handled by one layer pair. y[0] is the
// breakpoint just before the run, y[q*K+1] the one just after; the principal
// breakpoints are y[q], y[2q], ..., y[qK]. Every hat sits at a principal
// p_j = y[jq] and is supported on [y[jq-m], y[jq+1]] for some m in 1..q.
struct Block {
  double left_kink = 0.0;
  std::size_t q = 0;
  std::size_t K = 0;
  std::vector<double> y;
  PointSet residual;  // values to reproduce at y[1..qK]; row k-1 for y[k]

  double principal(std::size_t j) const { return y[j * q]; }
  double kink(std::size_t j) const { return j == 0 ? left_kink : principal(j); }
};

struct Hat {
  std::size_t j = 0;
  std::size_t m = 0;
  double c = 0.0;  // magnitude; the sign lives on the group
};

struct Group {
  std::size_t comp = 0;
  double sign = 1.0;
  std::vector<Hat> hats;
  std::vector<double> w;  // [left kink input, principal 1..K]
  double bias = 0.0;
};

double relu(double x) { return x > 0.0 ? x : 0.0; }

double hat_value(const Block& blk, const Hat& h, double x) {
  const double a = blk.y[h.j * blk.q - h.m];
  const double p = blk.principal(h.j);
  const double b = blk.y[h.j * blk.q + 1];
  if (x <= a || x >= b) return 0.0;
  if (x <= p) return (x - a) / (p - a);
  return (b - x) / (b - p);
}

double group_eval(const Block& blk, const Group& g, double x) {
  double v = g.bias + g.w[0] * relu(x - blk.left_kink);
  for (std::size_t k = 1; k <= blk.K; ++k) v += g.w[k] * relu(x - blk.principal(k));
  return v;
}

// Hat coefficients by back substitution inside each principal's window: at
// y[jq-r] only hats with m > r are nonzero.
std::vector<std::vector<double>> solve_hats(const Block& blk, std::size_t comp) {
  const std::size_t q = blk.q;
  std::vector<std::vector<double>> coef(blk.K + 1, std::vector<double>(q + 1, 0.0));
  for (std::size_t j = 1; j <= blk.K; ++j) {
    const double p = blk.principal(j);
    auto& c = coef[j];
    for (std::size_t r = q; r-- > 0;) {
      const std::size_t k = j * q - r;
      const double yk = blk.y[k];
      double rest = blk.residual[k - 1][comp];
      for (std::size_t m = r + 2; m <= q; ++m) {
        const double a = blk.y[j * q - m];
        rest -= c[m] * (yk - a) / (p - a);
      }
      const double a = blk.y[j * q - r - 1];
      c[r + 1] = rest * (p - a) / (yk - a);
    }
  }
  return coef;
}

void fit_group(const Block& blk, Group& g, double floor_value) {
  const std::size_t K = blk.K;
  std::vector<double> vals(K + 1, -floor_value);
  double tail = 0.0;
  for (const Hat& h : g.hats) {
    const double a = blk.y[h.j * blk.q - h.m];
    const double b = blk.y[h.j * blk.q + 1];
    const double p = blk.principal(h.j);
    vals[h.j] = h.c;
    vals[h.j - 1] = h.c * (blk.kink(h.j - 1) - a) / (p - a);
    if (h.j < K) {
      vals[h.j + 1] = h.c * (b - blk.principal(h.j + 1)) / (b - p);
    } else {
      tail = -h.c / (b - p);
    }
  }
  g.w.assign(K + 1, 0.0);
  double prev = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    const double s = (k < K) ? (vals[k + 1] - vals[k]) / (blk.kink(k + 1) - blk.kink(k)) : tail;
    g.w[k] = s - prev;
    prev = s;
  }
  g.bias = vals[0];
}

// Splits the hats of one block into groups whose members are three or more
// principals apart, one group list per (component, sign).
std::vector<Group> build_groups(const Block& blk, std::size_t d) {
  std::vector<Group> groups;
  for (std::size_t comp = 0; comp < d; ++comp) {
    const auto coef = solve_hats(blk, comp);
    double vmax = 0.0;
    for (const auto& row : coef)
      for (double c : row) vmax = std::max(vmax, std::abs(c));
    for (double sign : {1.0, -1.0}) {
      std::vector<Group> mine;
      std::vector<std::ptrdiff_t> last;
      for (std::size_t j = 1; j <= blk.K; ++j) {
        for (std::size_t m = 1; m <= blk.q; ++m) {
          const double c = coef[j][m];
          if (c == 0.0 || (c > 0.0) != (sign > 0.0)) continue;
          std::size_t slot = 0;
          while (slot < mine.size() && static_cast<std::ptrdiff_t>(j) - last[slot] < 3) ++slot;
          if (slot == mine.size()) {
            mine.push_back(Group{comp, sign, {}, {}, 0.0});
            last.push_back(std::numeric_limits<std::ptrdiff_t>::min() / 2);
          }
          mine[slot].hats.push_back(Hat{j, m, std::abs(c)});
          last[slot] = static_cast<std::ptrdiff_t>(j);
        }
      }
      if (mine.size() > 3 * blk.q) throw std::logic_error("hat grouping exceeded 3q groups");
      for (auto& g : mine) {
        fit_group(blk, g, 1.0 + vmax);
        groups.push_back(std::move(g));
      }
    }
  }
  return groups;
}

// Every group must satisfy sigma(g) = sum of its hats at all kinks and
// breakpoints, and the signed group sums must reproduce the residual. The
// tolerance is a floating-point bound: it grows with the magnitude of the
// terms being summed, so badly spaced breakpoints (huge slopes) do not trip
// the check while algebraic mistakes, which are of the size of the
// coefficients themselves, still do.
void verify_block(const Block& blk, const std::vector<Group>& groups, std::size_t d) {
  std::vector<double> pts(blk.y.begin(), blk.y.end());
  pts.push_back(blk.left_kink);
  const double span = blk.y.back() - std::min(blk.left_kink, blk.y.front());
  pts.push_back(std::min(blk.left_kink, blk.y.front()) - 0.5 * span);
  pts.push_back(blk.y.back() + 0.5 * span);

  double scale = 1.0;
  for (const auto& g : groups) {
    for (const auto& h : g.hats) scale = std::max(scale, h.c);
    scale = std::max(scale, std::abs(g.bias));
  }

  std::vector<double> total(d), total_mag(d);
  for (std::size_t t = 0; t < pts.size(); ++t) {
    const double x = pts[t];
    std::fill(total.begin(), total.end(), 0.0);
    std::fill(total_mag.begin(), total_mag.end(), 0.0);
    for (const auto& g : groups) {
      double want = 0.0;
      for (const auto& h : g.hats) want += h.c * hat_value(blk, h, x);
      double mag = std::abs(g.bias) + std::abs(g.w[0]) * relu(x - blk.left_kink);
      for (std::size_t k = 1; k <= blk.K; ++k) mag += std::abs(g.w[k]) * relu(x - blk.principal(k));
      const double got = relu(group_eval(blk, g, x));
      const double tol = 1e-9 * scale + 1e-12 * mag;
      if (std::abs(got - want) > tol) {
        throw std::logic_error("hat group mismatch at x=" + std::to_string(x) + ": " + std::to_string(got) +
                               " vs " + std::to_string(want));
      }
      total[g.comp] += g.sign * want;
      total_mag[g.comp] += std::abs(want) + tol;
    }
    if (t >= 1 && t + 1 < blk.y.size()) {
      for (std::size_t i = 0; i < d; ++i) {
        if (std::abs(total[i] - blk.residual[t - 1][i]) > 1e-9 * scale + 1e-12 * total_mag[i]) {
          throw std::logic_error("hat expansion does not interpolate the residual");
        }
      }
    }
  }
}

}  // namespace

ReluNetwork compile_shallow(const CpwlMap& f_in, std::size_t W) {
  const std::size_t d = f_in.dim();
  if (W < 6 * d) {
    throw Error(ErrorCode::BudgetTooSmall, "width " + std::to_string(W) + " is below 6d = " + std::to_string(6 * d));
  }
  if (!f_in.zero_boundary()) throw Error(ErrorCode::NonzeroBoundary, "map must vanish at its outer breakpoints");
  const std::size_t cap = shallow_max_breakpoints(W, d);
  if (f_in.breakpoint_count() > cap) throw TooManyBreakpointsError(f_in.breakpoint_count(), cap);

  const CpwlMap f = pad_breakpoints(f_in, cap);
  Block blk;
  blk.q = W / (6 * d);
  blk.K = W - 1;
  blk.y = f.breakpoints();
  blk.left_kink = blk.y.front();
  blk.residual = PointSet(d);
  for (std::size_t k = 1; k + 1 < blk.y.size(); ++k) blk.residual.push_back(f.value(k));

  auto groups = build_groups(blk, d);
  verify_block(blk, groups, d);

  const std::size_t slots = 6 * d * blk.q;
  AffineLayer first(1, W);
  first.at(0, 0) = 1.0;
  first.bias[0] = -blk.left_kink;
  for (std::size_t j = 1; j <= blk.K; ++j) {
    first.at(j, 0) = 1.0;
    first.bias[j] = -blk.principal(j);
  }
  AffineLayer second(W, slots);
  AffineLayer out(slots, d);
  for (std::size_t s = 0; s < groups.size(); ++s) {
    for (std::size_t k = 0; k <= blk.K; ++k) second.at(s, k) = groups[s].w[k];
    second.bias[s] = groups[s].bias;
    out.at(groups[s].comp, s) = groups[s].sign;
  }
  return ReluNetwork({std::move(first), std::move(second), std::move(out)});
}

ReluNetwork compile_deep(const CpwlMap& f_in, const NetworkBudget& budget_in) {
  NetworkBudget budget = budget_in;
  budget.d = f_in.dim();
  const DeepLayout lay = plan_deep_layout(f_in.breakpoint_count(), budget);
  const std::size_t d = budget.d;
  const std::size_t K = lay.principals;
  const std::size_t q = lay.per_principal;
  const std::size_t G = lay.group_slots;
  const std::size_t B = lay.blocks;
  const std::size_t chunk = q * K;

  const double z0 = f_in.breakpoints().front();
  const double z1 = f_in.breakpoints().back();
  const double alpha = 1.0 / (z1 - z0);
  const double beta = -z0 * alpha;

  const CpwlMap g = pad_breakpoints(affine_reparam(f_in), B * chunk);
  const auto& y = g.breakpoints();
  const auto x0 = f_in.value(0);
  const auto x1 = f_in.value(f_in.breakpoints().size() - 1);
  std::vector<double> delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = x1[i] - x0[i];

  // Residual after the boundary ramp g0(u) = x0 + (x1 - x0) clamp(u).
  PointSet residual(d);
  std::vector<double> buf(d);
  for (std::size_t k = 0; k < y.size(); ++k) {
    auto v = g.value(k);
    for (std::size_t i = 0; i < d; ++i) buf[i] = v[i] - (x0[i] + delta[i] * y[k]);
    residual.push_back(buf);
  }

  // C_l bounds the running sum S_l = g0 + (hats of blocks < l); a CPwL attains
  // its extremes at breakpoints, where S_l is either f or g0.
  std::vector<std::vector<double>> C(B + 1, std::vector<double>(d, 0.0));
  for (std::size_t l = 1; l <= B; ++l) {
    for (std::size_t i = 0; i < d; ++i) {
      double m = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) {
        const double g0 = x0[i] + delta[i] * y[k];
        const double s = (k >= 1 && k <= (l - 1) * chunk) ? g.value(k)[i] : g0;
        m = std::max(m, std::abs(s));
      }
      C[l][i] = 1.0 + m;
    }
  }

  const std::size_t wa = 1 + K + d;
  const std::size_t wbw = 1 + G + d;
  std::vector<AffineLayer> layers;
  std::vector<Group> prev_groups;

  for (std::size_t b = 0; b < B; ++b) {
    Block blk;
    blk.q = q;
    blk.K = K;
    blk.left_kink = 0.0;
    blk.y.assign(y.begin() + static_cast<std::ptrdiff_t>(b * chunk),
                 y.begin() + static_cast<std::ptrdiff_t>((b + 1) * chunk + 2));
    blk.residual = PointSet(d);
    for (std::size_t k = 1; k <= chunk; ++k) blk.residual.push_back(residual[b * chunk + k]);
    auto groups = build_groups(blk, d);
    verify_block(blk, groups, d);

    // A layer: pass-through, principals, accumulators.
    if (b == 0) {
      AffineLayer A(1, wa);
      A.at(0, 0) = alpha;
      A.bias[0] = beta;
      for (std::size_t j = 1; j <= K; ++j) {
        A.at(j, 0) = alpha;
        A.bias[j] = beta - blk.principal(j);
      }
      A.at(1 + K, 0) = alpha;
      A.bias[1 + K] = beta - 1.0;
      layers.push_back(std::move(A));
    } else {
      AffineLayer A(wbw, wa);
      A.at(0, 0) = 1.0;
      for (std::size_t j = 1; j <= K; ++j) {
        A.at(j, 0) = 1.0;
        A.bias[j] = -blk.principal(j);
      }
      for (std::size_t i = 0; i < d; ++i) {
        A.at(1 + K + i, 1 + G + i) = 1.0;
        A.bias[1 + K + i] = C[b + 1][i] - C[b][i];
      }
      for (std::size_t s = 0; s < prev_groups.size(); ++s) {
        A.at(1 + K + prev_groups[s].comp, 1 + s) = prev_groups[s].sign;
      }
      layers.push_back(std::move(A));
    }

    // B layer: pass-through, hat groups, accumulators.
    AffineLayer Bl(wa, wbw);
    Bl.at(0, 0) = 1.0;
    if (b == 0) Bl.at(0, 1 + K) = -1.0;  // sigma(u) - sigma(u-1) = clamp(u)
    for (std::size_t s = 0; s < groups.size(); ++s) {
      Bl.at(1 + s, 0) = groups[s].w[0];
      for (std::size_t k = 1; k <= K; ++k) Bl.at(1 + s, k) = groups[s].w[k];
      Bl.bias[1 + s] = groups[s].bias;
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (b == 0) {
        Bl.at(1 + G + i, 0) = delta[i];
        Bl.at(1 + G + i, 1 + K) = -delta[i];
        Bl.bias[1 + G + i] = x0[i] + C[1][i];
      } else {
        Bl.at(1 + G + i, 1 + K + i) = 1.0;
      }
    }
    layers.push_back(std::move(Bl));
    prev_groups = std::move(groups);
  }

  AffineLayer out(wbw, d);
  for (std::size_t i = 0; i < d; ++i) {
    out.at(i, 1 + G + i) = 1.0;
    out.bias[i] = -C[B][i];
  }
  for (std::size_t s = 0; s < prev_groups.size(); ++s) out.at(prev_groups[s].comp, 1 + s) = prev_groups[s].sign;
  layers.push_back(std::move(out));
  return ReluNetwork(std::move(layers));
}

}  // namespace gencap

#include "gencap/detail/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace gencap::detail {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Arc ids: real arcs e = i * n2 + j run from row i to column node n1 + j;
// artificial arc E + v joins node v with the root (row -> root, root -> column).
struct Graph {
  std::size_t n1, n2, N, root, E;
  std::span<const double> cost;
  double art_cost;

  Graph(std::span<const double> a, std::span<const double> b, std::span<const double> c)
      : n1(a.size()), n2(b.size()), N(a.size() + b.size()), root(N), E(a.size() * b.size()), cost(c) {
    double cmax = 0.0;
    for (double x : c) cmax = std::max(cmax, std::abs(x));
    art_cost = (cmax + 1.0) * static_cast<double>(N + 1);
  }

  std::size_t src(std::size_t e) const {
    if (e < E) return e / n2;
    const std::size_t v = e - E;
    return v < n1 ? v : root;
  }
  std::size_t dst(std::size_t e) const {
    if (e < E) return n1 + e % n2;
    const std::size_t v = e - E;
    return v < n1 ? root : v;
  }
  double c(std::size_t e) const { return e < E ? cost[e] : art_cost; }
  double tolerance() const { return 1e-14 * art_cost; }
};

void check_inputs(std::span<const double> a, std::span<const double> b, std::span<const double> cost) {
  if (a.empty() || b.empty()) throw std::invalid_argument("transport problem with an empty side");
  if (cost.size() != a.size() * b.size()) throw std::invalid_argument("cost matrix has the wrong size");
}

TransportSolution finish(const Graph& g, const std::vector<double>& pi, std::vector<TransportSolution::Entry> flows,
                         std::size_t pivots) {
  TransportSolution s;
  s.flows = std::move(flows);
  std::sort(s.flows.begin(), s.flows.end(),
            [](const auto& x, const auto& y) { return x.i != y.i ? x.i < y.i : x.j < y.j; });
  s.u.resize(g.n1);
  s.v.resize(g.n2);
  for (std::size_t i = 0; i < g.n1; ++i) s.u[i] = -pi[i];
  for (std::size_t j = 0; j < g.n2; ++j) s.v[j] = pi[g.n1 + j];
  for (const auto& f : s.flows) s.cost += f.mass * g.cost[f.i * g.n2 + f.j];
  s.pivots = pivots;
  return s;
}

class FastSimplex {
 public:
  FastSimplex(std::span<const double> a, std::span<const double> b, std::span<const double> cost)
      : g_(a, b, cost),
        parent_(g_.N + 1, kNone),
        pred_(g_.N + 1, kNone),
        up_(g_.N + 1, 0),
        size_(g_.N + 1, 1),
        flow_(g_.N + 1, 0.0),
        pi_(g_.N + 1, 0.0),
        first_child_(g_.N + 1, kNone),
        next_sib_(g_.N + 1, kNone),
        prev_sib_(g_.N + 1, kNone) {
    for (std::size_t v = 0; v < g_.N; ++v) {
      link(v, g_.root);
      pred_[v] = g_.E + v;
      if (v < g_.n1) {
        up_[v] = 1;
        flow_[v] = a[v];
        pi_[v] = -g_.art_cost;
      } else {
        up_[v] = 0;
        flow_[v] = b[v - g_.n1];
        pi_[v] = g_.art_cost;
      }
    }
    size_[g_.root] = g_.N + 1;
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(g_.E))));
  }

  TransportSolution run() {
    std::size_t pivots = 0;
    const std::size_t limit = 64 * (g_.E + g_.N) + 1000;
    std::size_t e = 0;
    while (find_entering(e)) {
      pivot(e);
      if (++pivots > limit) throw std::runtime_error("network simplex exceeded its pivot limit");
    }
    std::vector<TransportSolution::Entry> flows;
    for (std::size_t v = 0; v < g_.N; ++v) {
      if (pred_[v] < g_.E && flow_[v] > 0.0) flows.push_back({g_.src(pred_[v]), g_.dst(pred_[v]) - g_.n1, flow_[v]});
    }
    return finish(g_, pi_, std::move(flows), pivots);
  }

 private:
  void link(std::size_t v, std::size_t p) {
    parent_[v] = p;
    prev_sib_[v] = kNone;
    next_sib_[v] = first_child_[p];
    if (first_child_[p] != kNone) prev_sib_[first_child_[p]] = v;
    first_child_[p] = v;
  }

  void unlink(std::size_t v) {
    const std::size_t p = parent_[v];
    if (prev_sib_[v] != kNone) {
      next_sib_[prev_sib_[v]] = next_sib_[v];
    } else {
      first_child_[p] = next_sib_[v];
    }
    if (next_sib_[v] != kNone) prev_sib_[next_sib_[v]] = prev_sib_[v];
    prev_sib_[v] = next_sib_[v] = kNone;
  }

  // Block search over real arcs, resuming where the last search stopped.
  bool find_entering(std::size_t& out) {
    const double tol = -g_.tolerance();
    const std::size_t n2 = g_.n2;
    const std::size_t E = g_.E;
    double best = tol;
    std::size_t cnt = block_;
    std::size_t e = next_;
    std::size_t i = e / n2, j = e % n2;
    for (std::size_t scanned = 0; scanned < E; ++scanned) {
      const double rc = g_.cost[e] + pi_[i] - pi_[g_.n1 + j];
      if (rc < best) {
        best = rc;
        out = e;
      }
      ++e;
      if (++j == n2) {
        j = 0;
        ++i;
        if (e == E) {
          e = 0;
          i = 0;
        }
      }
      if (--cnt == 0) {
        if (best < tol) {
          next_ = e;
          return true;
        }
        cnt = block_;
      }
    }
    if (best < tol) {
      next_ = e;
      return true;
    }
    return false;
  }

  // A proper ancestor is always strictly larger than its descendants, so
  // the smaller of two distinct nodes cannot be their common ancestor.
  std::size_t join(std::size_t u, std::size_t v) const {
    while (u != v) {
      if (size_[u] < size_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    return u;
  }

  void pivot(std::size_t e) {
    const std::size_t u = g_.src(e);
    const std::size_t v = g_.dst(e);
    const double rc = g_.c(e) + pi_[u] - pi_[v];
    const std::size_t top = join(u, v);

    // Strongly feasible rule: last blocking arc along the cycle orientation.
    double delta = std::numeric_limits<double>::infinity();
    std::size_t out = kNone;
    bool out_on_u_side = false;
    for (std::size_t x = u; x != top; x = parent_[x]) {
      if (up_[x] && flow_[x] < delta) {
        delta = flow_[x];
        out = x;
        out_on_u_side = true;
      }
    }
    for (std::size_t x = v; x != top; x = parent_[x]) {
      if (!up_[x] && flow_[x] <= delta) {
        delta = flow_[x];
        out = x;
        out_on_u_side = false;
      }
    }
    if (out == kNone) throw std::logic_error("unbounded transport problem");

    if (delta > 0.0) {
      for (std::size_t x = u; x != top; x = parent_[x]) flow_[x] += up_[x] ? -delta : delta;
      for (std::size_t x = v; x != top; x = parent_[x]) flow_[x] += up_[x] ? delta : -delta;
    }

    // Reverse the tree path from the entering endpoint to the leaving node.
    const std::size_t start = out_on_u_side ? u : v;
    const std::size_t new_parent = out_on_u_side ? v : u;
    const std::size_t moved = size_[out];
    for (std::size_t y = parent_[out]; y != kNone; y = parent_[y]) size_[y] -= moved;
    path_.clear();
    for (std::size_t y = start;; y = parent_[y]) {
      path_.push_back(y);
      if (y == out) break;
    }
    std::size_t x = start;
    std::size_t carry_pred = e;
    char carry_up = out_on_u_side ? 1 : 0;
    double carry_flow = delta;
    std::size_t attach = new_parent;
    while (true) {
      const std::size_t next = parent_[x];
      const std::size_t old_pred = pred_[x];
      const char old_up = up_[x];
      const double old_flow = flow_[x];
      unlink(x);
      link(x, attach);
      pred_[x] = carry_pred;
      up_[x] = carry_up;
      flow_[x] = carry_flow;
      if (x == out) break;
      carry_pred = old_pred;
      carry_up = static_cast<char>(!old_up);
      carry_flow = old_flow;
      attach = x;
      x = next;
    }

    // Old sizes along the reversed path are nested, s_0 < s_1 < ... < s_k;
    // after the reversal node x_i keeps s_i - s_{i-1} plus its new child.
    std::size_t below = 0;
    for (std::size_t k = path_.size(); k-- > 0;) {
      const std::size_t inner = k > 0 ? size_[path_[k - 1]] : 0;
      size_[path_[k]] = size_[path_[k]] - inner + below;
      below = size_[path_[k]];
    }
    for (std::size_t y = new_parent; y != kNone; y = parent_[y]) size_[y] += moved;

    // Potentials are defined up to a constant: shift whichever side of the
    // cut is smaller.
    const double shift = out_on_u_side ? -rc : rc;
    const bool inside = 2 * moved <= g_.N + 1;
    stack_.clear();
    stack_.push_back(inside ? start : g_.root);
    while (!stack_.empty()) {
      const std::size_t y = stack_.back();
      stack_.pop_back();
      pi_[y] += inside ? shift : -shift;
      for (std::size_t c = first_child_[y]; c != kNone; c = next_sib_[c]) {
        if (inside || c != start) stack_.push_back(c);
      }
    }
  }

  Graph g_;
  std::vector<std::size_t> parent_, pred_;
  std::vector<char> up_;
  std::vector<std::size_t> size_;
  std::vector<double> flow_, pi_;
  std::vector<std::size_t> first_child_, next_sib_, prev_sib_;
  std::vector<std::size_t> stack_, path_;
  std::size_t block_ = 10;
  std::size_t next_ = 0;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> a, std::span<const double> b,
                                  std::span<const double> cost) {
  check_inputs(a, b, cost);
  return FastSimplex(a, b, cost).run();
}

TransportSolution solve_transport_reference(std::span<const double> a, std::span<const double> b,
                                            std::span<const double> cost) {
  check_inputs(a, b, cost);
  const Graph g(a, b, cost);
  const std::size_t V = g.N + 1;

  // Basis: one arc per non-root node, with its flow.
  std::vector<std::size_t> basis(g.N);
  std::vector<double> bflow(g.N);
  for (std::size_t v = 0; v < g.N; ++v) {
    basis[v] = g.E + v;
    bflow[v] = v < g.n1 ? a[v] : b[v - g.n1];
  }

  std::vector<std::size_t> parent(V), via(V), depth(V);
  std::vector<double> pi(V);
  std::vector<std::vector<std::size_t>> adj(V);
  const double tol = -g.tolerance();
  std::size_t pivots = 0;
  const std::size_t limit = 64 * (g.E + g.N) + 1000;

  while (true) {
    // Rebuild the rooted tree and potentials from scratch.
    for (auto& l : adj) l.clear();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      adj[g.src(basis[k])].push_back(k);
      adj[g.dst(basis[k])].push_back(k);
    }
    std::fill(parent.begin(), parent.end(), kNone);
    std::deque<std::size_t> queue{g.root};
    parent[g.root] = g.root;
    depth[g.root] = 0;
    pi[g.root] = 0.0;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (std::size_t k : adj[x]) {
        const std::size_t e = basis[k];
        const std::size_t y = g.src(e) == x ? g.dst(e) : g.src(e);
        if (parent[y] != kNone) continue;
        parent[y] = x;
        via[y] = k;
        depth[y] = depth[x] + 1;
        // reduced cost c + pi[src] - pi[dst] = 0 on tree arcs
        pi[y] = g.src(e) == x ? pi[x] + g.c(e) : pi[x] - g.c(e);
        queue.push_back(y);
      }
    }

    // Dantzig pricing.
    double best = tol;
    std::size_t e = kNone;
    for (std::size_t f = 0; f < g.E; ++f) {
      const double rc = g.c(f) + pi[g.src(f)] - pi[g.dst(f)];
      if (rc < best) {
        best = rc;
        e = f;
      }
    }
    if (e == kNone) break;
    if (++pivots > limit) throw std::runtime_error("reference simplex exceeded its pivot limit");

    const std::size_t u = g.src(e), v = g.dst(e);
    std::size_t x = u, y = v;
    while (x != y) {
      if (depth[x] >= depth[y]) {
        x = parent[x];
      } else {
        y = parent[y];
      }
    }
    const std::size_t top = x;
    auto is_up = [&](std::size_t node) { return g.src(basis[via[node]]) == node; };
    double delta = std::numeric_limits<double>::infinity();
    std::size_t out = kNone;
    for (std::size_t w = u; w != top; w = parent[w]) {
      if (is_up(w) && bflow[via[w]] < delta) {
        delta = bflow[via[w]];
        out = w;
      }
    }
    for (std::size_t w = v; w != top; w = parent[w]) {
      if (!is_up(w) && bflow[via[w]] <= delta) {
        delta = bflow[via[w]];
        out = w;
      }
    }
    if (out == kNone) throw std::logic_error("unbounded transport problem");
    for (std::size_t w = u; w != top; w = parent[w]) bflow[via[w]] += is_up(w) ? -delta : delta;
    for (std::size_t w = v; w != top; w = parent[w]) bflow[via[w]] += is_up(w) ? delta : -delta;
    const std::size_t slot = via[out];
    basis[slot] = e;
    bflow[slot] = delta;
  }

  std::vector<TransportSolution::Entry> flows;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis[k] < g.E && bflow[k] > 0.0) flows.push_back({g.src(basis[k]), g.dst(basis[k]) - g.n1, bflow[k]});
  }
  return finish(g, pi, std::move(flows), pivots);
}

}  // namespace gencap::detail

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "liplearn/graph.hpp"
#include "liplearn/random.hpp"
#include "liplearn/shortest_path.hpp"

namespace liplearn {

/// Graph infinity Laplacian at vertex x:
///   min_y w_xy (u(y)-u(x)) + max_y w_xy (u(y)-u(x)),
/// min/max over stored (positive-weight) neighbors.
inline double inf_laplacian(const GeometricGraph& g, const GraphFunction& u, int x) {
  const auto nbrs = g.row_neighbors(x);
  const auto wts = g.row_weights(x);
  if (nbrs.empty()) throw std::runtime_error("inf_laplacian: isolated vertex " + std::to_string(x));
  double lo = kUnreachable, hi = -kUnreachable;
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    const double t = wts[k] * (u[nbrs[k]] - u[x]);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return lo + hi;
}

namespace detail {

/// Root of F(t) = min_y w_y (v_y - t) + max_y w_y (v_y - t). F is continuous,
/// strictly decreasing, and piecewise linear with F(min v) >= 0 >= F(max v).
/// Bisection on [min v, max v]; each step the active (max, min) pair yields
/// the closed-form candidate t = (w_i v_i + w_j v_j) / (w_i + w_j), which is
/// exact once the pair stabilizes. Ties in the min/max scans go to the lowest
/// index.
template <class WFn, class VFn>
double local_solve_n(int m, WFn w, VFn v) {
  if (m < 1) throw std::invalid_argument("local_solve: no neighbors");
  double lo = v(0), hi = v(0), wmax = w(0);
  for (int k = 1; k < m; ++k) {
    lo = std::min(lo, v(k));
    hi = std::max(hi, v(k));
    wmax = std::max(wmax, w(k));
  }
  if (lo == hi) return lo;
  const double range = hi - lo;
  const double accept = 0.5e-12 * wmax * (range + 1.0);

  int arg_max = 0, arg_min = 0;
  const auto eval = [&](double t) {
    double fmin = kUnreachable, fmax = -kUnreachable;
    for (int k = 0; k < m; ++k) {
      const double term = w(k) * (v(k) - t);
      if (term > fmax) {
        fmax = term;
        arg_max = k;
      }
      if (term < fmin) {
        fmin = term;
        arg_min = k;
      }
    }
    return fmin + fmax;
  };

  double best_t = 0.5 * (lo + hi);
  double best_f = kUnreachable;
  for (int iter = 0; iter < 120; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = eval(mid);
    if (std::abs(fmid) < std::abs(best_f)) {
      best_f = fmid;
      best_t = mid;
    }
    const int i = arg_max, j = arg_min;
    const double cand = (w(i) * v(i) + w(j) * v(j)) / (w(i) + w(j));
    if (cand >= lo && cand <= hi) {
      const double fcand = eval(cand);
      if (std::abs(fcand) < std::abs(best_f)) {
        best_f = fcand;
        best_t = cand;
      }
      if (std::abs(fcand) <= accept) return cand;
      if (fcand > 0.0) lo = std::max(lo, cand); else hi = std::min(hi, cand);
    }
    if (fmid > 0.0) lo = std::max(lo, mid); else hi = std::min(hi, mid);
    if (hi - lo <= 1e-13 * (range + 1.0)) break;
  }
  return best_t;
}

}  // namespace detail

/// Value t making the infinity Laplacian vanish at a vertex with the given
/// neighbor weights and values.
inline double local_solve(std::span<const double> neighbor_weights,
                          std::span<const double> neighbor_values) {
  if (neighbor_weights.size() != neighbor_values.size())
    throw std::invalid_argument("local_solve: size mismatch");
  return detail::local_solve_n(
      static_cast<int>(neighbor_weights.size()),
      [&](int k) { return neighbor_weights[k]; }, [&](int k) { return neighbor_values[k]; });
}

enum class SweepMode { GaussSeidel, Jacobi };

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 100000;
  bool warm_start = true;  // nearest-label initialization; zero init for oracle cross-checks
  SweepMode mode = SweepMode::GaussSeidel;
  // After each Gauss-Seidel sweep, attempt a policy-iteration step: freeze the
  // active min/max neighbor pairs, solve the resulting sparse linear system,
  // and accept the iterate only if it lowers the residual. Same fixed point,
  // far fewer sweeps on large graphs. Off in Jacobi (oracle) mode.
  bool accelerate = true;
};

namespace detail {

/// One policy-iteration candidate: with the argmax/argmin neighbor of every
/// unlabeled vertex frozen (ties to lowest index), the infinity Laplacian
/// becomes linear; solve that system with the labels as boundary data.
/// Returns false when the factorization fails or produces non-finite values
/// (a policy subgraph can lose contact with the labels).
inline bool policy_step(const GeometricGraph& g, const std::vector<int>& unlabeled,
                        const std::vector<int>& row_of, const GraphFunction& u,
                        GraphFunction& out) {
  const int m = static_cast<int>(unlabeled.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * static_cast<std::size_t>(m));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);

  for (int row = 0; row < m; ++row) {
    const int x = unlabeled[row];
    const auto nbrs = g.row_neighbors(x);
    const auto wts = g.row_weights(x);
    if (nbrs.empty()) return false;
    int arg_max = 0, arg_min = 0;
    double fmax = wts[0] * (u[nbrs[0]] - u[x]);
    double fmin = fmax;
    for (std::size_t k = 1; k < nbrs.size(); ++k) {
      const double t = wts[k] * (u[nbrs[k]] - u[x]);
      if (t > fmax) {
        fmax = t;
        arg_max = static_cast<int>(k);
      }
      if (t < fmin) {
        fmin = t;
        arg_min = static_cast<int>(k);
      }
    }
    double diag = 0.0;
    for (const int k : {arg_max, arg_min}) {
      const int y = nbrs[k];
      const double w = wts[k];
      diag += w;
      if (row_of[y] >= 0) {
        triplets.emplace_back(row, row_of[y], -w);
      } else {
        rhs[row] += w * u[y];  // labeled neighbor: boundary datum
      }
    }
    triplets.emplace_back(row, row, diag);
  }

  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) return false;
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) return false;

  out = u;
  for (int row = 0; row < m; ++row) {
    if (!std::isfinite(sol[row])) return false;
    out[unlabeled[row]] = sol[row];
  }
  return true;
}

}  // namespace detail

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  double wall_time = 0.0;
  std::vector<double> residual_history;
};

/// Solves the Lipschitz learning problem: u = g on the labels and the graph
/// infinity Laplacian vanishing (to tolerance) everywhere else. Sweeps apply
/// the local solve per unlabeled vertex in fixed index order. The residual is
/// normalized by (label range + 1).
inline std::pair<GraphFunction, SolveReport> solve_amle(const GeometricGraph& g,
                                                        const LabelSet& labels,
                                                        const SolveOptions& opts = {}) {
  const auto t_start = std::chrono::steady_clock::now();
  if (labels.indices.empty()) throw std::invalid_argument("solve_amle: no labels");
  if (labels.indices.size() != labels.values.size())
    throw std::invalid_argument("solve_amle: label index/value size mismatch");

  std::vector<char> labeled(g.n, 0);
  double g_min = labels.values[0], g_max = labels.values[0];
  for (std::size_t k = 0; k < labels.indices.size(); ++k) {
    const int v = labels.indices[k];
    if (v < 0 || v >= g.n) throw std::invalid_argument("solve_amle: label index out of range");
    if (labeled[v]) throw std::invalid_argument("solve_amle: duplicate label index");
    labeled[v] = 1;
    g_min = std::min(g_min, labels.values[k]);
    g_max = std::max(g_max, labels.values[k]);
  }
  const double tol_abs = opts.tol * (g_max - g_min + 1.0);

  // Connectivity check and warm start in one multi-source pass.
  std::vector<int> origin;
  const GraphFunction label_dist = detail::dijkstra(g, labels.indices, {}, &origin);
  for (int x = 0; x < g.n; ++x) {
    if (label_dist[x] == kUnreachable)
      throw std::runtime_error("solve_amle: vertex " + std::to_string(x) +
                               " is not connected to any labeled vertex");
  }

  GraphFunction u(g.n, 0.0);
  if (opts.warm_start) {
    for (int x = 0; x < g.n; ++x) u[x] = labels.values[origin[x]];
  }
  for (std::size_t k = 0; k < labels.indices.size(); ++k) u[labels.indices[k]] = labels.values[k];

  std::vector<int> unlabeled;
  std::vector<int> row_of(g.n, -1);
  for (int x = 0; x < g.n; ++x) {
    if (!labeled[x]) {
      row_of[x] = static_cast<int>(unlabeled.size());
      unlabeled.push_back(x);
    }
  }

  SolveReport report;
  const auto residual = [&](const GraphFunction& f) {
    double r = 0.0;
    for (int x : unlabeled) r = std::max(r, std::abs(inf_laplacian(g, f, x)));
    return r;
  };

  if (unlabeled.empty()) {
    report.converged = true;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {u, report};
  }

  GraphFunction next = u;  // Jacobi double buffer
  double res = residual(u);
  // The reported residual is that of the best iterate so far, so the history
  // is nonincreasing even when an individual sweep backtracks.
  GraphFunction best_u = u;
  double best_res = res;
  report.residual_history.push_back(best_res);
  while (best_res > tol_abs && report.iterations < opts.max_iter) {
    if (opts.mode == SweepMode::GaussSeidel) {
      for (int x : unlabeled) {
        const auto nbrs = g.row_neighbors(x);
        const auto wts = g.row_weights(x);
        u[x] = detail::local_solve_n(
            static_cast<int>(nbrs.size()), [&](int k) { return wts[k]; },
            [&](int k) { return u[nbrs[k]]; });
      }
    } else {
      for (int x : unlabeled) {
        const auto nbrs = g.row_neighbors(x);
        const auto wts = g.row_weights(x);
        next[x] = detail::local_solve_n(
            static_cast<int>(nbrs.size()), [&](int k) { return wts[k]; },
            [&](int k) { return u[nbrs[k]]; });
      }
      for (int x : unlabeled) u[x] = next[x];
    }
    ++report.iterations;
    res = residual(u);
    if (opts.accelerate && opts.mode == SweepMode::GaussSeidel && res > tol_abs) {
      // Inner policy iteration: re-freeze the active pairs and re-solve,
      // following the policy sequence even through temporary residual
      // increases (min-max policies can cycle). Only the best iterate is
      // published, so the reported residuals stay monotone.
      GraphFunction inner = u, candidate, inner_best;
      double inner_best_res = res;
      int stale = 0;
      for (int step = 0; step < 150 && stale < 25; ++step) {
        if (!detail::policy_step(g, unlabeled, row_of, inner, candidate)) break;
        // Half step towards the policy solution: the undamped iteration can
        // cycle between policies, the damped one settles reliably.
        for (int x : unlabeled) inner[x] = 0.5 * (inner[x] + candidate[x]);
        const double inner_res = residual(inner);
        if (inner_res < inner_best_res) {
          inner_best_res = inner_res;
          inner_best = inner;
          stale = 0;
        } else {
          ++stale;
        }
        if (inner_best_res <= tol_abs) break;
      }
      if (inner_best_res < res) {
        u = std::move(inner_best);
        res = inner_best_res;
      }
    }
    if (res < best_res) {
      best_res = res;
      best_u = u;
    }
    report.residual_history.push_back(best_res);
  }
  u = std::move(best_u);
  report.final_residual = best_res;
  report.converged = best_res <= tol_abs;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {u, report};
}

/// Spot check of comparison with graph distance functions: for random triples
/// (a >= 0, apex z, subset X' of unlabeled vertices with z outside), the max
/// of u - a*d_n(.,z) over the closure of X' must be attained on the boundary,
/// and symmetrically for the min of u + a*d_n(.,z). Returns the largest
/// positive violation over all trials; subsets with empty boundary are
/// skipped (counted in *skipped when given).
inline double comparison_with_cones_check(const GeometricGraph& g, const GraphFunction& u,
                                          const LabelSet& labels, int trials, std::uint64_t seed,
                                          int* skipped = nullptr) {
  if (trials < 1) throw std::invalid_argument("comparison_with_cones_check: trials must be >= 1");
  std::vector<char> labeled(g.n, 0);
  for (int v : labels.indices) labeled[v] = 1;
  std::vector<int> unlabeled;
  for (int x = 0; x < g.n; ++x) {
    if (!labeled[x]) unlabeled.push_back(x);
  }
  double g_min = labels.values[0], g_max = labels.values[0];
  for (double v : labels.values) {
    g_min = std::min(g_min, v);
    g_max = std::max(g_max, v);
  }

  Rng rng(seed);
  double worst = 0.0;
  int skip_count = 0;
  std::vector<char> in_subset(g.n, 0);
  for (int trial = 0; trial < trials; ++trial) {
    const double a = rng.uniform(0.0, 2.0 * (g_max - g_min + 1.0));
    const int z = rng.uniform_int(g.n);

    // Random nonempty subset of the unlabeled vertices, apex excluded.
    std::vector<int> pool = unlabeled;
    std::erase(pool, z);
    if (pool.empty()) {
      ++skip_count;
      continue;
    }
    const int size = 1 + rng.uniform_int(static_cast<int>(pool.size()));
    for (int k = 0; k < size; ++k) {
      const int j = k + rng.uniform_int(static_cast<int>(pool.size()) - k);
      std::swap(pool[k], pool[j]);
    }
    pool.resize(size);
    std::fill(in_subset.begin(), in_subset.end(), 0);
    for (int x : pool) in_subset[x] = 1;

    std::vector<int> boundary;
    for (int x = 0; x < g.n; ++x) {
      if (in_subset[x]) continue;
      for (int y : g.row_neighbors(x)) {
        if (in_subset[y]) {
          boundary.push_back(x);
          break;
        }
      }
    }
    if (boundary.empty()) {
      ++skip_count;
      continue;
    }

    const GraphFunction d = graph_distance_from(g, z);
    double max_closure = -kUnreachable, max_boundary = -kUnreachable;
    double min_closure = kUnreachable, min_boundary = kUnreachable;
    const auto visit = [&](int x, bool on_boundary) {
      if (d[x] == kUnreachable) return;
      const double upper = u[x] - a * d[x];
      const double lower = u[x] + a * d[x];
      max_closure = std::max(max_closure, upper);
      min_closure = std::min(min_closure, lower);
      if (on_boundary) {
        max_boundary = std::max(max_boundary, upper);
        min_boundary = std::min(min_boundary, lower);
      }
    };
    for (int x : pool) visit(x, false);
    for (int x : boundary) visit(x, true);
    if (max_boundary == -kUnreachable) continue;
    worst = std::max(worst, max_closure - max_boundary);
    worst = std::max(worst, min_boundary - min_closure);
  }
  if (skipped) *skipped = skip_count;
  return std::max(worst, 0.0);
}

}  // namespace liplearn

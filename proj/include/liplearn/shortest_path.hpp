#pragma once

#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "liplearn/graph.hpp"

namespace liplearn {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

namespace detail {

/// Multi-source Dijkstra with edge lengths 1/w. Binary heap with lazy
/// deletion. If `origin` is non-null it receives, per vertex, the index into
/// `sources` of the winning source (ties resolved by first finalization).
inline GraphFunction dijkstra(const GeometricGraph& g, std::span<const int> sources,
                              std::span<const double> source_offsets = {},
                              std::vector<int>* origin = nullptr) {
  GraphFunction dist(g.n, kUnreachable);
  if (origin) origin->assign(g.n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<char> done(g.n, 0);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const int v = sources[s];
    if (v < 0 || v >= g.n) throw std::invalid_argument("dijkstra: source out of range");
    const double d0 = source_offsets.empty() ? 0.0 : source_offsets[s];
    if (d0 < dist[v]) {
      dist[v] = d0;
      if (origin) (*origin)[v] = static_cast<int>(s);
      heap.emplace(d0, v);
    }
  }
  while (!heap.empty()) {
    const auto [d, x] = heap.top();
    heap.pop();
    if (done[x]) continue;
    done[x] = 1;
    const auto nbrs = g.row_neighbors(x);
    const auto wts = g.row_weights(x);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const int y = nbrs[k];
      const double nd = d + 1.0 / wts[k];
      if (nd < dist[y]) {
        dist[y] = nd;
        if (origin) (*origin)[y] = (*origin)[x];
        heap.emplace(nd, y);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// d_n(., source): shortest-path distances with edge lengths 1/w.
/// Unreachable vertices carry +infinity.
inline GraphFunction graph_distance_from(const GeometricGraph& g, int source) {
  const int sources[1] = {source};
  return detail::dijkstra(g, sources);
}

/// Pointwise min over sources of single-source distances, in one pass.
inline GraphFunction graph_distance_from_set(const GeometricGraph& g,
                                             std::span<const int> sources) {
  if (sources.empty()) throw std::invalid_argument("graph_distance_from_set: no sources");
  return detail::dijkstra(g, sources);
}

/// max over reachable x != z of |max_y w_xy (u(x) - u(y)) - 1|. Zero (up to
/// rounding) exactly when u is the graph distance from z.
inline double eikonal_residual(const GeometricGraph& g, const GraphFunction& u, int z) {
  if (static_cast<int>(u.size()) != g.n) throw std::invalid_argument("eikonal_residual: size mismatch");
  double worst = 0.0;
  for (int x = 0; x < g.n; ++x) {
    if (x == z || u[x] == kUnreachable) continue;
    const auto nbrs = g.row_neighbors(x);
    const auto wts = g.row_weights(x);
    double best = -kUnreachable;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const int y = nbrs[k];
      if (u[y] == kUnreachable) continue;
      best = std::max(best, wts[k] * (u[x] - u[y]));
    }
    if (best == -kUnreachable) continue;  // no reachable neighbor
    worst = std::max(worst, std::abs(best - 1.0));
  }
  return worst;
}

/// max over pairs x != y in `subset` of |u(x)-u(y)| / d_n(x,y). Runs one
/// Dijkstra per subset vertex. Throws if the subset is disconnected.
inline double lipschitz_constant(const GeometricGraph& g, const GraphFunction& u,
                                 std::span<const int> subset) {
  if (subset.size() < 2) throw std::invalid_argument("lipschitz_constant: need >= 2 vertices");
  double lip = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    const GraphFunction dist = graph_distance_from(g, subset[a]);
    for (std::size_t b = 0; b < subset.size(); ++b) {
      if (a == b) continue;
      const int y = subset[b];
      if (dist[y] == kUnreachable)
        throw std::runtime_error("lipschitz_constant: disconnected subset");
      if (dist[y] > 0.0) lip = std::max(lip, std::abs(u[subset[a]] - u[y]) / dist[y]);
    }
  }
  return lip;
}

}  // namespace liplearn

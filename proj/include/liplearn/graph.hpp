#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "liplearn/cell_grid.hpp"
#include "liplearn/kernel.hpp"
#include "liplearn/point_cloud.hpp"

namespace liplearn {

/// One real value per vertex. Distances use the floating-point infinity
/// sentinel for unreachable vertices.
using GraphFunction = std::vector<double>;

/// Symmetric epsilon-ball graph at bandwidth h in compressed sparse form.
/// Rows are sorted by neighbor index; every stored weight is positive and
/// corresponds to 0 < |x_i - x_j| <= h.
struct GeometricGraph {
  int n = 0;
  double h = 0.0;
  KernelProfile kernel = KernelProfile::constant();
  std::vector<int> offsets;    // length n+1
  std::vector<int> neighbors;  // flat adjacency
  std::vector<double> weights;

  int degree(int i) const { return offsets[i + 1] - offsets[i]; }

  std::span<const int> row_neighbors(int i) const {
    return {neighbors.data() + offsets[i], static_cast<std::size_t>(degree(i))};
  }

  std::span<const double> row_weights(int i) const {
    return {weights.data() + offsets[i], static_cast<std::size_t>(degree(i))};
  }

  std::size_t edge_count() const { return neighbors.size() / 2; }
};

/// Builds the graph with exactly the pairs 0 < |x_i - x_j| <= h, weighted by
/// the kernel. Uses a cell grid of side h, so each point is compared only
/// against its 3x3 cell neighborhood; output matches the all-pairs scan.
/// Points at identical coordinates get no edge (distance 0).
inline GeometricGraph build_graph(const PointCloud& cloud, const KernelProfile& kernel, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("build_graph: h must be positive");
  if (cloud.points.empty()) throw std::invalid_argument("build_graph: empty cloud");

  const int n = cloud.size();
  GeometricGraph g;
  g.n = n;
  g.h = h;
  g.kernel = kernel;

  const CellGrid grid(cloud.points, h);
  std::vector<int> degree(n, 0);
  std::vector<std::pair<int, double>> half_edges;  // (j, w) for each i<j pair, grouped by i
  std::vector<int> half_offsets(n + 1, 0);

  // First pass: count; second pass: fill. Both passes iterate identically.
  for (int pass = 0; pass < 2; ++pass) {
    if (pass == 1) {
      for (int i = 0; i < n; ++i) half_offsets[i + 1] = half_offsets[i] + degree[i];
      half_edges.resize(half_offsets[n]);
      std::fill(degree.begin(), degree.end(), 0);
    }
    for (int i = 0; i < n; ++i) {
      grid.for_each_in_ball(cloud.points[i], h, [&](int j) {
        if (j <= i) return;
        const double r = distance(cloud.points[i], cloud.points[j]);
        if (r == 0.0 || r > h) return;
        if (pass == 0) {
          ++degree[i];
        } else {
          half_edges[half_offsets[i] + degree[i]++] = {j, kernel.edge_weight(h, r)};
        }
      });
    }
  }

  // Mirror into a full symmetric CSR with rows sorted by neighbor index.
  std::vector<int> full_degree(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int k = half_offsets[i]; k < half_offsets[i + 1]; ++k) {
      ++full_degree[i];
      ++full_degree[half_edges[k].first];
    }
  }
  g.offsets.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + full_degree[i];
  g.neighbors.resize(g.offsets[n]);
  g.weights.resize(g.offsets[n]);
  std::vector<int> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (int i = 0; i < n; ++i) {
    for (int k = half_offsets[i]; k < half_offsets[i + 1]; ++k) {
      const auto [j, w] = half_edges[k];
      g.neighbors[cursor[i]] = j;
      g.weights[cursor[i]++] = w;
      g.neighbors[cursor[j]] = i;
      g.weights[cursor[j]++] = w;
    }
  }
  for (int i = 0; i < n; ++i) {
    std::vector<int> order(full_degree[i]);
    for (int k = 0; k < full_degree[i]; ++k) order[k] = k;
    const int base = g.offsets[i];
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return g.neighbors[base + a] < g.neighbors[base + b]; });
    std::vector<int> nbr(full_degree[i]);
    std::vector<double> wts(full_degree[i]);
    for (int k = 0; k < full_degree[i]; ++k) {
      nbr[k] = g.neighbors[base + order[k]];
      wts[k] = g.weights[base + order[k]];
    }
    std::copy(nbr.begin(), nbr.end(), g.neighbors.begin() + base);
    std::copy(wts.begin(), wts.end(), g.weights.begin() + base);
  }
  return g;
}

struct DegreeStats {
  int min = 0;
  double mean = 0.0;
  int max = 0;
};

inline DegreeStats degree_stats(const GeometricGraph& g) {
  DegreeStats s;
  if (g.n == 0) return s;
  s.min = g.degree(0);
  s.max = g.degree(0);
  long long total = 0;
  for (int i = 0; i < g.n; ++i) {
    const int d = g.degree(i);
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
    total += d;
  }
  s.mean = static_cast<double>(total) / g.n;
  return s;
}

}  // namespace liplearn

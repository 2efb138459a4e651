#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "liplearn/cell_grid.hpp"
#include "liplearn/domain.hpp"
#include "liplearn/point.hpp"
#include "liplearn/random.hpp"

namespace liplearn {

/// Vertices sampled from a continuum domain, with optional label bookkeeping
/// and an estimated graph resolution. Immutable by convention once built.
struct PointCloud {
  std::vector<Point> points;
  std::vector<int> label_indices;  // sorted, distinct
  std::uint64_t seed = 0;
  std::optional<double> resolution_estimate;

  int size() const { return static_cast<int>(points.size()); }
};

struct LabelSet {
  std::vector<int> indices;
  std::vector<double> values;

  int size() const { return static_cast<int>(indices.size()); }
};

/// n i.i.d. uniform samples from the domain, by rejection from the bounding
/// box. Deterministic given the seed.
inline PointCloud sample_uniform(const Domain& domain, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
  const auto [lo, hi] = domain.bounding_box();
  Rng rng(seed);
  PointCloud cloud;
  cloud.seed = seed;
  cloud.points.reserve(n);
  std::int64_t attempts = 0;
  while (cloud.size() < n) {
    const Point p{rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1])};
    ++attempts;
    if (domain.contains(p)) cloud.points.push_back(p);
    if (attempts >= 10000 && static_cast<double>(cloud.size()) / attempts < 1e-3)
      throw std::runtime_error("sample_uniform: rejection acceptance rate below 1e-3");
  }
  return cloud;
}

/// argmin_i |x - points[i]|, ties broken by lowest index. Linear scan; use a
/// CellGrid for bulk queries (tests check both agree).
inline int closest_point_projection(const PointCloud& cloud, const Point& x) {
  if (cloud.points.empty()) throw std::invalid_argument("closest_point_projection: empty cloud");
  double best = std::numeric_limits<double>::infinity();
  int best_idx = -1;
  for (int i = 0; i < cloud.size(); ++i) {
    const double d2 = squared_distance(cloud.points[i], x);
    if (d2 < best) {
      best = d2;
      best_idx = i;
    }
  }
  return best_idx;
}

/// Estimate of the graph resolution delta_n: the farthest any point of a
/// deterministic reference grid (spacing <= reference_spacing, intersected
/// with the domain) lies from the cloud, joined with the Hausdorff distance
/// between labeled points and the continuum label set when one is given.
/// Underestimates the true Hausdorff distance by at most
/// reference_spacing * sqrt(2) / 2.
inline double estimate_resolution(const PointCloud& cloud, const Domain& domain,
                                  double reference_spacing,
                                  const std::vector<Point>* continuum_labels = nullptr) {
  if (!(reference_spacing > 0.0))
    throw std::invalid_argument("estimate_resolution: reference_spacing must be positive");
  if (cloud.points.empty()) throw std::invalid_argument("estimate_resolution: empty cloud");

  const auto [lo, hi] = domain.bounding_box();
  const int mx = std::max(1, static_cast<int>(std::ceil((hi[0] - lo[0]) / reference_spacing)));
  const int my = std::max(1, static_cast<int>(std::ceil((hi[1] - lo[1]) / reference_spacing)));
  const double sx = (hi[0] - lo[0]) / mx;
  const double sy = (hi[1] - lo[1]) / my;

  const CellGrid grid(cloud.points, std::max(reference_spacing, 4.0 * std::max(sx, sy)));
  double worst = -1.0;
  bool any = false;
  for (int iy = 0; iy <= my; ++iy) {
    for (int ix = 0; ix <= mx; ++ix) {
      const Point g{lo[0] + ix * sx, lo[1] + iy * sy};
      if (!domain.contains(g)) continue;
      any = true;
      const int j = grid.nearest(g);
      worst = std::max(worst, distance(g, cloud.points[j]));
    }
  }
  if (!any) throw std::runtime_error("estimate_resolution: reference grid misses the domain");

  if (continuum_labels != nullptr && !continuum_labels->empty()) {
    if (cloud.label_indices.empty())
      throw std::invalid_argument("estimate_resolution: continuum labels given but cloud has none");
    double hausdorff = 0.0;
    for (const Point& z : *continuum_labels) {
      double d = std::numeric_limits<double>::infinity();
      for (int i : cloud.label_indices) d = std::min(d, distance(z, cloud.points[i]));
      hausdorff = std::max(hausdorff, d);
    }
    for (int i : cloud.label_indices) {
      double d = std::numeric_limits<double>::infinity();
      for (const Point& z : *continuum_labels) d = std::min(d, distance(z, cloud.points[i]));
      hausdorff = std::max(hausdorff, d);
    }
    worst = std::max(worst, hausdorff);
  }
  return worst;
}

enum class ConstraintMode { ClosestPoint, Dilated };

/// Discrete constraint set from continuum label points. ClosestPoint takes
/// the nearest vertex per label point; Dilated takes every vertex within
/// `radius` of some label point, valued by `label_function` (default: the
/// value of the nearest label point).
inline LabelSet build_constraint_set(
    const PointCloud& cloud, const std::vector<std::pair<Point, double>>& continuum_labels,
    ConstraintMode mode, double radius = 0.0,
    const std::function<double(const Point&)>* label_function = nullptr) {
  if (continuum_labels.empty())
    throw std::invalid_argument("build_constraint_set: no continuum labels");
  LabelSet out;
  if (mode == ConstraintMode::ClosestPoint) {
    for (const auto& [z, value] : continuum_labels) {
      const int idx = closest_point_projection(cloud, z);
      if (std::find(out.indices.begin(), out.indices.end(), idx) == out.indices.end()) {
        out.indices.push_back(idx);
        out.values.push_back(value);
      }
    }
  } else {
    if (!(radius > 0.0))
      throw std::invalid_argument("build_constraint_set: dilated mode needs radius > 0");
    for (int i = 0; i < cloud.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      double nearest_value = 0.0;
      for (const auto& [z, value] : continuum_labels) {
        const double d = distance(cloud.points[i], z);
        if (d < best) {
          best = d;
          nearest_value = value;
        }
      }
      if (best <= radius) {
        out.indices.push_back(i);
        out.values.push_back(label_function ? (*label_function)(cloud.points[i]) : nearest_value);
      }
    }
    if (out.indices.empty())
      throw std::runtime_error("build_constraint_set: dilated set is empty");
  }
  return out;
}

}  // namespace liplearn

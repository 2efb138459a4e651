#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "liplearn/point.hpp"

namespace liplearn {

/// Uniform bucket grid for fixed-radius and nearest-neighbor queries over a
/// static point set. Buckets hold point indices in ascending order, so every
/// traversal is deterministic.
class CellGrid {
 public:
  CellGrid(const std::vector<Point>& points, double cell_size)
      : points_(points), cell_(cell_size) {
    if (points.empty()) throw std::invalid_argument("CellGrid: empty point set");
    if (!(cell_size > 0.0)) throw std::invalid_argument("CellGrid: cell size must be positive");
    lo_ = hi_ = points[0];
    for (const Point& p : points) {
      lo_[0] = std::min(lo_[0], p[0]);
      lo_[1] = std::min(lo_[1], p[1]);
      hi_[0] = std::max(hi_[0], p[0]);
      hi_[1] = std::max(hi_[1], p[1]);
    }
    nx_ = static_cast<int>(std::floor((hi_[0] - lo_[0]) / cell_)) + 1;
    ny_ = static_cast<int>(std::floor((hi_[1] - lo_[1]) / cell_)) + 1;
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int i = 0; i < static_cast<int>(points.size()); ++i)
      cells_[cell_index(points[i])].push_back(i);
  }

  /// Visit indices of all points with |p - x| <= r, in ascending index order
  /// within each cell (cells scanned row-major).
  template <class Fn>
  void for_each_in_ball(const Point& x, double r, Fn&& fn) const {
    const double r2 = r * r;
    const int cx0 = clamp_x(static_cast<int>(std::floor((x[0] - r - lo_[0]) / cell_)));
    const int cx1 = clamp_x(static_cast<int>(std::floor((x[0] + r - lo_[0]) / cell_)));
    const int cy0 = clamp_y(static_cast<int>(std::floor((x[1] - r - lo_[1]) / cell_)));
    const int cy1 = clamp_y(static_cast<int>(std::floor((x[1] + r - lo_[1]) / cell_)));
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) {
        for (int i : cells_[static_cast<std::size_t>(cy) * nx_ + cx]) {
          if (squared_distance(points_[i], x) <= r2) fn(i);
        }
      }
    }
  }

  /// Index of the closest point to x; ties broken by lowest index.
  int nearest(const Point& x) const {
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    const int qx = clamp_x(static_cast<int>(std::floor((x[0] - lo_[0]) / cell_)));
    const int qy = clamp_y(static_cast<int>(std::floor((x[1] - lo_[1]) / cell_)));
    const int max_ring = std::max(nx_, ny_);
    for (int ring = 0; ring <= max_ring; ++ring) {
      // Once a candidate is known, stop as soon as the ring cannot contain
      // anything closer.
      if (best_idx >= 0) {
        const double ring_min = (ring - 1) * cell_;
        if (ring_min > 0.0 && ring_min * ring_min > best) break;
      }
      scan_ring(x, qx, qy, ring, best, best_idx);
    }
    return best_idx;
  }

 private:
  int clamp_x(int c) const { return std::clamp(c, 0, nx_ - 1); }
  int clamp_y(int c) const { return std::clamp(c, 0, ny_ - 1); }

  std::size_t cell_index(const Point& p) const {
    const int cx = clamp_x(static_cast<int>(std::floor((p[0] - lo_[0]) / cell_)));
    const int cy = clamp_y(static_cast<int>(std::floor((p[1] - lo_[1]) / cell_)));
    return static_cast<std::size_t>(cy) * nx_ + cx;
  }

  void scan_cell(const Point& x, int cx, int cy, double& best, int& best_idx) const {
    if (cx < 0 || cx >= nx_ || cy < 0 || cy >= ny_) return;
    for (int i : cells_[static_cast<std::size_t>(cy) * nx_ + cx]) {
      const double d2 = squared_distance(points_[i], x);
      if (d2 < best || (d2 == best && i < best_idx)) {
        best = d2;
        best_idx = i;
      }
    }
  }

  void scan_ring(const Point& x, int qx, int qy, int ring, double& best, int& best_idx) const {
    if (ring == 0) {
      scan_cell(x, qx, qy, best, best_idx);
      return;
    }
    for (int cx = qx - ring; cx <= qx + ring; ++cx) {
      scan_cell(x, cx, qy - ring, best, best_idx);
      scan_cell(x, cx, qy + ring, best, best_idx);
    }
    for (int cy = qy - ring + 1; cy <= qy + ring - 1; ++cy) {
      scan_cell(x, qx - ring, cy, best, best_idx);
      scan_cell(x, qx + ring, cy, best, best_idx);
    }
  }

  std::vector<Point> points_;  // owned copy; the grid stays valid on its own
  double cell_;
  Point lo_{0, 0}, hi_{0, 0};
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> cells_;
};

}  // namespace liplearn

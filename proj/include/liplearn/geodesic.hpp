#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>
#include <vector>

#include "liplearn/cell_grid.hpp"
#include "liplearn/domain.hpp"
#include "liplearn/point.hpp"
#include "liplearn/point_cloud.hpp"

namespace liplearn {

struct GeodesicParams {
  int n_oracle = 200000;
  double h_oracle = 0.02;
  std::uint64_t seed = 987654321;
};

/// A geodesic distance estimate with a certified two-sided band:
/// value / upper_factor <= d_Omega <= value / lower_factor.
struct GeodesicResult {
  double value = 0.0;
  double lower_factor = 1.0;  // (1 - phi(h)/h) * d_Omega <= value
  double upper_factor = 1.0;  // value <= upper_factor * d_Omega
};

/// Geodesic distances on a domain. Convex variants are exact (Euclidean).
/// Non-convex variants use the graph distance of the singular kernel
/// eta(t) = 1/t on a dense auxiliary cloud: edge lengths then equal Euclidean
/// lengths, so the only errors are the certified cone-bound factors
/// (tau_eta = 0). Distance fields from a source vertex are memoized.
class GeodesicOracle {
 public:
  GeodesicOracle(Domain domain, GeodesicParams params = {})
      : domain_(std::move(domain)), params_(params) {
    if (!domain_.convex()) {
      cloud_ = sample_uniform(domain_, params_.n_oracle, params_.seed);
      grid_ = std::make_unique<CellGrid>(cloud_.points, params_.h_oracle);
      delta_ = estimate_resolution(cloud_, domain_, params_.h_oracle / 4.0);
      const double h = params_.h_oracle;
      lower_factor_ = 1.0 - domain_.phi(h) / h;
      // Lemma 5.3 factors with t0 = 1 and tau_eta = 0 for the singular kernel.
      upper_factor_ = 1.0 + 4.0 * delta_ / h + 2.0 * domain_.phi(delta_) / h;
    }
  }

  const Domain& domain() const { return domain_; }
  double resolution() const { return delta_; }

  GeodesicResult distance(const Point& x, const Point& y) {
    if (!domain_.contains(x) || !domain_.contains(y))
      throw std::invalid_argument("geodesic: point outside the domain");
    if (domain_.convex()) return {liplearn::distance(x, y), 1.0, 1.0};
    if (x == y) return {0.0, lower_factor_, upper_factor_};
    const int sx = grid_->nearest(x);
    const int sy = grid_->nearest(y);
    if (sx == sy) return {0.0, lower_factor_, upper_factor_};
    const std::vector<double>& dist = field(sx);
    const double d = dist[sy];
    if (!std::isfinite(d)) throw std::runtime_error("geodesic: oracle graph is disconnected");
    return {d, lower_factor_, upper_factor_};
  }

  /// Distances from the oracle vertex nearest to x, for bulk queries
  /// (e.g. geodesic balls). Valid only on non-convex domains.
  const std::vector<double>& field_from(const Point& x, int* source_vertex = nullptr) {
    if (domain_.convex()) throw std::logic_error("geodesic: field_from needs a non-convex domain");
    const int s = grid_->nearest(x);
    if (source_vertex) *source_vertex = s;
    return field(s);
  }

  int project(const Point& x) const { return grid_->nearest(x); }
  const PointCloud& oracle_cloud() const { return cloud_; }

 private:
  /// Dijkstra over the implicit epsilon-graph of the oracle cloud: neighbors
  /// are found on the fly through the cell grid, edge length = Euclidean
  /// distance (the singular-kernel edge length).
  const std::vector<double>& field(int source) {
    auto it = memo_.find(source);
    if (it != memo_.end()) return it->second;
    const int n = cloud_.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<char> done(n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      const auto [d, x] = heap.top();
      heap.pop();
      if (done[x]) continue;
      done[x] = 1;
      grid_->for_each_in_ball(cloud_.points[x], params_.h_oracle, [&](int y) {
        if (done[y]) return;
        const double r = liplearn::distance(cloud_.points[x], cloud_.points[y]);
        if (r == 0.0) return;
        const double nd = d + r;
        if (nd < dist[y]) {
          dist[y] = nd;
          heap.emplace(nd, y);
        }
      });
    }
    if (memo_.size() >= kMemoCap) memo_.erase(memo_.begin());
    return memo_.emplace(source, std::move(dist)).first->second;
  }

  static constexpr std::size_t kMemoCap = 64;

  Domain domain_;
  GeodesicParams params_;
  PointCloud cloud_;
  std::unique_ptr<CellGrid> grid_;
  double delta_ = 0.0;
  double lower_factor_ = 1.0;
  double upper_factor_ = 1.0;
  std::map<int, std::vector<double>> memo_;
};

/// One-off geodesic distance query. Heavy users should hold a GeodesicOracle
/// to reuse the auxiliary cloud and memoized fields.
inline GeodesicResult geodesic_oracle(const Domain& domain, const Point& x, const Point& y,
                                      const GeodesicParams& params = {}) {
  GeodesicOracle oracle(domain, params);
  return oracle.distance(x, y);
}

}  // namespace liplearn

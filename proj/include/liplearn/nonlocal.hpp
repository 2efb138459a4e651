#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "liplearn/cell_grid.hpp"
#include "liplearn/domain.hpp"
#include "liplearn/geodesic.hpp"
#include "liplearn/graph.hpp"
#include "liplearn/point_cloud.hpp"
#include "liplearn/scaling.hpp"

namespace liplearn {

/// Piecewise-constant extension of a graph function: the value at the
/// closest cloud vertex, constant on each Voronoi cell.
inline double extend_piecewise_constant(const PointCloud& cloud, const GraphFunction& u,
                                        const Point& x) {
  if (static_cast<int>(u.size()) != cloud.size())
    throw std::invalid_argument("extend_piecewise_constant: size mismatch");
  return u[closest_point_projection(cloud, x)];
}

enum class BallMode { Sup, Inf };
enum class BallMetric { Euclidean, Oracle };

/// sup (or inf) of u over cloud points within geodesic distance eps of x.
/// The Euclidean metric is only valid on convex domains; on non-convex ones
/// pass an oracle. Throws when the ball contains no cloud point (eps below
/// the resolution).
inline double ball_extension(const PointCloud& cloud, const GraphFunction& u, const Point& x,
                             double eps, BallMode mode, BallMetric metric, const Domain& domain,
                             GeodesicOracle* oracle = nullptr) {
  if (!(eps > 0.0)) throw std::invalid_argument("ball_extension: eps must be positive");
  if (static_cast<int>(u.size()) != cloud.size())
    throw std::invalid_argument("ball_extension: size mismatch");
  if (metric == BallMetric::Euclidean && !domain.convex())
    throw std::invalid_argument("ball_extension: Euclidean metric needs a convex domain");
  if (metric == BallMetric::Oracle && !domain.convex() && oracle == nullptr)
    throw std::invalid_argument("ball_extension: non-convex oracle metric needs a GeodesicOracle");

  double best = (mode == BallMode::Sup) ? -std::numeric_limits<double>::infinity()
                                        : std::numeric_limits<double>::infinity();
  bool any = false;
  const std::vector<double>* field = nullptr;
  if (metric == BallMetric::Oracle && !domain.convex()) field = &oracle->field_from(x);
  for (int i = 0; i < cloud.size(); ++i) {
    const double euclid = distance(cloud.points[i], x);
    if (euclid > eps) continue;  // geodesic >= Euclidean, so this prunes safely
    double d = euclid;
    if (field) d = (*field)[oracle->project(cloud.points[i])];
    if (d > eps) continue;
    any = true;
    if (mode == BallMode::Sup) best = std::max(best, u[i]); else best = std::min(best, u[i]);
  }
  if (!any) throw std::runtime_error("ball_extension: empty ball (eps below resolution)");
  return best;
}

struct NonlocalOps {
  double T_sup = 0.0;    // sup of the field over the closed eps-ball
  double T_inf = 0.0;    // inf over the same ball
  double S_plus = 0.0;   // (T_sup - u(x)) / eps
  double S_minus = 0.0;  // (u(x) - T_inf) / eps
  double delta_eps = 0.0;  // (S_plus - S_minus) / eps
};

/// Evaluates the ball operators of a continuum field at x by discretizing
/// the closed geodesic eps-ball with a regular grid (spacing <= eps/10,
/// anchored at the domain's bounding box so results are deterministic).
/// Sup/inf errors are bounded by Lip(field) * spacing * sqrt(2).
inline NonlocalOps nonlocal_operators(const std::function<double(const Point&)>& field,
                                      const Point& x, double eps, double ball_grid_spacing,
                                      const Domain& domain, GeodesicOracle* oracle = nullptr) {
  if (!domain.contains(x)) throw std::invalid_argument("nonlocal_operators: x outside domain");
  if (!(eps > 0.0)) throw std::invalid_argument("nonlocal_operators: eps must be positive");
  if (!(ball_grid_spacing > 0.0 && ball_grid_spacing <= eps / 10.0))
    throw std::invalid_argument("nonlocal_operators: grid spacing must be in (0, eps/10]");
  if (!domain.convex() && oracle == nullptr)
    throw std::invalid_argument("nonlocal_operators: non-convex domain needs a GeodesicOracle");

  const auto [lo, hi] = domain.bounding_box();
  const double s = ball_grid_spacing;
  const std::vector<double>* geo = nullptr;
  if (!domain.convex()) geo = &oracle->field_from(x);

  const int ix0 = static_cast<int>(std::ceil((x[0] - eps - lo[0]) / s));
  const int ix1 = static_cast<int>(std::floor((x[0] + eps - lo[0]) / s));
  const int iy0 = static_cast<int>(std::ceil((x[1] - eps - lo[1]) / s));
  const int iy1 = static_cast<int>(std::floor((x[1] + eps - lo[1]) / s));

  NonlocalOps ops;
  double t_sup = -std::numeric_limits<double>::infinity();
  double t_inf = std::numeric_limits<double>::infinity();
  bool any = false;
  const auto consider = [&](const Point& p) {
    if (!domain.contains(p)) return;
    const double d = geo ? (*geo)[oracle->project(p)] : distance(p, x);
    if (d > eps) return;
    const double v = field(p);
    t_sup = std::max(t_sup, v);
    t_inf = std::min(t_inf, v);
    any = true;
  };
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) consider({lo[0] + ix * s, lo[1] + iy * s});
  }
  consider(x);  // the center belongs to the closed ball regardless of the grid
  if (!any) throw std::runtime_error("nonlocal_operators: grid does not intersect the ball");

  const double ux = field(x);
  ops.T_sup = t_sup;
  ops.T_inf = t_inf;
  ops.S_plus = (t_sup - ux) / eps;
  ops.S_minus = (ux - t_inf) / eps;
  ops.delta_eps = (ops.S_plus - ops.S_minus) / eps;
  return ops;
}

struct MaxBallReport {
  double max_superviolation = 0.0;  // largest positive -Delta_eps of the sup extension
  double max_subviolation = 0.0;    // largest positive +Delta_eps of the inf extension
  double predicted_scale = 0.0;     // delta/(h eps) + h/eps^2 + phi(h)/(h eps)
  int points_checked = 0;
};

/// Checks that the eps-ball extensions of a solved graph function are
/// approximate sub/supersolutions of the nonlocal equation, at grid points
/// farther than 2*eps + 3*delta from the label set. Reports raw violations
/// together with the predicted error scale; no absolute constant is
/// asserted.
inline MaxBallReport max_ball_check(const GraphFunction& u_graph, const GeometricGraph& graph,
                                    const PointCloud& cloud, const Domain& domain, double eps,
                                    const std::vector<Point>& labels_continuum,
                                    double grid_spacing, GeodesicOracle* oracle = nullptr) {
  if (!cloud.resolution_estimate)
    throw std::invalid_argument("max_ball_check: cloud needs a resolution estimate");
  const double delta = *cloud.resolution_estimate;
  const double h = graph.h;
  const ScalingReport scaling = check_scaling_assumption(delta, h, eps, graph.kernel, domain);
  if (!scaling.pass)
    throw std::invalid_argument("max_ball_check: (delta, h, eps) violate the scaling assumption");
  if (!domain.convex() && oracle == nullptr)
    throw std::invalid_argument("max_ball_check: non-convex domain needs a GeodesicOracle");

  const CellGrid cloud_grid(cloud.points, eps);
  const auto ball_value = [&](const Point& y, BallMode mode) {
    double best = (mode == BallMode::Sup) ? -std::numeric_limits<double>::infinity()
                                          : std::numeric_limits<double>::infinity();
    bool any = false;
    const std::vector<double>* geo = nullptr;
    if (!domain.convex()) geo = &oracle->field_from(y);
    cloud_grid.for_each_in_ball(y, eps, [&](int i) {
      double d = distance(cloud.points[i], y);
      if (geo) d = (*geo)[oracle->project(cloud.points[i])];
      if (d > eps) return;
      any = true;
      if (mode == BallMode::Sup) best = std::max(best, u_graph[i]);
      else best = std::min(best, u_graph[i]);
    });
    if (!any) throw std::runtime_error("max_ball_check: empty ball around a grid point");
    return best;
  };
  const std::function<double(const Point&)> sup_field = [&](const Point& y) {
    return ball_value(y, BallMode::Sup);
  };
  const std::function<double(const Point&)> inf_field = [&](const Point& y) {
    return ball_value(y, BallMode::Inf);
  };

  const double margin = 2.0 * eps + 3.0 * delta;
  const auto [lo, hi] = domain.bounding_box();
  const double outer = 2.0 * grid_spacing;
  const int mx = static_cast<int>(std::floor((hi[0] - lo[0]) / outer));
  const int my = static_cast<int>(std::floor((hi[1] - lo[1]) / outer));

  MaxBallReport report;
  report.predicted_scale = delta / (h * eps) + h / (eps * eps) + domain.phi(h) / (h * eps);
  for (int iy = 0; iy <= my; ++iy) {
    for (int ix = 0; ix <= mx; ++ix) {
      const Point p{lo[0] + ix * outer, lo[1] + iy * outer};
      if (!domain.contains(p)) continue;
      double label_dist = std::numeric_limits<double>::infinity();
      for (const Point& z : labels_continuum) {
        double d = distance(p, z);
        if (!domain.convex()) d = oracle->distance(p, z).value;
        label_dist = std::min(label_dist, d);
      }
      if (!(label_dist > margin)) continue;
      const NonlocalOps sup_ops = nonlocal_operators(sup_field, p, eps, grid_spacing, domain, oracle);
      const NonlocalOps inf_ops = nonlocal_operators(inf_field, p, eps, grid_spacing, domain, oracle);
      report.max_superviolation = std::max(report.max_superviolation, -sup_ops.delta_eps);
      report.max_subviolation = std::max(report.max_subviolation, inf_ops.delta_eps);
      ++report.points_checked;
    }
  }
  if (report.points_checked == 0)
    throw std::runtime_error("max_ball_check: no admissible grid points (eps too large)");
  return report;
}

}  // namespace liplearn

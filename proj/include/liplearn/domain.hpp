#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "liplearn/point.hpp"

namespace liplearn {

enum class DomainVariant { Box, Ball, ConvexPolygon, LpStar };

/// Regularity modulus phi(s) = C * s^alpha relating geodesic and Euclidean
/// distances: d_Omega(x,y) <= |x-y| + phi(|x-y|) for |x-y| <= r_Omega.
/// Convex domains carry C = 0.
struct Modulus {
  double C = 0.0;
  double alpha = 1.5;
};

/// A planar continuum region. The built-in variants are an axis-aligned box,
/// a disk, a strictly convex polygon, and the l_{2/3} unit ball
/// {|x1|^{2/3} + |x2|^{2/3} <= 1} ("star"), the only non-convex one.
class Domain {
 public:
  static Domain box(Point lo, Point hi) {
    if (!(lo[0] < hi[0] && lo[1] < hi[1]))
      throw std::invalid_argument("box: lo must be strictly below hi");
    Domain d;
    d.variant_ = DomainVariant::Box;
    d.lo_ = lo;
    d.hi_ = hi;
    d.finish_convex();
    return d;
  }

  static Domain ball(Point center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
    Domain d;
    d.variant_ = DomainVariant::Ball;
    d.center_ = center;
    d.radius_ = radius;
    d.lo_ = {center[0] - radius, center[1] - radius};
    d.hi_ = {center[0] + radius, center[1] + radius};
    d.finish_convex();
    return d;
  }

  static Domain convex_polygon(std::vector<Point> ccw_vertices) {
    if (ccw_vertices.size() < 3)
      throw std::invalid_argument("polygon: need at least 3 vertices");
    const auto& v = ccw_vertices;
    const int m = static_cast<int>(v.size());
    for (int i = 0; i < m; ++i) {
      const Point a = v[(i + 1) % m] - v[i];
      const Point b = v[(i + 2) % m] - v[(i + 1) % m];
      if (!(cross(a, b) > 0.0))
        throw std::invalid_argument("polygon: vertices must be strictly convex and counterclockwise");
    }
    Domain d;
    d.variant_ = DomainVariant::ConvexPolygon;
    d.vertices_ = std::move(ccw_vertices);
    d.lo_ = d.hi_ = d.vertices_[0];
    for (const Point& p : d.vertices_) {
      d.lo_[0] = std::min(d.lo_[0], p[0]);
      d.lo_[1] = std::min(d.lo_[1], p[1]);
      d.hi_[0] = std::max(d.hi_[0], p[0]);
      d.hi_[1] = std::max(d.hi_[1], p[1]);
    }
    d.finish_convex();
    return d;
  }

  /// The paper never pins the star's modulus constant; it is a knob here.
  static Domain lp_star(double modulus_constant = 3.0) {
    Domain d;
    d.variant_ = DomainVariant::LpStar;
    d.lo_ = {-1.0, -1.0};
    d.hi_ = {1.0, 1.0};
    d.modulus_ = {modulus_constant, 1.5};
    d.r_omega_ = 1.0;
    return d;
  }

  DomainVariant variant() const { return variant_; }
  bool convex() const { return variant_ != DomainVariant::LpStar; }
  const Modulus& modulus() const { return modulus_; }
  double r_omega() const { return r_omega_; }
  std::pair<Point, Point> bounding_box() const { return {lo_, hi_}; }

  double diameter() const { return distance(lo_, hi_); }

  double phi(double s) const {
    return modulus_.C == 0.0 ? 0.0 : modulus_.C * std::pow(s, modulus_.alpha);
  }

  /// sigma_phi(h) = sup_{0<s<=h} phi(s)/s; monotone since alpha > 1.
  double sigma_phi(double h) const {
    return modulus_.C == 0.0 ? 0.0 : modulus_.C * std::pow(h, modulus_.alpha - 1.0);
  }

  bool contains(const Point& x) const {
    switch (variant_) {
      case DomainVariant::Box:
        return x[0] >= lo_[0] && x[0] <= hi_[0] && x[1] >= lo_[1] && x[1] <= hi_[1];
      case DomainVariant::Ball:
        return distance(x, center_) <= radius_;
      case DomainVariant::ConvexPolygon: {
        const int m = static_cast<int>(vertices_.size());
        for (int i = 0; i < m; ++i) {
          const Point edge = vertices_[(i + 1) % m] - vertices_[i];
          if (cross(edge, x - vertices_[i]) < 0.0) return false;
        }
        return true;
      }
      case DomainVariant::LpStar:
        return std::cbrt(x[0] * x[0]) + std::cbrt(x[1] * x[1]) <= 1.0;
    }
    return false;
  }

 private:
  Domain() = default;

  void finish_convex() {
    modulus_ = {0.0, 1.5};
    r_omega_ = diameter();
  }

  DomainVariant variant_ = DomainVariant::Box;
  Point lo_{0.0, 0.0};
  Point hi_{1.0, 1.0};
  Point center_{0.0, 0.0};
  double radius_ = 1.0;
  std::vector<Point> vertices_;
  Modulus modulus_;
  double r_omega_ = 1.0;
};

}  // namespace liplearn

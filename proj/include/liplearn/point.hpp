#pragma once

#include <array>
#include <cmath>

namespace liplearn {

/// All geometry in this library is planar.
inline constexpr int kDim = 2;

using Point = std::array<double, 2>;

inline Point operator+(const Point& a, const Point& b) {
  return {a[0] + b[0], a[1] + b[1]};
}

inline Point operator-(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1]};
}

inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1]}; }

inline double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1];
}

inline double cross(const Point& a, const Point& b) {
  return a[0] * b[1] - a[1] * b[0];
}

inline double norm(const Point& a) { return std::hypot(a[0], a[1]); }

inline double distance(const Point& a, const Point& b) { return norm(a - b); }

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

}  // namespace liplearn

#pragma once

#include <Eigen/Dense>

namespace wg {

using Point = Eigen::Vector2d;

// 90-degree rotations; tangent/normal conventions build on these.
inline Point rot90ccw(const Point& v) { return Point(-v.y(), v.x()); }
inline Point rot90cw(const Point& v) { return Point(v.y(), -v.x()); }

inline double cross2(const Point& a, const Point& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Signed area of the triangle (a, b, c); positive for CCW orientation.
inline double triangle_signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * cross2(b - a, c - a);
}

}  // namespace wg

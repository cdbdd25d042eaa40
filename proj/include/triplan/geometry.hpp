// Copyright 2026 The Triplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRIPLAN_GEOMETRY_HPP_
#define TRIPLAN_GEOMETRY_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace triplan {

/// Error for invalid geometric input (degenerate triangles, bad polygons).
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Planar point, east/north coordinates in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2() = default;
  Point2(double x_, double y_) : x(x_), y(y_) {}

  Eigen::Vector2d vec() const { return {x, y}; }
  static Point2 from(const Eigen::Vector2d& v) { return {v(0), v(1)}; }

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Point2& o) const { return x * o.x + y * o.y; }
  double cross(const Point2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

/// Simple polygon; vertices stored counter-clockwise after normalization.
struct Polygon {
  std::vector<Point2> vertices;
  bool is_hole = false;  // true for obstacles, false for the domain boundary
};

/// Triangle with counter-clockwise vertices.
struct Triangle {
  Point2 v1, v2, v3;

  Point2 centroid() const {
    return {(v1.x + v2.x + v3.x) / 3.0, (v1.y + v2.y + v3.y) / 3.0};
  }
};

/// Triangle as the intersection of three half-planes, A p <= b.
struct HalfSpaces {
  Eigen::Matrix<double, 3, 2> A;
  Eigen::Vector3d b;
};

/// Affine frame mapping local triangle coordinates to the plane, p = C p' + d.
/// The local triangle has corners (0,0), (1,0), (1,1).
struct LocalFrame {
  Eigen::Matrix2d C;
  Point2 d;
  Eigen::Matrix2d C_inv;  // cached inverse of C
};

double signed_area(const Polygon& poly);
double signed_area(const Triangle& tri);

/// Throws GeometryError if the triangle is degenerate relative to its size.
void require_valid_triangle(const Triangle& tri);

/// Half-space representation of a CCW triangle (interior satisfies A p <= b).
HalfSpaces halfspaces_of(const Triangle& tri);

/// Membership test A p <= b + tol, row-wise.
bool contains(const HalfSpaces& hs, const Point2& p, double tol);
bool contains(const Triangle& tri, const Point2& p, double tol);

LocalFrame local_frame(const Triangle& tri);
Point2 to_local(const LocalFrame& f, const Point2& p);
Point2 to_global(const LocalFrame& f, const Point2& p);

/// Membership in local coordinates: 0 <= p'1 <= 1, 0 <= p'2, p'2 <= p'1.
bool local_contains(const Point2& local, double tol);

/// Even-odd point-in-polygon test.
bool point_in_polygon(const Polygon& poly, const Point2& p);

/// Distance from p to the nearest edge of the triangle boundary.
double distance_to_boundary(const Triangle& tri, const Point2& p);

}  // namespace triplan

#endif  // TRIPLAN_GEOMETRY_HPP_

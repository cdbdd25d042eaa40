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

#include "triplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace triplan {

namespace {

// 90-degree rotation for CCW vertex order: R = [[0, 1], [-1, 0]].
const Eigen::Matrix2d kRotCcw = (Eigen::Matrix2d() << 0, 1, -1, 0).finished();

double bbox_diag_sq(const Triangle& tri) {
  const double xmin = std::min({tri.v1.x, tri.v2.x, tri.v3.x});
  const double xmax = std::max({tri.v1.x, tri.v2.x, tri.v3.x});
  const double ymin = std::min({tri.v1.y, tri.v2.y, tri.v3.y});
  const double ymax = std::max({tri.v1.y, tri.v2.y, tri.v3.y});
  const double dx = xmax - xmin;
  const double dy = ymax - ymin;
  return dx * dx + dy * dy;
}

std::string describe(const Triangle& tri) {
  std::ostringstream os;
  os << "[(" << tri.v1.x << "," << tri.v1.y << "),(" << tri.v2.x << ","
     << tri.v2.y << "),(" << tri.v3.x << "," << tri.v3.y << ")]";
  return os.str();
}

double point_segment_distance(const Point2& p, const Point2& a,
                              const Point2& b) {
  const Point2 ab = b - a;
  const double len_sq = ab.dot(ab);
  if (len_sq == 0.0) return (p - a).norm();
  double t = (p - a).dot(ab) / len_sq;
  t = std::clamp(t, 0.0, 1.0);
  const Point2 proj = a + ab * t;
  return (p - proj).norm();
}

}  // namespace

double signed_area(const Polygon& poly) {
  if (poly.vertices.size() < 3) {
    throw GeometryError("polygon needs at least 3 vertices");
  }
  double twice = 0.0;
  const size_t n = poly.vertices.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = poly.vertices[i];
    const Point2& b = poly.vertices[(i + 1) % n];
    twice += a.cross(b);
  }
  return 0.5 * twice;
}

double signed_area(const Triangle& tri) {
  return 0.5 * (tri.v2 - tri.v1).cross(tri.v3 - tri.v1);
}

void require_valid_triangle(const Triangle& tri) {
  if (!tri.v1.finite() || !tri.v2.finite() || !tri.v3.finite()) {
    throw GeometryError("triangle has non-finite vertex: " + describe(tri));
  }
  const double area = signed_area(tri);
  const double scale = bbox_diag_sq(tri);
  if (std::abs(area) < 1e-12 * scale || scale == 0.0) {
    throw GeometryError("degenerate triangle: " + describe(tri));
  }
  if (area < 0.0) {
    throw GeometryError("triangle not counter-clockwise: " + describe(tri));
  }
}

HalfSpaces halfspaces_of(const Triangle& tri) {
  require_valid_triangle(tri);
  HalfSpaces hs;
  const Eigen::Vector2d v1 = tri.v1.vec();
  const Eigen::Vector2d v2 = tri.v2.vec();
  const Eigen::Vector2d v3 = tri.v3.vec();
  const Eigen::Matrix2d rt = kRotCcw.transpose();
  hs.A.row(0) = (v2 - v1).transpose() * rt;
  hs.A.row(1) = (v3 - v2).transpose() * rt;
  hs.A.row(2) = (v1 - v3).transpose() * rt;
  hs.b(0) = hs.A.row(0).dot(v1);
  hs.b(1) = hs.A.row(1).dot(v2);
  hs.b(2) = hs.A.row(2).dot(v3);
  return hs;
}

bool contains(const HalfSpaces& hs, const Point2& p, double tol) {
  const Eigen::Vector3d r = hs.A * p.vec() - hs.b;
  return r(0) <= tol && r(1) <= tol && r(2) <= tol;
}

bool contains(const Triangle& tri, const Point2& p, double tol) {
  return contains(halfspaces_of(tri), p, tol);
}

LocalFrame local_frame(const Triangle& tri) {
  require_valid_triangle(tri);
  LocalFrame f;
  f.C.col(0) = (tri.v2 - tri.v1).vec();
  f.C.col(1) = (tri.v3 - tri.v2).vec();
  f.d = tri.v1;
  const double det = f.C.determinant();
  if (det == 0.0 || !std::isfinite(det)) {
    throw GeometryError("singular local frame for triangle " + describe(tri));
  }
  f.C_inv = f.C.inverse();
  return f;
}

Point2 to_local(const LocalFrame& f, const Point2& p) {
  return Point2::from(f.C_inv * (p - f.d).vec());
}

Point2 to_global(const LocalFrame& f, const Point2& p) {
  return Point2::from(f.C * p.vec() + f.d.vec());
}

bool local_contains(const Point2& local, double tol) {
  return local.x >= -tol && local.x <= 1.0 + tol && local.y >= -tol &&
         local.y - local.x <= tol;
}

bool point_in_polygon(const Polygon& poly, const Point2& p) {
  // Even-odd rule via horizontal ray crossing count.
  bool inside = false;
  const size_t n = poly.vertices.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly.vertices[i];
    const Point2& b = poly.vertices[j];
    const bool crosses = (a.y > p.y) != (b.y > p.y);
    if (crosses) {
      const double x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

double distance_to_boundary(const Triangle& tri, const Point2& p) {
  return std::min({point_segment_distance(p, tri.v1, tri.v2),
                   point_segment_distance(p, tri.v2, tri.v3),
                   point_segment_distance(p, tri.v3, tri.v1)});
}

}  // namespace triplan

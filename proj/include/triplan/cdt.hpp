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

#ifndef TRIPLAN_CDT_HPP_
#define TRIPLAN_CDT_HPP_

#include <array>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "triplan/errors.hpp"
#include "triplan/geometry.hpp"

namespace triplan {

enum class TriLabel { Free, Blocked };

/// Constrained Delaunay triangulation of a polygonal domain with obstacles.
///
/// Every input polygon edge appears as a constrained triangulation edge, each
/// triangle lies fully inside an obstacle (Blocked) or fully outside all of
/// them (Free), and the triangles cover the domain polygon exactly.
struct Triangulation {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex index triples
  std::set<std::pair<int, int>> constrained_edges;  // normalized (lo, hi)
  std::vector<TriLabel> labels;

  Triangle triangle(int id) const {
    const auto& t = triangles.at(id);
    return Triangle{vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
  int free_count() const {
    int n = 0;
    for (const TriLabel l : labels) n += (l == TriLabel::Free) ? 1 : 0;
    return n;
  }
};

/// Shared-edge adjacency between free triangles.
struct AdjacencyGraph {
  struct SharedEdge {
    int va = -1;  // vertex indices of the shared edge
    int vb = -1;
  };
  struct Edge {
    int tri_a = -1;
    int tri_b = -1;
    SharedEdge shared;
  };
  // Indexed by triangle id; entries exist only for Free-Free adjacencies.
  std::vector<std::vector<std::pair<int, SharedEdge>>> neighbors;
  std::vector<Edge> edges;
};

/// Builds the CDT of the free space. Obstacles must not cross each other or
/// the domain boundary; near-duplicate vertices are merged with a warning.
Triangulation triangulate(const Polygon& domain,
                          const std::vector<Polygon>& obstacles,
                          std::vector<std::string>* warnings = nullptr);

/// Labels a triangle by the even-odd rule applied to its centroid. Throws if
/// the centroid lies on an obstacle edge (constraint enforcement failed
/// upstream).
TriLabel classify(const Point2& centroid,
                  const std::vector<Polygon>& obstacles);

AdjacencyGraph adjacency(const Triangulation& t);

/// Returns the lowest-id Free triangle containing p. Throws InputError if p
/// falls in a Blocked triangle and std::out_of_range if outside the domain.
int locate(const Triangulation& t, const Point2& p);

}  // namespace triplan

#endif  // TRIPLAN_CDT_HPP_

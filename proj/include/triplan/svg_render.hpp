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

#ifndef TRIPLAN_SVG_RENDER_HPP_
#define TRIPLAN_SVG_RENDER_HPP_

#include <string>

#include "triplan/map_io.hpp"
#include "triplan/search.hpp"
#include "triplan/transcription.hpp"

namespace triplan {

/// Renders the map, triangulation wireframe, optional search-trace triangle
/// fills (colored by the value lower bound), and the trajectory.
std::string render_svg(const MapDocument& map, const Triangulation& tri,
                       const TrajectorySpline* spline,
                       const std::vector<TraceEvent>* trace);

void write_svg(const std::string& path, const MapDocument& map,
               const Triangulation& tri, const TrajectorySpline* spline,
               const std::vector<TraceEvent>* trace);

}  // namespace triplan

#endif  // TRIPLAN_SVG_RENDER_HPP_

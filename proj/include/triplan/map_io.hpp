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

#ifndef TRIPLAN_MAP_IO_HPP_
#define TRIPLAN_MAP_IO_HPP_

#include <string>
#include <vector>

#include "triplan/cdt.hpp"
#include "triplan/errors.hpp"
#include "triplan/geometry.hpp"

namespace triplan {

enum class MapErrorCode {
  ParseFailure,
  MissingDomain,
  MultipleDomains,
  BadGeometry,
  ObstacleOutsideDomain,
  CrossingPolygons,
};

class MapError : public InputError {
 public:
  MapError(MapErrorCode code, const std::string& what)
      : InputError(what), code_(code) {}
  MapErrorCode code() const { return code_; }

 private:
  MapErrorCode code_;
};

/// Planar map: one domain polygon plus obstacle polygons, local meters.
struct MapDocument {
  Polygon domain;
  std::vector<Polygon> obstacles;
  std::vector<std::string> obstacle_ids;
};

/// Loads a GeoJSON-style FeatureCollection. Features carry a "role"
/// property: exactly one "domain" and zero or more "obstacle" entries.
MapDocument load_map(const std::string& path);
MapDocument parse_map(const std::string& json_text);

/// Triangulates the free space of a loaded map.
Triangulation triangulate_map(const MapDocument& map,
                              std::vector<std::string>* warnings = nullptr);

}  // namespace triplan

#endif  // TRIPLAN_MAP_IO_HPP_

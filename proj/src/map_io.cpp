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

#include "triplan/map_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace triplan {

namespace {

using nlohmann::json;

Polygon parse_polygon(const json& geometry, bool hole) {
  if (!geometry.is_object() || geometry.value("type", "") != "Polygon") {
    throw MapError(MapErrorCode::BadGeometry,
                   "feature geometry must be a Polygon");
  }
  const auto& rings = geometry.at("coordinates");
  if (!rings.is_array() || rings.empty()) {
    throw MapError(MapErrorCode::BadGeometry, "polygon has no rings");
  }
  if (rings.size() > 1) {
    throw MapError(MapErrorCode::BadGeometry,
                   "interior rings are not supported; model holes as "
                   "separate obstacle features");
  }
  Polygon poly;
  poly.is_hole = hole;
  for (const auto& coord : rings[0]) {
    if (!coord.is_array() || coord.size() < 2) {
      throw MapError(MapErrorCode::BadGeometry, "bad coordinate pair");
    }
    poly.vertices.push_back(
        {coord[0].get<double>(), coord[1].get<double>()});
  }
  // GeoJSON rings repeat the first vertex at the end.
  if (poly.vertices.size() >= 2 &&
      (poly.vertices.front() - poly.vertices.back()).norm() < 1e-12) {
    poly.vertices.pop_back();
  }
  if (poly.vertices.size() < 3) {
    throw MapError(MapErrorCode::BadGeometry,
                   "polygon needs at least 3 distinct vertices");
  }
  for (const Point2& v : poly.vertices) {
    if (!v.finite()) {
      throw MapError(MapErrorCode::BadGeometry,
                     "polygon has non-finite coordinates");
    }
  }
  if (std::abs(signed_area(poly)) == 0.0) {
    throw MapError(MapErrorCode::BadGeometry, "polygon has zero area");
  }
  if (signed_area(poly) < 0.0) {
    std::reverse(poly.vertices.begin(), poly.vertices.end());
  }
  return poly;
}

}  // namespace

MapDocument parse_map(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw MapError(MapErrorCode::ParseFailure,
                   std::string("map parse failure: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features")) {
    throw MapError(MapErrorCode::ParseFailure,
                   "map must be a FeatureCollection");
  }

  MapDocument map;
  bool have_domain = false;
  int anon = 0;
  for (const auto& feature : doc.at("features")) {
    const json props = feature.value("properties", json::object());
    const std::string role = props.value("role", "");
    if (role == "domain") {
      if (have_domain) {
        throw MapError(MapErrorCode::MultipleDomains,
                       "more than one domain feature");
      }
      map.domain = parse_polygon(feature.at("geometry"), false);
      have_domain = true;
    } else if (role == "obstacle") {
      map.obstacles.push_back(parse_polygon(feature.at("geometry"), true));
      std::string id = props.value("id", "");
      if (id.empty()) id = "obstacle-" + std::to_string(anon++);
      for (const std::string& existing : map.obstacle_ids) {
        if (existing == id) {
          throw MapError(MapErrorCode::BadGeometry,
                         "duplicate obstacle id '" + id + "'");
        }
      }
      map.obstacle_ids.push_back(std::move(id));
    } else {
      throw MapError(MapErrorCode::ParseFailure,
                     "feature without a domain/obstacle role");
    }
  }
  if (!have_domain) {
    throw MapError(MapErrorCode::MissingDomain, "no domain feature in map");
  }

  // Obstacles must sit inside the domain.
  for (size_t i = 0; i < map.obstacles.size(); ++i) {
    for (const Point2& v : map.obstacles[i].vertices) {
      if (!point_in_polygon(map.domain, v) ) {
        bool on_boundary = false;
        const auto& ring = map.domain.vertices;
        for (size_t k = 0; k < ring.size(); ++k) {
          const Point2 a = ring[k];
          const Point2 b = ring[(k + 1) % ring.size()];
          const Point2 ab = b - a;
          const double len2 = ab.dot(ab);
          const double t = std::clamp((v - a).dot(ab) / len2, 0.0, 1.0);
          if ((v - (a + ab * t)).norm() < 1e-9) {
            on_boundary = true;
            break;
          }
        }
        if (!on_boundary) {
          throw MapError(MapErrorCode::ObstacleOutsideDomain,
                         "obstacle '" + map.obstacle_ids[i] +
                             "' reaches outside the domain");
        }
      }
    }
  }
  return map;
}

MapDocument load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MapError(MapErrorCode::ParseFailure,
                   "cannot open map file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_map(buffer.str());
}

Triangulation triangulate_map(const MapDocument& map,
                              std::vector<std::string>* warnings) {
  try {
    return triangulate(map.domain, map.obstacles, warnings);
  } catch (const InputError& e) {
    throw MapError(MapErrorCode::CrossingPolygons, e.what());
  }
}

}  // namespace triplan

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

#include "triplan/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace triplan {

namespace {

struct Bounds {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
};

Bounds map_bounds(const MapDocument& map) {
  Bounds b;
  b.xmin = b.ymin = std::numeric_limits<double>::infinity();
  b.xmax = b.ymax = -b.xmin;
  for (const Point2& v : map.domain.vertices) {
    b.xmin = std::min(b.xmin, v.x);
    b.xmax = std::max(b.xmax, v.x);
    b.ymin = std::min(b.ymin, v.y);
    b.ymax = std::max(b.ymax, v.y);
  }
  return b;
}

std::string color_ramp(double t) {
  // Dark blue -> yellow.
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(40 + 215 * t);
  const int g = static_cast<int>(50 + 180 * t);
  const int n = static_cast<int>(140 * (1.0 - t) + 40);
  std::ostringstream os;
  os << "rgb(" << r << "," << g << "," << n << ")";
  return os.str();
}

void emit_polygon(std::ostringstream& os, const Polygon& poly,
                  const std::string& style) {
  os << "  <polygon points=\"";
  for (const Point2& v : poly.vertices) {
    os << v.x << "," << v.y << " ";
  }
  os << "\" " << style << "/>\n";
}

}  // namespace

std::string render_svg(const MapDocument& map, const Triangulation& tri,
                       const TrajectorySpline* spline,
                       const std::vector<TraceEvent>* trace) {
  const Bounds b = map_bounds(map);
  const double margin = 0.04 * std::max(b.xmax - b.xmin, b.ymax - b.ymin);
  const double w = (b.xmax - b.xmin) + 2 * margin;
  const double h = (b.ymax - b.ymin) + 2 * margin;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
     << "height=\"" << static_cast<int>(800 * h / w) << "\" viewBox=\""
     << (b.xmin - margin) << " " << (-b.ymax - margin) << " " << w << " " << h
     << "\">\n";
  // Flip the y axis so north points up.
  os << " <g transform=\"scale(1,-1)\" stroke-linejoin=\"round\">\n";

  emit_polygon(os, map.domain,
               "fill=\"#f5f8fa\" stroke=\"#445\" stroke-width=\"" +
                   std::to_string(0.004 * w) + "\"");

  // Triangle fills colored by the lower bound of searched sequences.
  if (trace != nullptr && !trace->empty()) {
    std::map<int, double> best_bound;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const TraceEvent& e : *trace) {
      if (e.kind != TraceEvent::Kind::Admit &&
          e.kind != TraceEvent::Kind::Incumbent) {
        continue;
      }
      if (e.sequence.empty()) continue;
      const int t = e.sequence.back();
      const auto it = best_bound.find(t);
      if (it == best_bound.end() || e.qbar < it->second) {
        best_bound[t] = e.qbar;
      }
    }
    for (const auto& [t, q] : best_bound) {
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    const double span = (hi > lo) ? (hi - lo) : 1.0;
    for (const auto& [t, q] : best_bound) {
      const Triangle tr = tri.triangle(t);
      Polygon p;
      p.vertices = {tr.v1, tr.v2, tr.v3};
      emit_polygon(os, p,
                   "fill=\"" + color_ramp((q - lo) / span) +
                       "\" fill-opacity=\"0.55\" stroke=\"none\"");
    }
  }

  // Wireframe.
  const double thin = 0.0012 * w;
  for (int i = 0; i < static_cast<int>(tri.triangles.size()); ++i) {
    const Triangle t = tri.triangle(i);
    Polygon p;
    p.vertices = {t.v1, t.v2, t.v3};
    const bool blocked = tri.labels[i] == TriLabel::Blocked;
    emit_polygon(os, p,
                 blocked ? "fill=\"#8a8f98\" stroke=\"#666\" stroke-width=\"" +
                               std::to_string(thin) + "\""
                         : "fill=\"none\" stroke=\"#b8c4cc\" stroke-width=\"" +
                               std::to_string(thin) + "\"");
  }
  for (size_t i = 0; i < map.obstacles.size(); ++i) {
    emit_polygon(os, map.obstacles[i],
                 "fill=\"#5a6570\" fill-opacity=\"0.8\" stroke=\"#333\" "
                 "stroke-width=\"" +
                     std::to_string(0.002 * w) + "\"");
  }

  if (spline != nullptr && !spline->segments.empty()) {
    const auto samples = sample(*spline, 24);
    os << "  <polyline fill=\"none\" stroke=\"#d33\" stroke-width=\""
       << 0.005 * w << "\" stroke-dasharray=\"" << 0.02 * w << ","
       << 0.01 * w << "\" points=\"";
    for (const auto& s : samples) {
      os << s.state(0) << "," << s.state(1) << " ";
    }
    os << "\"/>\n";
    // Direction arrows at a few waypoints.
    for (size_t i = 0; i + 1 < samples.size();
         i += std::max<size_t>(1, samples.size() / 8)) {
      const double x = samples[i].state(0);
      const double y = samples[i].state(1);
      const double dx = samples[i + 1].state(0) - x;
      const double dy = samples[i + 1].state(1) - y;
      const double n = std::hypot(dx, dy);
      if (n < 1e-12) continue;
      const double ux = dx / n, uy = dy / n;
      const double a = 0.012 * w;
      os << "  <path fill=\"#d33\" d=\"M " << x + a * ux << " " << y + a * uy
         << " L " << x - 0.4 * a * uy << " " << y + 0.4 * a * ux << " L "
         << x + 0.4 * a * uy << " " << y - 0.4 * a * ux << " Z\"/>\n";
    }
    // Start and end markers.
    os << "  <circle cx=\"" << samples.front().state(0) << "\" cy=\""
       << samples.front().state(1) << "\" r=\"" << 0.008 * w
       << "\" fill=\"#26c\"/>\n";
    os << "  <circle cx=\"" << samples.back().state(0) << "\" cy=\""
       << samples.back().state(1) << "\" r=\"" << 0.008 * w
       << "\" fill=\"#26c\"/>\n";
  }

  os << " </g>\n</svg>\n";
  return os.str();
}

void write_svg(const std::string& path, const MapDocument& map,
               const Triangulation& tri, const TrajectorySpline* spline,
               const std::vector<TraceEvent>* trace) {
  std::ofstream out(path);
  out << render_svg(map, tri, spline, trace);
}

}  // namespace triplan

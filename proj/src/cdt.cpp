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

#include "triplan/cdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace triplan {

namespace {

std::pair<int, int> norm_edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::string point_str(const Point2& p) {
  std::ostringstream os;
  os << "(" << p.x << "," << p.y << ")";
  return os.str();
}

// Incremental Delaunay triangulation with Lawson flips, followed by
// constraint enforcement through cavity re-triangulation.
class DelaunayBuilder {
 public:
  DelaunayBuilder(double xmin, double xmax, double ymin, double ymax) {
    const double dx = std::max(xmax - xmin, 1e-9);
    const double dy = std::max(ymax - ymin, 1e-9);
    scale_ = std::hypot(dx, dy);
    eps_orient_ = 1e-10 * scale_ * scale_;
    merge_tol_ = 1e-9 * scale_;

    // Enclosing super-triangle, vertices 0..2.
    const double cx = 0.5 * (xmin + xmax);
    const double cy = 0.5 * (ymin + ymax);
    const double r = 16.0 * scale_;
    verts_.push_back({cx - 2.0 * r, cy - r});
    verts_.push_back({cx + 2.0 * r, cy - r});
    verts_.push_back({cx, cy + 2.0 * r});
    tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
  }

  double merge_tol() const { return merge_tol_; }

  // Inserts a point, returning its vertex index. Points within the merge
  // tolerance of an existing vertex reuse that vertex.
  int insert_point(const Point2& p, std::vector<std::string>* warnings) {
    for (int v = 3; v < static_cast<int>(verts_.size()); ++v) {
      if ((verts_[v] - p).norm() <= merge_tol_) {
        if (warnings && (verts_[v] - p).norm() > 0.0) {
          warnings->push_back("merged near-duplicate vertex " + point_str(p));
        }
        return v;
      }
    }
    const int t = find_containing(p);
    const int vid = static_cast<int>(verts_.size());
    verts_.push_back(p);

    // On-edge check against the three edges of t.
    int on_edge = -1;
    for (int i = 0; i < 3; ++i) {
      const int a = tris_[t].v[(i + 1) % 3];
      const int b = tris_[t].v[(i + 2) % 3];
      if (std::abs(orient(verts_[a], verts_[b], p)) <= eps_orient_ &&
          between(verts_[a], verts_[b], p)) {
        on_edge = i;
        break;
      }
    }
    if (on_edge >= 0) {
      split_edge(t, on_edge, vid);
    } else {
      split_triangle(t, vid);
    }
    flip_pending();
    return vid;
  }

  bool edge_exists(int a, int b) const {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive) continue;
      for (int i = 0; i < 3; ++i) {
        const int u = tris_[t].v[i];
        const int v = tris_[t].v[(i + 1) % 3];
        if ((u == a && v == b) || (u == b && v == a)) return true;
      }
    }
    return false;
  }

  void mark_constrained(int a, int b) { constrained_.insert(norm_edge(a, b)); }

  // Forces edge (a, b) into the triangulation; collinear vertices on the
  // segment split it into sub-segments.
  void enforce_segment(int a, int b) {
    struct OnSeg {
      double t;
      int v;
    };
    std::vector<OnSeg> on;
    const Point2 pa = verts_[a];
    const Point2 pb = verts_[b];
    const double len = (pb - pa).norm();
    for (int v = 3; v < static_cast<int>(verts_.size()); ++v) {
      if (v == a || v == b) continue;
      const Point2 d = pb - pa;
      const double t = (verts_[v] - pa).dot(d) / (len * len);
      if (t <= 0.0 || t >= 1.0) continue;
      const Point2 proj = pa + d * t;
      if ((verts_[v] - proj).norm() <= merge_tol_ * 4.0) {
        on.push_back({t, v});
      }
    }
    std::sort(on.begin(), on.end(),
              [](const OnSeg& l, const OnSeg& r) { return l.t < r.t; });
    int prev = a;
    for (const OnSeg& s : on) {
      enforce_subsegment(prev, s.v);
      prev = s.v;
    }
    enforce_subsegment(prev, b);
  }

  // Classifies triangles, drops everything outside the domain, and emits the
  // final compacted triangulation.
  Triangulation finalize(const Polygon& domain,
                         const std::vector<Polygon>& obstacles) {
    Triangulation out;
    out.vertices.assign(verts_.begin() + 3, verts_.end());

    std::vector<std::array<int, 3>> kept;
    for (const Tri& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;  // super vertex
      const Triangle tri{verts_[t.v[0]], verts_[t.v[1]], verts_[t.v[2]]};
      if (!point_in_polygon(domain, tri.centroid())) continue;
      std::array<int, 3> tv{t.v[0] - 3, t.v[1] - 3, t.v[2] - 3};
      // Normalize rotation for deterministic ids.
      const int lo = static_cast<int>(
          std::min_element(tv.begin(), tv.end()) - tv.begin());
      std::array<int, 3> rot{tv[lo], tv[(lo + 1) % 3], tv[(lo + 2) % 3]};
      kept.push_back(rot);
    }
    std::sort(kept.begin(), kept.end());
    out.triangles = std::move(kept);

    for (const auto& e : constrained_) {
      out.constrained_edges.insert(norm_edge(e.first - 3, e.second - 3));
    }
    out.labels.reserve(out.triangles.size());
    for (size_t i = 0; i < out.triangles.size(); ++i) {
      out.labels.push_back(
          classify(out.triangle(static_cast<int>(i)).centroid(), obstacles));
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;  // CCW
    std::array<int, 3> n;  // neighbor opposite v[i], -1 at the hull
    bool alive = true;
  };

  double orient(const Point2& a, const Point2& b, const Point2& c) const {
    return (b - a).cross(c - a);
  }

  bool between(const Point2& a, const Point2& b, const Point2& p) const {
    const double t = (p - a).dot(b - a);
    return t > 0.0 && t < (b - a).dot(b - a);
  }

  // Positive when d lies strictly inside the circumcircle of CCW (a, b, c).
  double incircle(const Point2& a, const Point2& b, const Point2& c,
                  const Point2& d) const {
    const double ax = a.x - d.x, ay = a.y - d.y;
    const double bx = b.x - d.x, by = b.y - d.y;
    const double cx = c.x - d.x, cy = c.y - d.y;
    const double a2 = ax * ax + ay * ay;
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
           a2 * (bx * cy - by * cx);
  }

  int find_containing(const Point2& p) const {
    // Remembering walk with a linear-scan fallback.
    int t = hint_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
      t = first_alive();
    }
    const int max_steps = 4 * static_cast<int>(tris_.size()) + 16;
    int prev = -1;
    for (int step = 0; step < max_steps; ++step) {
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        const int a = tris_[t].v[(i + 1) % 3];
        const int b = tris_[t].v[(i + 2) % 3];
        if (orient(verts_[a], verts_[b], p) < -eps_orient_) {
          const int cand = tris_[t].n[i];
          if (cand >= 0 && cand != prev) {
            next = cand;
            break;
          }
          if (cand >= 0 && next < 0) next = cand;
        }
      }
      if (next < 0) {
        hint_ = t;
        return t;
      }
      prev = t;
      t = next;
    }
    // Walk failed; scan everything.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (!tris_[i].alive) continue;
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k) {
        const int a = tris_[i].v[(k + 1) % 3];
        const int b = tris_[i].v[(k + 2) % 3];
        inside = orient(verts_[a], verts_[b], p) >= -eps_orient_;
      }
      if (inside) {
        hint_ = i;
        return i;
      }
    }
    throw GeometryError("point location failed for " + point_str(p));
  }

  int first_alive() const {
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (tris_[i].alive) return i;
    }
    throw GeometryError("empty triangulation");
  }

  int neighbor_slot(int t, int nbr) const {
    for (int i = 0; i < 3; ++i) {
      if (tris_[t].n[i] == nbr) return i;
    }
    throw GeometryError("inconsistent adjacency");
  }

  void set_neighbor(int t, int old_nbr, int new_nbr) {
    if (t < 0) return;
    tris_[t].n[neighbor_slot(t, old_nbr)] = new_nbr;
  }

  int new_tri(int a, int b, int c) {
    tris_.push_back(Tri{{a, b, c}, {-1, -1, -1}, true});
    return static_cast<int>(tris_.size()) - 1;
  }

  void split_triangle(int t, int vid) {
    const auto v = tris_[t].v;
    const auto n = tris_[t].n;
    tris_[t].alive = false;
    const int t0 = new_tri(v[0], v[1], vid);
    const int t1 = new_tri(v[1], v[2], vid);
    const int t2 = new_tri(v[2], v[0], vid);
    tris_[t0].n = {t1, t2, n[2]};
    tris_[t1].n = {t2, t0, n[0]};
    tris_[t2].n = {t0, t1, n[1]};
    set_neighbor(n[2], t, t0);
    set_neighbor(n[0], t, t1);
    set_neighbor(n[1], t, t2);
    pending_.push_back({t0, 2});
    pending_.push_back({t1, 2});
    pending_.push_back({t2, 2});
    hint_ = t0;
  }

  void split_edge(int t, int i, int vid) {
    const int s = tris_[t].v[i];
    const int p = tris_[t].v[(i + 1) % 3];
    const int q = tris_[t].v[(i + 2) % 3];
    const int o = tris_[t].n[i];
    const int np = tris_[t].n[(i + 2) % 3];  // neighbor across (s, p)
    const int nq = tris_[t].n[(i + 1) % 3];  // neighbor across (q, s)

    const bool was_constrained = constrained_.count(norm_edge(p, q)) > 0;

    tris_[t].alive = false;
    const int t0 = new_tri(s, p, vid);
    const int t1 = new_tri(s, vid, q);
    tris_[t0].n = {-1, t1, np};
    tris_[t1].n = {-1, nq, t0};
    set_neighbor(np, t, t0);
    set_neighbor(nq, t, t1);
    pending_.push_back({t0, 1});  // edge (vid, s)? keep suspect edges simple
    pending_.push_back({t0, 2});
    pending_.push_back({t1, 1});

    if (o >= 0) {
      const int j = neighbor_slot(o, t);
      const int r = tris_[o].v[j];
      const int no1 = tris_[o].n[(j + 2) % 3];  // across (r, q or p)
      const int no2 = tris_[o].n[(j + 1) % 3];
      // o = (r, q', p') where (q', p') is the shared edge reversed.
      const int oq = tris_[o].v[(j + 1) % 3];
      const int op = tris_[o].v[(j + 2) % 3];
      tris_[o].alive = false;
      const int t2 = new_tri(r, oq, vid);
      const int t3 = new_tri(r, vid, op);
      tris_[t2].n = {-1, t3, no1};
      tris_[t3].n = {-1, no2, t2};
      set_neighbor(no1, o, t2);
      set_neighbor(no2, o, t3);
      // Wire the four around vid. Shared edges: (p, vid) / (vid, q) on t's
      // side; o's side has (oq, vid), (vid, op) with oq == q, op == p.
      // t0 edge opposite s' slot 0 is (p, vid); t3 edge (vid, op=p).
      tris_[t0].n[0] = t3;
      tris_[t3].n[0] = t0;
      tris_[t1].n[0] = t2;
      tris_[t2].n[0] = t1;
      pending_.push_back({t2, 1});
      pending_.push_back({t2, 2});
      pending_.push_back({t3, 1});
      if (was_constrained) {
        constrained_.erase(norm_edge(p, q));
        constrained_.insert(norm_edge(p, vid));
        constrained_.insert(norm_edge(vid, q));
      }
    } else if (was_constrained) {
      constrained_.erase(norm_edge(p, q));
      constrained_.insert(norm_edge(p, vid));
      constrained_.insert(norm_edge(vid, q));
    }
    hint_ = t0;
  }

  void flip_pending() {
    int guard = 0;
    const int guard_max = 64 * static_cast<int>(tris_.size()) + 4096;
    while (!pending_.empty()) {
      if (++guard > guard_max) {
        pending_.clear();
        break;  // cocircular noise; triangulation stays valid
      }
      auto [t, i] = pending_.back();
      pending_.pop_back();
      if (t < 0 || !tris_[t].alive) continue;
      const int o = tris_[t].n[i];
      if (o < 0 || !tris_[o].alive) continue;
      const int p = tris_[t].v[(i + 1) % 3];
      const int q = tris_[t].v[(i + 2) % 3];
      if (constrained_.count(norm_edge(p, q))) continue;
      const int j = neighbor_slot(o, t);
      const int r = tris_[o].v[j];
      const double ic =
          incircle(verts_[tris_[t].v[0]], verts_[tris_[t].v[1]],
                   verts_[tris_[t].v[2]], verts_[r]);
      if (ic > eps_incircle()) {
        flip(t, i, o, j);
      }
    }
  }

  double eps_incircle() const {
    const double s2 = scale_ * scale_;
    return 1e-12 * s2 * s2;
  }

  // Flips the edge shared by t (slot i) and o (slot j).
  void flip(int t, int i, int o, int j) {
    const int s = tris_[t].v[i];
    const int p = tris_[t].v[(i + 1) % 3];
    const int q = tris_[t].v[(i + 2) % 3];
    const int r = tris_[o].v[j];

    const int A = tris_[t].n[(i + 1) % 3];  // across (q, s)
    const int B = tris_[t].n[(i + 2) % 3];  // across (s, p)
    const int C = tris_[o].n[(j + 1) % 3];  // across (p, r)
    const int D = tris_[o].n[(j + 2) % 3];  // across (r, q)

    tris_[t].alive = false;
    tris_[o].alive = false;
    const int t1 = new_tri(s, p, r);
    const int t2 = new_tri(s, r, q);
    tris_[t1].n = {C, t2, B};
    tris_[t2].n = {D, A, t1};
    set_neighbor(A, t, t2);
    set_neighbor(B, t, t1);
    set_neighbor(C, o, t1);
    set_neighbor(D, o, t2);
    pending_.push_back({t1, 0});  // (p, r)
    pending_.push_back({t1, 2});  // (s, p)
    pending_.push_back({t2, 0});  // (r, q)
    pending_.push_back({t2, 1});  // (q, s)
    hint_ = t1;
  }

  std::vector<int> star(int v) const {
    std::vector<int> out;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive) continue;
      if (tris_[t].v[0] == v || tris_[t].v[1] == v || tris_[t].v[2] == v) {
        out.push_back(t);
      }
    }
    return out;
  }

  void enforce_subsegment(int a, int b) {
    if (a == b) return;
    if (edge_exists(a, b)) {
      mark_constrained(a, b);
      return;
    }
    const Point2 pa = verts_[a];
    const Point2 pb = verts_[b];

    // Walk the corridor of triangles crossed by segment (a, b).
    // In a CCW triangle (a, u, w) the segment exits through (u, w) with u on
    // its right and w on its left.
    int t = -1;
    int cross_i = -1;
    for (const int cand : star(a)) {
      int ia = 0;
      while (tris_[cand].v[ia] != a) ++ia;
      const int u = tris_[cand].v[(ia + 1) % 3];
      const int w = tris_[cand].v[(ia + 2) % 3];
      if (orient(pa, pb, verts_[u]) < 0.0 &&
          orient(pa, pb, verts_[w]) > 0.0 &&
          segments_cross(pa, pb, verts_[u], verts_[w])) {
        t = cand;
        cross_i = ia;
        break;
      }
    }
    if (t < 0) {
      throw GeometryError("constraint walk failed from vertex " +
                          point_str(pa) + " toward " + point_str(pb));
    }

    std::vector<int> cavity{t};
    std::vector<int> left{a}, right{a};  // chains, both start at a
    {
      const int u = tris_[t].v[(cross_i + 1) % 3];
      const int w = tris_[t].v[(cross_i + 2) % 3];
      right.push_back(u);
      left.push_back(w);
    }
    int cur = t;
    int cur_edge = cross_i;  // crossed edge is opposite this slot
    while (true) {
      const int p = tris_[cur].v[(cur_edge + 1) % 3];
      const int q = tris_[cur].v[(cur_edge + 2) % 3];
      if (constrained_.count(norm_edge(p, q))) {
        throw InputError("constraint segments cross: " + point_str(pa) + "-" +
                         point_str(pb) + " and " + point_str(verts_[p]) + "-" +
                         point_str(verts_[q]));
      }
      const int nxt = tris_[cur].n[cur_edge];
      if (nxt < 0) {
        throw GeometryError("constraint walk left the triangulation");
      }
      cavity.push_back(nxt);
      const int j = neighbor_slot(nxt, cur);
      const int r = tris_[nxt].v[j];
      if (r == b) break;
      // nxt = (r, w, u) with w left and u right of a->b; the segment next
      // crosses (u, r) when r sits left, and (r, w) otherwise.
      const double side = orient(pa, pb, verts_[r]);
      if (side > 0.0) {
        left.push_back(r);
        cur_edge = (j + 1) % 3;
      } else {
        right.push_back(r);
        cur_edge = (j + 2) % 3;
      }
      cur = nxt;
    }
    left.push_back(b);
    right.push_back(b);

    // Record the cavity hull (edges not crossed) before deleting, so the new
    // triangles can be stitched back to the outside.
    for (const int c : cavity) tris_[c].alive = false;

    // Retriangulate both sides of the new edge. The left chain keeps the base
    // a->b (CCW triples); the right chain is reversed for the same reason.
    std::vector<std::array<int, 3>> fresh;
    triangulate_chain(left, /*reverse=*/false, &fresh);
    triangulate_chain(right, /*reverse=*/true, &fresh);
    std::vector<int> created;
    created.reserve(fresh.size());
    for (const auto& f : fresh) created.push_back(new_tri(f[0], f[1], f[2]));
    rebuild_adjacency();
    mark_constrained(a, b);
    // Restore local Delaunay around the new edge where allowed.
    for (const int c : created) {
      if (tris_[c].alive) {
        pending_.push_back({c, 0});
        pending_.push_back({c, 1});
        pending_.push_back({c, 2});
      }
    }
    flip_pending();
  }

  bool segments_cross(const Point2& a, const Point2& b, const Point2& c,
                      const Point2& d) const {
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    return o1 * o2 < 0.0 && o3 * o4 < 0.0;
  }

  // Triangulates the pseudo-polygon formed by chain[0..k] where chain runs
  // from a to b along one side of the enforced edge. Chains on the left of
  // a->b are reversed so the produced triangles come out CCW.
  void triangulate_chain(const std::vector<int>& chain, bool reverse,
                         std::vector<std::array<int, 3>>* out) {
    if (chain.size() < 3) return;
    std::vector<int> poly(chain.begin(), chain.end());
    if (reverse) std::reverse(poly.begin(), poly.end());
    // Interior vertices now lie left of poly.front() -> poly.back(), so the
    // Delaunay-pick recursion below sees CCW triples.
    triangulate_pseudo(poly.front(), poly.back(),
                       std::vector<int>(poly.begin() + 1, poly.end() - 1),
                       out);
  }

  void triangulate_pseudo(int a, int b, const std::vector<int>& inner,
                          std::vector<std::array<int, 3>>* out) {
    if (inner.empty()) return;
    size_t best = 0;
    for (size_t k = 1; k < inner.size(); ++k) {
      if (incircle(verts_[a], verts_[b], verts_[inner[best]],
                   verts_[inner[k]]) > 0.0) {
        best = k;
      }
    }
    const int c = inner[best];
    // Emit CCW triangle.
    if (orient(verts_[a], verts_[b], verts_[c]) > 0.0) {
      out->push_back({a, b, c});
    } else {
      out->push_back({a, c, b});
    }
    triangulate_pseudo(a, c,
                       std::vector<int>(inner.begin(), inner.begin() + best),
                       out);
    triangulate_pseudo(c, b,
                       std::vector<int>(inner.begin() + best + 1, inner.end()),
                       out);
  }

  void rebuild_adjacency() {
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_map;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive) continue;
      tris_[t].n = {-1, -1, -1};
      for (int i = 0; i < 3; ++i) {
        const int u = tris_[t].v[(i + 1) % 3];
        const int v = tris_[t].v[(i + 2) % 3];
        edge_map[norm_edge(u, v)].push_back({t, i});
      }
    }
    for (const auto& [edge, users] : edge_map) {
      if (users.size() == 2) {
        tris_[users[0].first].n[users[0].second] = users[1].first;
        tris_[users[1].first].n[users[1].second] = users[0].first;
      } else if (users.size() > 2) {
        throw GeometryError("non-manifold edge produced during enforcement");
      }
    }
    hint_ = first_alive();
  }

  std::vector<Point2> verts_;
  std::vector<Tri> tris_;
  std::vector<std::pair<int, int>> pending_;  // (triangle, edge slot)
  std::set<std::pair<int, int>> constrained_;
  double scale_ = 1.0;
  double eps_orient_ = 1e-12;
  double merge_tol_ = 1e-12;
  mutable int hint_ = 0;
};

void check_polygon(const Polygon& poly, const char* what) {
  if (poly.vertices.size() < 3) {
    throw InputError(std::string(what) + " polygon has fewer than 3 vertices");
  }
  for (const Point2& p : poly.vertices) {
    if (!p.finite()) {
      throw InputError(std::string(what) + " polygon has non-finite vertex");
    }
  }
  if (std::abs(signed_area(poly)) == 0.0) {
    throw InputError(std::string(what) + " polygon has zero area");
  }
}

Polygon normalized_ccw(const Polygon& poly) {
  Polygon out = poly;
  if (signed_area(out) < 0.0) {
    std::reverse(out.vertices.begin(), out.vertices.end());
  }
  return out;
}

}  // namespace

TriLabel classify(const Point2& centroid,
                  const std::vector<Polygon>& obstacles) {
  int parity = 0;
  for (const Polygon& obs : obstacles) {
    const size_t n = obs.vertices.size();
    for (size_t i = 0; i < n; ++i) {
      const Point2& a = obs.vertices[i];
      const Point2& b = obs.vertices[(i + 1) % n];
      const double len = (b - a).norm();
      if (len == 0.0) continue;
      const double along = (centroid - a).dot(b - a) / (len * len);
      if (along < 0.0 || along > 1.0) continue;
      const Point2 proj = a + (b - a) * along;
      if ((centroid - proj).norm() <= 1e-12 * std::max(1.0, len)) {
        throw GeometryError(
            "triangle centroid lies on an obstacle edge near " +
            point_str(centroid) + "; constraint enforcement failed");
      }
    }
    if (point_in_polygon(obs, centroid)) ++parity;
  }
  return (parity % 2 == 1) ? TriLabel::Blocked : TriLabel::Free;
}

Triangulation triangulate(const Polygon& domain,
                          const std::vector<Polygon>& obstacles,
                          std::vector<std::string>* warnings) {
  check_polygon(domain, "domain");
  for (const Polygon& o : obstacles) check_polygon(o, "obstacle");

  const Polygon dom = normalized_ccw(domain);
  std::vector<Polygon> obs;
  obs.reserve(obstacles.size());
  for (const Polygon& o : obstacles) {
    obs.push_back(normalized_ccw(o));
    obs.back().is_hole = true;
  }

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin, ymin = xmin, ymax = -xmin;
  auto grow = [&](const Polygon& p) {
    for (const Point2& v : p.vertices) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  };
  grow(dom);
  for (const Polygon& o : obs) grow(o);

  DelaunayBuilder builder(xmin, xmax, ymin, ymax);

  std::vector<std::vector<int>> rings;
  auto insert_ring = [&](const Polygon& p) {
    std::vector<int> ids;
    ids.reserve(p.vertices.size());
    for (const Point2& v : p.vertices) {
      ids.push_back(builder.insert_point(v, warnings));
    }
    rings.push_back(std::move(ids));
  };
  insert_ring(dom);
  for (const Polygon& o : obs) insert_ring(o);

  for (const std::vector<int>& ring : rings) {
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      const int a = ring[i];
      const int b = ring[(i + 1) % n];
      if (a != b) builder.enforce_segment(a, b);
    }
  }
  return builder.finalize(dom, obs);
}

AdjacencyGraph adjacency(const Triangulation& t) {
  AdjacencyGraph g;
  g.neighbors.resize(t.triangles.size());
  std::map<std::pair<int, int>, std::vector<int>> edge_map;
  for (int id = 0; id < static_cast<int>(t.triangles.size()); ++id) {
    const auto& tv = t.triangles[id];
    for (int i = 0; i < 3; ++i) {
      edge_map[norm_edge(tv[i], tv[(i + 1) % 3])].push_back(id);
    }
  }
  for (const auto& [edge, users] : edge_map) {
    if (users.size() != 2) continue;
    const int a = users[0];
    const int b = users[1];
    if (t.labels[a] != TriLabel::Free || t.labels[b] != TriLabel::Free) {
      continue;
    }
    AdjacencyGraph::SharedEdge se{edge.first, edge.second};
    g.neighbors[a].push_back({b, se});
    g.neighbors[b].push_back({a, se});
    g.edges.push_back({a, b, se});
  }
  for (auto& nbrs : g.neighbors) {
    std::sort(nbrs.begin(), nbrs.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
  }
  return g;
}

int locate(const Triangulation& t, const Point2& p) {
  const double tol = 1e-9;
  int blocked_hit = -1;
  for (int id = 0; id < static_cast<int>(t.triangles.size()); ++id) {
    if (contains(t.triangle(id), p, tol)) {
      if (t.labels[id] == TriLabel::Free) return id;
      if (blocked_hit < 0) blocked_hit = id;
    }
  }
  if (blocked_hit >= 0) {
    throw InputError("start/goal in obstacle at " + point_str(p));
  }
  throw std::out_of_range("point outside triangulated domain: " +
                          point_str(p));
}

}  // namespace triplan

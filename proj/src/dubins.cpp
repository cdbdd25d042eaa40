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

#include "triplan/dubins.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace triplan {

namespace {

struct Vec {
  double x, y;
};

double mod2pi(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}

Vec left_center(const Pose2& p, double rho) {
  return {p.x - rho * std::sin(p.theta), p.y + rho * std::cos(p.theta)};
}

Vec right_center(const Pose2& p, double rho) {
  return {p.x + rho * std::sin(p.theta), p.y - rho * std::cos(p.theta)};
}

Pose2 drive_arc(const Pose2& p, double rho, bool left, double angle) {
  Pose2 out;
  if (left) {
    const Vec c = left_center(p, rho);
    out.theta = p.theta + angle;
    out.x = c.x + rho * std::sin(out.theta);
    out.y = c.y - rho * std::cos(out.theta);
  } else {
    const Vec c = right_center(p, rho);
    out.theta = p.theta - angle;
    out.x = c.x - rho * std::sin(out.theta);
    out.y = c.y + rho * std::cos(out.theta);
  }
  return out;
}

Pose2 drive_straight(const Pose2& p, double len) {
  return {p.x + len * std::cos(p.theta), p.y + len * std::sin(p.theta),
          p.theta};
}

bool is_left_turn(DubinsWord w, int leg) {
  switch (w) {
    case DubinsWord::LSL:
      return true;
    case DubinsWord::RSR:
      return false;
    case DubinsWord::LSR:
      return leg == 0;
    case DubinsWord::RSL:
      return leg == 2;
    case DubinsWord::RLR:
      return leg == 1;
    case DubinsWord::LRL:
      return leg != 1;
  }
  return true;
}

bool has_straight(DubinsWord w) {
  return w == DubinsWord::LSL || w == DubinsWord::RSR ||
         w == DubinsWord::LSR || w == DubinsWord::RSL;
}

double path_length(const DubinsPath& p, double rho) {
  const double mid =
      has_straight(p.word) ? p.params[1] : rho * p.params[1];
  return rho * (p.params[0] + p.params[2]) + mid;
}

bool close_enough(const Pose2& a, const Pose2& b, double scale) {
  const double pos_err = std::hypot(a.x - b.x, a.y - b.y);
  double ang = mod2pi(a.theta - b.theta);
  if (ang > M_PI) ang = 2.0 * M_PI - ang;
  return pos_err <= 1e-6 * scale && ang <= 1e-6;
}

}  // namespace

Pose2 dubins_endpoint(const Pose2& start, double radius,
                      const DubinsPath& path) {
  Pose2 p = drive_arc(start, radius, is_left_turn(path.word, 0),
                      path.params[0]);
  if (has_straight(path.word)) {
    p = drive_straight(p, path.params[1]);
  } else {
    p = drive_arc(p, radius, is_left_turn(path.word, 1), path.params[1]);
  }
  return drive_arc(p, radius, is_left_turn(path.word, 2), path.params[2]);
}

std::vector<DubinsPath> dubins_candidates(const DubinsQuery& q) {
  if (!(q.radius > 0.0)) {
    throw std::invalid_argument("turn radius must be positive");
  }
  const double rho = q.radius;
  const Pose2& s = q.start;
  const Pose2& g = q.goal;
  const double scale =
      1.0 + std::hypot(g.x - s.x, g.y - s.y) + 8.0 * rho;

  std::vector<DubinsPath> out;
  auto try_push = [&](DubinsPath cand) {
    if (!std::isfinite(cand.params[0]) || !std::isfinite(cand.params[1]) ||
        !std::isfinite(cand.params[2])) {
      return;
    }
    if (cand.params[0] < 0 || cand.params[1] < 0 || cand.params[2] < 0) {
      return;
    }
    cand.length = path_length(cand, rho);
    if (close_enough(dubins_endpoint(s, rho, cand), g, scale)) {
      out.push_back(cand);
    }
  };

  // CSC words via tangent construction between turn circles.
  {
    const Vec c1 = left_center(s, rho), c2 = left_center(g, rho);
    const double d = std::hypot(c2.x - c1.x, c2.y - c1.y);
    const double phi = (d > 1e-14) ? std::atan2(c2.y - c1.y, c2.x - c1.x)
                                   : s.theta;
    DubinsPath p;
    p.word = DubinsWord::LSL;
    p.params = {mod2pi(phi - s.theta), d, mod2pi(g.theta - phi)};
    try_push(p);
  }
  {
    const Vec c1 = right_center(s, rho), c2 = right_center(g, rho);
    const double d = std::hypot(c2.x - c1.x, c2.y - c1.y);
    const double phi = (d > 1e-14) ? std::atan2(c2.y - c1.y, c2.x - c1.x)
                                   : s.theta;
    DubinsPath p;
    p.word = DubinsWord::RSR;
    p.params = {mod2pi(s.theta - phi), d, mod2pi(phi - g.theta)};
    try_push(p);
  }
  {
    const Vec c1 = left_center(s, rho), c2 = right_center(g, rho);
    const double d = std::hypot(c2.x - c1.x, c2.y - c1.y);
    if (d >= 2.0 * rho) {
      const double len = std::sqrt(d * d - 4.0 * rho * rho);
      const double phi = std::atan2(c2.y - c1.y, c2.x - c1.x) +
                         std::atan2(2.0 * rho, len);
      DubinsPath p;
      p.word = DubinsWord::LSR;
      p.params = {mod2pi(phi - s.theta), len, mod2pi(phi - g.theta)};
      try_push(p);
    }
  }
  {
    const Vec c1 = right_center(s, rho), c2 = left_center(g, rho);
    const double d = std::hypot(c2.x - c1.x, c2.y - c1.y);
    if (d >= 2.0 * rho) {
      const double len = std::sqrt(d * d - 4.0 * rho * rho);
      const double phi = std::atan2(c2.y - c1.y, c2.x - c1.x) -
                         std::atan2(2.0 * rho, len);
      DubinsPath p;
      p.word = DubinsWord::RSL;
      p.params = {mod2pi(s.theta - phi), len, mod2pi(g.theta - phi)};
      try_push(p);
    }
  }

  // CCC words: the middle circle touches both end circles; both placements
  // of its center are examined and verified.
  auto ccc = [&](bool left_outer) {
    const Vec c1 = left_outer ? left_center(s, rho) : right_center(s, rho);
    const Vec c3 = left_outer ? left_center(g, rho) : right_center(g, rho);
    const double dx = c3.x - c1.x, dy = c3.y - c1.y;
    const double d = std::hypot(dx, dy);
    if (d < 1e-14 || d >= 4.0 * rho) return;
    const double h = std::sqrt(4.0 * rho * rho - 0.25 * d * d);
    for (const double side : {1.0, -1.0}) {
      const Vec mid{0.5 * (c1.x + c3.x) + side * h * (-dy / d),
                    0.5 * (c1.y + c3.y) + side * h * (dx / d)};
      const Vec p1{0.5 * (c1.x + mid.x), 0.5 * (c1.y + mid.y)};
      const Vec p2{0.5 * (mid.x + c3.x), 0.5 * (mid.y + c3.y)};
      const double a_start = std::atan2(s.y - c1.y, s.x - c1.x);
      const double a_p1 = std::atan2(p1.y - c1.y, p1.x - c1.x);
      const double b_p1 = std::atan2(p1.y - mid.y, p1.x - mid.x);
      const double b_p2 = std::atan2(p2.y - mid.y, p2.x - mid.x);
      const double c_p2 = std::atan2(p2.y - c3.y, p2.x - c3.x);
      const double c_goal = std::atan2(g.y - c3.y, g.x - c3.x);
      DubinsPath p;
      if (left_outer) {
        p.word = DubinsWord::LRL;
        p.params = {mod2pi(a_p1 - a_start), mod2pi(b_p1 - b_p2),
                    mod2pi(c_goal - c_p2)};
      } else {
        p.word = DubinsWord::RLR;
        p.params = {mod2pi(a_start - a_p1), mod2pi(b_p2 - b_p1),
                    mod2pi(c_p2 - c_goal)};
      }
      try_push(p);
    }
  };
  ccc(true);
  ccc(false);

  return out;
}

DubinsPath dubins_shortest(const DubinsQuery& q) {
  const std::vector<DubinsPath> candidates = dubins_candidates(q);
  if (candidates.empty()) {
    throw std::runtime_error("no dubins candidate verified");
  }
  const DubinsPath* best = &candidates.front();
  for (const DubinsPath& c : candidates) {
    if (c.length < best->length) best = &c;
  }
  return *best;
}

const char* to_string(DubinsWord word) {
  switch (word) {
    case DubinsWord::LSL:
      return "LSL";
    case DubinsWord::RSR:
      return "RSR";
    case DubinsWord::LSR:
      return "LSR";
    case DubinsWord::RSL:
      return "RSL";
    case DubinsWord::RLR:
      return "RLR";
    case DubinsWord::LRL:
      return "LRL";
  }
  return "?";
}

}  // namespace triplan

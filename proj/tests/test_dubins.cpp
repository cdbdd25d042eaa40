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
#include <random>

#include <gtest/gtest.h>

namespace triplan {
namespace {

double wrap_diff(double a, double b) {
  double d = std::fmod(a - b, 2.0 * M_PI);
  if (d < -M_PI) d += 2.0 * M_PI;
  if (d > M_PI) d -= 2.0 * M_PI;
  return std::abs(d);
}

// Independent oracle: coarse-to-fine grid over three-leg compositions
// (arc/straight/arc and arc/arc/arc in every turn combination), repeatedly
// refined around the best grid cell.
double grid_oracle(const Pose2& start, const Pose2& goal, double rho) {
  struct Legs {
    bool mid_straight;
    int s1, s3;  // +1 left, -1 right (outer arcs)
  };
  std::vector<Legs> words;
  for (const int s1 : {1, -1}) {
    for (const int s3 : {1, -1}) {
      words.push_back({true, s1, s3});
    }
  }
  words.push_back({false, 1, 1});    // middle arc turns opposite the outers
  words.push_back({false, -1, -1});

  auto advance_arc = [&](Pose2 p, int sign, double angle) {
    Pose2 out;
    out.theta = p.theta + sign * angle;
    if (sign > 0) {
      const double cx = p.x - rho * std::sin(p.theta);
      const double cy = p.y + rho * std::cos(p.theta);
      out.x = cx + rho * std::sin(out.theta);
      out.y = cy - rho * std::cos(out.theta);
    } else {
      const double cx = p.x + rho * std::sin(p.theta);
      const double cy = p.y - rho * std::cos(p.theta);
      out.x = cx - rho * std::sin(out.theta);
      out.y = cy + rho * std::cos(out.theta);
    }
    return out;
  };

  const double straight_max =
      std::hypot(goal.x - start.x, goal.y - start.y) + 6.0 * rho;
  double best = std::numeric_limits<double>::infinity();

  for (const Legs& legs : words) {
    double lo1 = 0.0, hi1 = 2.0 * M_PI;
    double lo2 = 0.0;
    double hi2 = legs.mid_straight ? straight_max : 2.0 * M_PI;
    // Three refinement passes over a 2D grid; the last leg closes the pose.
    for (int pass = 0; pass < 4; ++pass) {
      const int n = 120;
      double best_t1 = lo1, best_t2 = lo2;
      double best_err = std::numeric_limits<double>::infinity();
      double best_len = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= n; ++i) {
        const double t1 = lo1 + (hi1 - lo1) * i / n;
        const Pose2 p1 = advance_arc(start, legs.s1, t1);
        for (int j = 0; j <= n; ++j) {
          const double t2 = lo2 + (hi2 - lo2) * j / n;
          Pose2 p2;
          if (legs.mid_straight) {
            p2 = {p1.x + t2 * std::cos(p1.theta),
                  p1.y + t2 * std::sin(p1.theta), p1.theta};
          } else {
            p2 = advance_arc(p1, -legs.s1, t2);
          }
          // Solve the final arc angle from the heading difference.
          double t3 = legs.s3 > 0 ? goal.theta - p2.theta
                                  : p2.theta - goal.theta;
          t3 = std::fmod(t3, 2.0 * M_PI);
          if (t3 < 0) t3 += 2.0 * M_PI;
          const Pose2 p3 = advance_arc(p2, legs.s3, t3);
          const double err = std::hypot(p3.x - goal.x, p3.y - goal.y) +
                             rho * wrap_diff(p3.theta, goal.theta);
          const double len =
              rho * t1 + (legs.mid_straight ? t2 : rho * t2) + rho * t3;
          if (err < best_err || (err < 1e-3 && len < best_len)) {
            if (err < 1e-3 && len < best_len) best_len = len;
            if (err < best_err) best_err = err;
            best_t1 = t1;
            best_t2 = t2;
          }
        }
      }
      const double w1 = (hi1 - lo1) / n * 2.5;
      const double w2 = (hi2 - lo2) / n * 2.5;
      lo1 = std::max(0.0, best_t1 - w1);
      hi1 = std::min(2.0 * M_PI, best_t1 + w1);
      lo2 = std::max(0.0, best_t2 - w2);
      hi2 = std::min(legs.mid_straight ? straight_max : 2.0 * M_PI,
                     best_t2 + w2);
      if (pass == 3 && best_err < 2e-3 && best_len < best) best = best_len;
    }
  }
  return best;
}

TEST(Dubins, StraightLine) {
  const DubinsPath p = dubins_shortest({{0, 0, 0}, {10, 0, 0}, 1.0});
  EXPECT_NEAR(p.length, 10.0, 1e-9);
}

TEST(Dubins, EndpointReproducesGoal) {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> coord(-12.0, 12.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int k = 0; k < 500; ++k) {
    const Pose2 s{coord(rng), coord(rng), angle(rng)};
    const Pose2 g{coord(rng), coord(rng), angle(rng)};
    const DubinsPath p = dubins_shortest({s, g, 1.0});
    const Pose2 end = dubins_endpoint(s, 1.0, p);
    EXPECT_NEAR(end.x, g.x, 1e-6);
    EXPECT_NEAR(end.y, g.y, 1e-6);
    EXPECT_NEAR(wrap_diff(end.theta, g.theta), 0.0, 1e-6);
    EXPECT_GE(p.length, std::hypot(g.x - s.x, g.y - s.y) - 1e-9);
  }
}

TEST(Dubins, UTurnMatchesGridOracle) {
  const Pose2 s{0, 0, 0};
  const Pose2 g{0, 0, M_PI};
  const DubinsPath p = dubins_shortest({s, g, 1.0});
  const double oracle = grid_oracle(s, g, 1.0);
  EXPECT_NEAR(p.length, oracle, 5e-3);
}

TEST(Dubins, RandomQueriesMatchGridOracle) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int k = 0; k < 3; ++k) {
    const Pose2 s{0, 0, angle(rng)};
    const Pose2 g{coord(rng), coord(rng), angle(rng)};
    const DubinsPath p = dubins_shortest({s, g, 1.0});
    const double oracle = grid_oracle(s, g, 1.0);
    EXPECT_LE(p.length, oracle + 5e-3) << "query " << k;
    EXPECT_GE(p.length, oracle - 5e-3) << "query " << k;
  }
}

TEST(Dubins, RigidTransformInvariance) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> coord(-8.0, 8.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int k = 0; k < 200; ++k) {
    const Pose2 s{coord(rng), coord(rng), angle(rng)};
    const Pose2 g{coord(rng), coord(rng), angle(rng)};
    const double len = dubins_shortest({s, g, 1.3}).length;

    const double shift_x = coord(rng), shift_y = coord(rng);
    const double rot = angle(rng);
    auto transform = [&](const Pose2& p) {
      return Pose2{std::cos(rot) * p.x - std::sin(rot) * p.y + shift_x,
                   std::sin(rot) * p.x + std::cos(rot) * p.y + shift_y,
                   p.theta + rot};
    };
    const double len2 =
        dubins_shortest({transform(s), transform(g), 1.3}).length;
    EXPECT_NEAR(len, len2, 1e-6 * (1.0 + len));
  }
}

TEST(Dubins, RadiusScaling) {
  const Pose2 s{0, 0, 0.4};
  const Pose2 g{7, 3, -1.0};
  const double l1 = dubins_shortest({s, g, 1.0}).length;
  const Pose2 s2{0, 0, 0.4};
  const Pose2 g2{14, 6, -1.0};
  const double l2 = dubins_shortest({s2, g2, 2.0}).length;
  EXPECT_NEAR(2.0 * l1, l2, 1e-9 * l2);
}

TEST(Dubins, RejectsBadRadius) {
  EXPECT_THROW(dubins_shortest({{0, 0, 0}, {1, 0, 0}, 0.0}),
               std::invalid_argument);
}

}  // namespace
}  // namespace triplan

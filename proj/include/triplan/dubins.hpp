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

#ifndef TRIPLAN_DUBINS_HPP_
#define TRIPLAN_DUBINS_HPP_

#include <array>
#include <vector>

namespace triplan {

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

enum class DubinsWord { LSL, RSR, LSR, RSL, RLR, LRL };

/// Shortest bounded-curvature forward path between two poses.
struct DubinsQuery {
  Pose2 start;
  Pose2 goal;
  double radius = 1.0;
};

/// One candidate word: params are (first arc angle, straight length or
/// middle arc angle, last arc angle); arcs in radians.
struct DubinsPath {
  DubinsWord word = DubinsWord::LSL;
  std::array<double, 3> params{0.0, 0.0, 0.0};
  double length = 0.0;
};

/// All feasible word candidates, each verified by forward composition.
std::vector<DubinsPath> dubins_candidates(const DubinsQuery& q);

/// Globally shortest candidate.
DubinsPath dubins_shortest(const DubinsQuery& q);

/// Endpoint pose reached by driving the given path from the start pose.
Pose2 dubins_endpoint(const Pose2& start, double radius,
                      const DubinsPath& path);

const char* to_string(DubinsWord word);

}  // namespace triplan

#endif  // TRIPLAN_DUBINS_HPP_

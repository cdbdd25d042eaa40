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

#ifndef TRIPLAN_OBJECTIVES_HPP_
#define TRIPLAN_OBJECTIVES_HPP_

#include <Eigen/Dense>

#include "triplan/dynamics.hpp"
#include "triplan/errors.hpp"
#include "triplan/geometry.hpp"

namespace triplan {

enum class ObjectiveKind { Time, Distance, Energy };

/// Non-negative instantaneous cost J(x, u) plus an admissible estimate of the
/// remaining cost to a goal position.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::Time;
  double epsilon = 1e-6;    // smoothing for |.| integrands
  double u_max = 1.0;       // max speed, time heuristic denominator
  double time_cap = 1200.0; // terminal-time bound, Energy only

  static Objective time(const DynamicsModel& model);
  static Objective distance(const DynamicsModel& model, double epsilon = 1e-6);
  static Objective energy(const DynamicsModel& model, double epsilon = 1e-6,
                          double time_cap = 1200.0);

  /// True when the transcription must bound the total trajectory time.
  bool has_time_cap() const { return kind == ObjectiveKind::Energy; }

  double cost(const DynamicsModel& model, const Eigen::VectorXd& x,
              const Eigen::VectorXd& u) const;
  void cost_gradient(const DynamicsModel& model, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, Eigen::VectorXd& dJdx,
                     Eigen::VectorXd& dJdu) const;

  /// Admissible cost-to-go from state x to a goal at the given position.
  double heuristic(const DynamicsModel& model, const Eigen::VectorXd& x,
                   const Point2& goal_pos) const;
};

}  // namespace triplan

#endif  // TRIPLAN_OBJECTIVES_HPP_

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

#include "triplan/objectives.hpp"

#include <cmath>
#include <string>

namespace triplan {

Objective Objective::time(const DynamicsModel& model) {
  Objective o;
  o.kind = ObjectiveKind::Time;
  o.u_max = model.max_speed();
  return o;
}

Objective Objective::distance(const DynamicsModel& model, double epsilon) {
  if (epsilon <= 0.0) throw InputError("smoothing epsilon must be positive");
  Objective o;
  o.kind = ObjectiveKind::Distance;
  o.epsilon = epsilon;
  o.u_max = model.max_speed();
  return o;
}

Objective Objective::energy(const DynamicsModel& model, double epsilon,
                            double time_cap) {
  if (epsilon <= 0.0) throw InputError("smoothing epsilon must be positive");
  if (time_cap <= 0.0) throw InputError("time cap must be positive");
  Eigen::Vector3d p;
  Eigen::Matrix3Xd dx, du;
  if (!model.power_terms(Eigen::VectorXd::Zero(model.state_dim()),
                         Eigen::VectorXd::Zero(model.control_dim()), p, dx,
                         du)) {
    throw InputError("energy objective unsupported for model '" +
                     std::string(model.name()) + "'");
  }
  Objective o;
  o.kind = ObjectiveKind::Energy;
  o.epsilon = epsilon;
  o.u_max = model.max_speed();
  o.time_cap = time_cap;
  return o;
}

double Objective::cost(const DynamicsModel& model, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u) const {
  switch (kind) {
    case ObjectiveKind::Time:
      return 1.0;
    case ObjectiveKind::Distance: {
      if (const auto v = model.constant_speed()) return *v;
      Eigen::VectorXd d;
      const double s2 = model.planar_speed_sq(x, d);
      return std::sqrt(s2 + epsilon);
    }
    case ObjectiveKind::Energy: {
      Eigen::Vector3d p;
      Eigen::Matrix3Xd dpx, dpu;
      model.power_terms(x, u, p, dpx, dpu);
      double total = 0.0;
      for (int i = 0; i < 3; ++i) total += std::sqrt(p(i) * p(i) + epsilon);
      return total;
    }
  }
  return 0.0;
}

void Objective::cost_gradient(const DynamicsModel& model,
                              const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, Eigen::VectorXd& dJdx,
                              Eigen::VectorXd& dJdu) const {
  dJdx.setZero(model.state_dim());
  dJdu.setZero(model.control_dim());
  switch (kind) {
    case ObjectiveKind::Time:
      return;
    case ObjectiveKind::Distance: {
      if (model.constant_speed()) return;
      Eigen::VectorXd d;
      const double s2 = model.planar_speed_sq(x, d);
      const double denom = 2.0 * std::sqrt(s2 + epsilon);
      dJdx = d / denom;
      return;
    }
    case ObjectiveKind::Energy: {
      Eigen::Vector3d p;
      Eigen::Matrix3Xd dpx, dpu;
      model.power_terms(x, u, p, dpx, dpu);
      for (int i = 0; i < 3; ++i) {
        const double w = p(i) / std::sqrt(p(i) * p(i) + epsilon);
        dJdx += w * dpx.row(i).transpose();
        dJdu += w * dpu.row(i).transpose();
      }
      return;
    }
  }
}

double Objective::heuristic(const DynamicsModel& model,
                            const Eigen::VectorXd& x,
                            const Point2& goal_pos) const {
  const Point2 pos = position_of(model, x);
  const double dist = (goal_pos - pos).norm();
  switch (kind) {
    case ObjectiveKind::Time:
      return dist / u_max;
    case ObjectiveKind::Distance:
      return dist;
    case ObjectiveKind::Energy:
      return 0.0;
  }
  return 0.0;
}

}  // namespace triplan

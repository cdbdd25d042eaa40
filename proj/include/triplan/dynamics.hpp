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

#ifndef TRIPLAN_DYNAMICS_HPP_
#define TRIPLAN_DYNAMICS_HPP_

#include <memory>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "triplan/geometry.hpp"

namespace triplan {

/// Continuous-time model xdot = f(x, u) with box bounds and optional
/// algebraic path constraints. State components 0 and 1 are the planar
/// position. Instances are immutable and safe to share across threads.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual std::string_view name() const = 0;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;

  virtual Eigen::VectorXd state_lower() const = 0;
  virtual Eigen::VectorXd state_upper() const = 0;
  virtual Eigen::VectorXd control_lower() const = 0;
  virtual Eigen::VectorXd control_upper() const = 0;

  virtual void rhs(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   Eigen::VectorXd& dx) const = 0;
  virtual void rhs_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                            Eigen::MatrixXd& dfdx,
                            Eigen::MatrixXd& dfdu) const = 0;

  /// Algebraic constraints g(x) = 0 holding along the whole trajectory.
  virtual int path_constraint_dim() const { return 0; }
  virtual void path_constraints(const Eigen::VectorXd& x,
                                Eigen::VectorXd& g) const {}
  virtual void path_constraint_jacobian(const Eigen::VectorXd& x,
                                        Eigen::MatrixXd& dgdx) const {}
  /// State components entering the path constraints.
  virtual std::vector<int> path_constraint_components() const { return {}; }
  /// Restores algebraic invariants exactly (gauge repair); identity for
  /// models without path constraints.
  virtual void normalize_state(Eigen::VectorXd&) const {}

  /// Maximum achievable planar speed (used by the time heuristic).
  virtual double max_speed() const = 0;
  /// Moderate cruising speed used when constructing initial guesses.
  virtual double nominal_speed() const = 0;

  /// Planar speed squared xdot^2 + ydot^2 as a function of the state, with
  /// its state gradient. Constant for models moving at fixed speed.
  virtual double planar_speed_sq(const Eigen::VectorXd& x,
                                 Eigen::VectorXd& d_dx) const = 0;
  /// Set when the planar speed is a model constant (car at v = const).
  virtual std::optional<double> constant_speed() const { return std::nullopt; }

  /// Instantaneous mechanical power terms (force*velocity per axis) for
  /// energy objectives. Models without an actuation model return false.
  virtual bool power_terms(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           Eigen::Vector3d& p, Eigen::Matrix3Xd& dp_dx,
                           Eigen::Matrix3Xd& dp_du) const {
    return false;
  }

  /// A full state at the given position, pointing along heading, moving at
  /// the given speed. Used for initial guesses.
  virtual Eigen::VectorXd guess_state(const Point2& pos, double heading,
                                      double speed) const = 0;
  virtual Eigen::VectorXd guess_control() const = 0;
};

Point2 position_of(const DynamicsModel& model, const Eigen::VectorXd& x);

struct Boxes {
  Eigen::VectorXd state_lower, state_upper;
  Eigen::VectorXd control_lower, control_upper;
};
Boxes bounds(const DynamicsModel& model);

/// Kinematic car [x, y, psi] at constant speed with bounded turning rate.
class CarModel : public DynamicsModel {
 public:
  explicit CarModel(double speed = 1.0, double max_turn_rate = 1.0);

  std::string_view name() const override { return "car"; }
  int state_dim() const override { return 3; }
  int control_dim() const override { return 1; }
  Eigen::VectorXd state_lower() const override;
  Eigen::VectorXd state_upper() const override;
  Eigen::VectorXd control_lower() const override;
  Eigen::VectorXd control_upper() const override;
  void rhs(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
           Eigen::VectorXd& dx) const override;
  void rhs_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                    Eigen::MatrixXd& dfdx, Eigen::MatrixXd& dfdu) const override;
  double max_speed() const override { return speed_; }
  double nominal_speed() const override { return speed_; }
  double planar_speed_sq(const Eigen::VectorXd& x,
                         Eigen::VectorXd& d_dx) const override;
  std::optional<double> constant_speed() const override { return speed_; }
  Eigen::VectorXd guess_state(const Point2& pos, double heading,
                              double speed) const override;
  Eigen::VectorXd guess_control() const override;

  double speed() const { return speed_; }
  double max_turn_rate() const { return max_turn_rate_; }
  double turn_radius() const { return speed_ / max_turn_rate_; }

 private:
  double speed_;
  double max_turn_rate_;
};

/// 3-DOF surface vessel [x, y, z_r, z_i, u, v, r] with a single azimuth
/// thruster [u1 (N), u2 (rad)]. Heading is carried as a unit complex number
/// enforced through a path constraint.
class VesselModel : public DynamicsModel {
 public:
  VesselModel();

  std::string_view name() const override { return "vessel"; }
  int state_dim() const override { return 7; }
  int control_dim() const override { return 2; }
  Eigen::VectorXd state_lower() const override;
  Eigen::VectorXd state_upper() const override;
  Eigen::VectorXd control_lower() const override;
  Eigen::VectorXd control_upper() const override;
  void rhs(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
           Eigen::VectorXd& dx) const override;
  void rhs_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                    Eigen::MatrixXd& dfdx, Eigen::MatrixXd& dfdu) const override;
  int path_constraint_dim() const override { return 1; }
  void path_constraints(const Eigen::VectorXd& x,
                        Eigen::VectorXd& g) const override;
  void path_constraint_jacobian(const Eigen::VectorXd& x,
                                Eigen::MatrixXd& dgdx) const override;
  std::vector<int> path_constraint_components() const override { return {2, 3}; }
  void normalize_state(Eigen::VectorXd& x) const override;
  double max_speed() const override { return max_surge_speed_; }
  double nominal_speed() const override { return 0.6 * max_surge_speed_; }
  double planar_speed_sq(const Eigen::VectorXd& x,
                         Eigen::VectorXd& d_dx) const override;
  bool power_terms(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   Eigen::Vector3d& p, Eigen::Matrix3Xd& dp_dx,
                   Eigen::Matrix3Xd& dp_du) const override;
  Eigen::VectorXd guess_state(const Point2& pos, double heading,
                              double speed) const override;
  Eigen::VectorXd guess_control() const override;

  /// Thrust vector tau = [X, Y, N] for a control, with Jacobian.
  void thrust(const Eigen::VectorXd& u, Eigen::Vector3d& tau,
              Eigen::Matrix<double, 3, 2>& dtau_du) const;

 private:
  double max_surge_speed_;  // steady-state surge speed at full thrust
};

}  // namespace triplan

#endif  // TRIPLAN_DYNAMICS_HPP_

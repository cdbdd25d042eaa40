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

#include "triplan/dynamics.hpp"

#include <cmath>

namespace triplan {

namespace {

// milliAmpere-like rigid-body parameters.
constexpr double kMassSurge = 2138.0;
constexpr double kMassSway = 2528.0;
constexpr double kMassYaw = 3942.0;

constexpr double kThrustMax = 400.0;
constexpr double kAzimuthMax = M_PI / 4.0;

// Combined Coriolis + damping terms, see vessel_drag below.
constexpr double kSurgeLin = 10.3, kSurgeQuad = 114.6;
constexpr double kSwayLin = 13.0, kSwayQuad = 200.8;
constexpr double kYawLin = 201.0, kYawQuad = 424.1;

}  // namespace

Point2 position_of(const DynamicsModel& model, const Eigen::VectorXd& x) {
  (void)model;
  return {x(0), x(1)};
}

Boxes bounds(const DynamicsModel& model) {
  return Boxes{model.state_lower(), model.state_upper(),
               model.control_lower(), model.control_upper()};
}

// ---------------------------------------------------------------------------
// CarModel

CarModel::CarModel(double speed, double max_turn_rate)
    : speed_(speed), max_turn_rate_(max_turn_rate) {}

Eigen::VectorXd CarModel::state_lower() const {
  Eigen::VectorXd lo(3);
  lo << -1e6, -1e6, -100.0;
  return lo;
}

Eigen::VectorXd CarModel::state_upper() const {
  Eigen::VectorXd hi(3);
  hi << 1e6, 1e6, 100.0;
  return hi;
}

Eigen::VectorXd CarModel::control_lower() const {
  return Eigen::VectorXd::Constant(1, -max_turn_rate_);
}

Eigen::VectorXd CarModel::control_upper() const {
  return Eigen::VectorXd::Constant(1, max_turn_rate_);
}

void CarModel::rhs(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   Eigen::VectorXd& dx) const {
  dx.resize(3);
  dx(0) = std::cos(x(2)) * speed_;
  dx(1) = std::sin(x(2)) * speed_;
  dx(2) = u(0);
}

void CarModel::rhs_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd&,
                            Eigen::MatrixXd& dfdx,
                            Eigen::MatrixXd& dfdu) const {
  dfdx.setZero(3, 3);
  dfdu.setZero(3, 1);
  dfdx(0, 2) = -std::sin(x(2)) * speed_;
  dfdx(1, 2) = std::cos(x(2)) * speed_;
  dfdu(2, 0) = 1.0;
}

double CarModel::planar_speed_sq(const Eigen::VectorXd&,
                                 Eigen::VectorXd& d_dx) const {
  d_dx.setZero(3);
  return speed_ * speed_;
}

Eigen::VectorXd CarModel::guess_state(const Point2& pos, double heading,
                                      double) const {
  Eigen::VectorXd x(3);
  x << pos.x, pos.y, heading;
  return x;
}

Eigen::VectorXd CarModel::guess_control() const {
  return Eigen::VectorXd::Zero(1);
}

// ---------------------------------------------------------------------------
// VesselModel

VesselModel::VesselModel() {
  // Steady surge speed where full thrust balances drag:
  // kThrustMax = kSurgeLin * u + kSurgeQuad * u^2, u > 0.
  const double a = kSurgeQuad, b = kSurgeLin, c = -kThrustMax;
  max_surge_speed_ = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
}

Eigen::VectorXd VesselModel::state_lower() const {
  Eigen::VectorXd lo(7);
  lo << -1e6, -1e6, -1.2, -1.2, -2.0, -2.0, -1.0;
  return lo;
}

Eigen::VectorXd VesselModel::state_upper() const {
  Eigen::VectorXd hi(7);
  hi << 1e6, 1e6, 1.2, 1.2, 2.5, 2.0, 1.0;
  return hi;
}

Eigen::VectorXd VesselModel::control_lower() const {
  Eigen::VectorXd lo(2);
  lo << 0.0, -kAzimuthMax;
  return lo;
}

Eigen::VectorXd VesselModel::control_upper() const {
  Eigen::VectorXd hi(2);
  hi << kThrustMax, kAzimuthMax;
  return hi;
}

void VesselModel::thrust(const Eigen::VectorXd& u, Eigen::Vector3d& tau,
                         Eigen::Matrix<double, 3, 2>& dtau_du) const {
  const double c = std::cos(u(1));
  const double s = std::sin(u(1));
  tau << u(0) * c, u(0) * s, -2.0 * u(0) * s;
  dtau_du << c, -u(0) * s,  //
      s, u(0) * c,          //
      -2.0 * s, -2.0 * u(0) * c;
}

void VesselModel::rhs(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                      Eigen::VectorXd& dx) const {
  const double zr = x(2), zi = x(3);
  const double su = x(4), sv = x(5), sr = x(6);
  // Normalizing the rotation keeps the kinematics identical on the unit
  // circle while removing any incentive for |z| to drift off it.
  const double inv = 1.0 / std::sqrt(zr * zr + zi * zi);

  Eigen::Vector3d tau;
  Eigen::Matrix<double, 3, 2> dtau;
  thrust(u, tau, dtau);

  dx.resize(7);
  dx(0) = (zr * su - zi * sv) * inv;
  dx(1) = (zi * su + zr * sv) * inv;
  dx(2) = -zi * sr;
  dx(3) = zr * sr;
  dx(4) = (tau(0) - (kSurgeLin * su + kSurgeQuad * std::abs(su) * su -
                     kMassSway * sv * sr)) /
          kMassSurge;
  dx(5) = (tau(1) - (kSwayLin * sv + kSwayQuad * std::abs(sv) * sv +
                     kMassSurge * su * sr)) /
          kMassSway;
  dx(6) = (tau(2) - (kYawLin * sr + kYawQuad * std::abs(sr) * sr +
                     390.0 * su * sv)) /
          kMassYaw;
}

void VesselModel::rhs_jacobian(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, Eigen::MatrixXd& dfdx,
                               Eigen::MatrixXd& dfdu) const {
  const double zr = x(2), zi = x(3);
  const double su = x(4), sv = x(5), sr = x(6);

  Eigen::Vector3d tau;
  Eigen::Matrix<double, 3, 2> dtau;
  thrust(u, tau, dtau);

  dfdx.setZero(7, 7);
  dfdu.setZero(7, 2);

  const double s2 = zr * zr + zi * zi;
  const double inv = 1.0 / std::sqrt(s2);
  const double inv3 = inv / s2;
  const double gx = zr * su - zi * sv;
  const double gy = zi * su + zr * sv;

  dfdx(0, 2) = su * inv - gx * zr * inv3;
  dfdx(0, 3) = -sv * inv - gx * zi * inv3;
  dfdx(0, 4) = zr * inv;
  dfdx(0, 5) = -zi * inv;

  dfdx(1, 2) = sv * inv - gy * zr * inv3;
  dfdx(1, 3) = su * inv - gy * zi * inv3;
  dfdx(1, 4) = zi * inv;
  dfdx(1, 5) = zr * inv;

  dfdx(2, 3) = -sr;
  dfdx(2, 6) = -zi;

  dfdx(3, 2) = sr;
  dfdx(3, 6) = zr;

  dfdx(4, 4) = -(kSurgeLin + 2.0 * kSurgeQuad * std::abs(su)) / kMassSurge;
  dfdx(4, 5) = kMassSway * sr / kMassSurge;
  dfdx(4, 6) = kMassSway * sv / kMassSurge;

  dfdx(5, 4) = -kMassSurge * sr / kMassSway;
  dfdx(5, 5) = -(kSwayLin + 2.0 * kSwayQuad * std::abs(sv)) / kMassSway;
  dfdx(5, 6) = -kMassSurge * su / kMassSway;

  dfdx(6, 4) = -390.0 * sv / kMassYaw;
  dfdx(6, 5) = -390.0 * su / kMassYaw;
  dfdx(6, 6) = -(kYawLin + 2.0 * kYawQuad * std::abs(sr)) / kMassYaw;

  dfdu.row(4) = dtau.row(0) / kMassSurge;
  dfdu.row(5) = dtau.row(1) / kMassSway;
  dfdu.row(6) = dtau.row(2) / kMassYaw;
}

void VesselModel::path_constraints(const Eigen::VectorXd& x,
                                   Eigen::VectorXd& g) const {
  g.resize(1);
  g(0) = x(2) * x(2) + x(3) * x(3) - 1.0;
}

void VesselModel::path_constraint_jacobian(const Eigen::VectorXd& x,
                                           Eigen::MatrixXd& dgdx) const {
  dgdx.setZero(1, 7);
  dgdx(0, 2) = 2.0 * x(2);
  dgdx(0, 3) = 2.0 * x(3);
}

double VesselModel::planar_speed_sq(const Eigen::VectorXd& x,
                                    Eigen::VectorXd& d_dx) const {
  // With |z| = 1, xdot^2 + ydot^2 = u^2 + v^2.
  d_dx.setZero(7);
  d_dx(4) = 2.0 * x(4);
  d_dx(5) = 2.0 * x(5);
  return x(4) * x(4) + x(5) * x(5);
}

bool VesselModel::power_terms(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, Eigen::Vector3d& p,
                              Eigen::Matrix3Xd& dp_dx,
                              Eigen::Matrix3Xd& dp_du) const {
  Eigen::Vector3d tau;
  Eigen::Matrix<double, 3, 2> dtau;
  thrust(u, tau, dtau);
  const Eigen::Vector3d nu(x(4), x(5), x(6));

  p = tau.cwiseProduct(nu);
  dp_dx.setZero(3, 7);
  dp_dx(0, 4) = tau(0);
  dp_dx(1, 5) = tau(1);
  dp_dx(2, 6) = tau(2);
  dp_du.setZero(3, 2);
  for (int i = 0; i < 3; ++i) {
    dp_du(i, 0) = dtau(i, 0) * nu(i);
    dp_du(i, 1) = dtau(i, 1) * nu(i);
  }
  return true;
}

void VesselModel::normalize_state(Eigen::VectorXd& x) const {
  const double n = std::hypot(x(2), x(3));
  if (n > 1e-12) {
    x(2) /= n;
    x(3) /= n;
  } else {
    x(2) = 1.0;
    x(3) = 0.0;
  }
}

Eigen::VectorXd VesselModel::guess_state(const Point2& pos, double heading,
                                         double speed) const {
  Eigen::VectorXd x(7);
  x << pos.x, pos.y, std::cos(heading), std::sin(heading), speed, 0.0, 0.0;
  return x;
}

Eigen::VectorXd VesselModel::guess_control() const {
  // Thrust roughly balancing drag at the nominal speed, pointing forward.
  const double v = nominal_speed();
  Eigen::VectorXd u(2);
  u << kSurgeLin * v + kSurgeQuad * v * v, 0.0;
  return u;
}

}  // namespace triplan

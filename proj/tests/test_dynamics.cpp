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
#include <random>

#include <gtest/gtest.h>

namespace triplan {
namespace {

TEST(Car, RhsKnownValues) {
  CarModel car;
  Eigen::VectorXd x(3), u(1), dx;
  x << 0, 0, 0;
  u << 0;
  car.rhs(x, u, dx);
  EXPECT_NEAR(dx(0), 1.0, 1e-15);
  EXPECT_NEAR(dx(1), 0.0, 1e-15);
  EXPECT_NEAR(dx(2), 0.0, 1e-15);

  x(2) = M_PI / 2.0;
  u(0) = 0.3;
  car.rhs(x, u, dx);
  EXPECT_NEAR(dx(0), 0.0, 1e-15);
  EXPECT_NEAR(dx(1), 1.0, 1e-15);
  EXPECT_NEAR(dx(2), 0.3, 1e-15);

  x(2) = M_PI / 4.0;
  u(0) = -1.0;
  car.rhs(x, u, dx);
  EXPECT_NEAR(dx(0), std::sqrt(2.0) / 2.0, 1e-14);
  EXPECT_NEAR(dx(1), std::sqrt(2.0) / 2.0, 1e-14);
  EXPECT_NEAR(dx(2), -1.0, 1e-15);
}

TEST(Car, SpeedInvariant) {
  CarModel car;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  Eigen::VectorXd x(3), u(1), dx;
  for (int k = 0; k < 1000; ++k) {
    x << 0, 0, angle(rng);
    u << angle(rng) / 10.0;
    car.rhs(x, u, dx);
    EXPECT_NEAR(std::hypot(dx(0), dx(1)), 1.0, 1e-14);
  }
}

TEST(Car, BoundsAndPosition) {
  CarModel car;
  EXPECT_DOUBLE_EQ(car.control_lower()(0), -1.0);
  EXPECT_DOUBLE_EQ(car.control_upper()(0), 1.0);
  Eigen::VectorXd x(3);
  x << 3, 4, 0.7;
  const Point2 p = position_of(car, x);
  EXPECT_DOUBLE_EQ(p.x, 3.0);
  EXPECT_DOUBLE_EQ(p.y, 4.0);
  const Boxes b = bounds(car);
  EXPECT_TRUE(b.state_lower.allFinite());
  EXPECT_TRUE(b.state_upper.allFinite());
}

TEST(Vessel, RestIsEquilibrium) {
  VesselModel vessel;
  Eigen::VectorXd x(7), u(2), dx;
  x << 3, -2, 1, 0, 0, 0, 0;
  u << 0, 0;
  vessel.rhs(x, u, dx);
  EXPECT_NEAR(dx.lpNorm<Eigen::Infinity>(), 0.0, 1e-15);
}

TEST(Vessel, FullThrustSurgeAcceleration) {
  VesselModel vessel;
  Eigen::VectorXd x(7), u(2), dx;
  x << 0, 0, 1, 0, 0, 0, 0;
  u << 400, 0;
  vessel.rhs(x, u, dx);
  EXPECT_NEAR(dx(4), 400.0 / 2138.0, 1e-12);
  EXPECT_NEAR(dx(5), 0.0, 1e-15);
  EXPECT_NEAR(dx(6), 0.0, 1e-15);
}

TEST(Vessel, KinematicsAlongHeading) {
  VesselModel vessel;
  Eigen::VectorXd x(7), u(2), dx;
  x << 0, 0, 1, 0, 1, 0, 0;
  u << 0, 0;
  vessel.rhs(x, u, dx);
  EXPECT_NEAR(dx(0), 1.0, 1e-15);
  EXPECT_NEAR(dx(1), 0.0, 1e-15);
  EXPECT_NEAR(dx(2), 0.0, 1e-15);
  EXPECT_NEAR(dx(3), 0.0, 1e-15);
}

// d/dt |z|^2 = 0 under the orientation kinematics.
TEST(Vessel, UnitNormPreserved) {
  VesselModel vessel;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Eigen::VectorXd x(7), u(2), dx;
  for (int k = 0; k < 1000; ++k) {
    const double psi = 3.0 * val(rng);
    x << val(rng), val(rng), std::cos(psi), std::sin(psi), 1.5 * val(rng),
        val(rng), val(rng);
    u << 200.0 * (val(rng) + 1.0), 0.7 * val(rng);
    vessel.rhs(x, u, dx);
    const double norm_rate = 2.0 * (x(2) * dx(2) + x(3) * dx(3));
    EXPECT_NEAR(norm_rate, 0.0, 1e-12);
  }
}

TEST(Vessel, MaxSpeedFromDragBalance) {
  VesselModel vessel;
  const double u = vessel.max_speed();
  EXPECT_NEAR(10.3 * u + 114.6 * u * u, 400.0, 1e-9);
  EXPECT_GT(u, 1.0);
  EXPECT_LT(u, 3.0);
}

TEST(Vessel, ControlBounds) {
  VesselModel vessel;
  EXPECT_DOUBLE_EQ(vessel.control_lower()(0), 0.0);
  EXPECT_DOUBLE_EQ(vessel.control_upper()(0), 400.0);
  EXPECT_NEAR(vessel.control_upper()(1), M_PI / 4.0, 1e-15);
}

TEST(Vessel, PathConstraintUnitNorm) {
  VesselModel vessel;
  Eigen::VectorXd x(7), g;
  x << 0, 0, 0.6, 0.8, 0, 0, 0;
  vessel.path_constraints(x, g);
  ASSERT_EQ(g.size(), 1);
  EXPECT_NEAR(g(0), 0.0, 1e-15);
  x(2) = 1.0;
  vessel.path_constraints(x, g);
  EXPECT_NEAR(g(0), 0.64, 1e-12);
}

// Analytic Jacobians against central differences for both models.
template <typename Model>
void check_rhs_jacobian(const Model& model, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& u) {
  const int nx = model.state_dim();
  const int nu = model.control_dim();
  Eigen::MatrixXd dfdx, dfdu;
  model.rhs_jacobian(x, u, dfdx, dfdu);

  const double h = 1e-6;
  Eigen::VectorXd xp = x, up = u, f_plus, f_minus;
  for (int i = 0; i < nx; ++i) {
    xp(i) = x(i) + h;
    model.rhs(xp, u, f_plus);
    xp(i) = x(i) - h;
    model.rhs(xp, u, f_minus);
    xp(i) = x(i);
    for (int r = 0; r < nx; ++r) {
      EXPECT_NEAR(dfdx(r, i), (f_plus(r) - f_minus(r)) / (2 * h), 1e-6);
    }
  }
  for (int i = 0; i < nu; ++i) {
    up(i) = u(i) + h;
    model.rhs(x, up, f_plus);
    up(i) = u(i) - h;
    model.rhs(x, up, f_minus);
    up(i) = u(i);
    for (int r = 0; r < nx; ++r) {
      EXPECT_NEAR(dfdu(r, i), (f_plus(r) - f_minus(r)) / (2 * h), 1e-6);
    }
  }
}

TEST(Dynamics, JacobiansMatchFiniteDifferences) {
  CarModel car;
  VesselModel vessel;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> val(-0.9, 0.9);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd xc(3), uc(1);
    xc << val(rng), val(rng), 2.0 * val(rng);
    uc << val(rng);
    check_rhs_jacobian(car, xc, uc);

    Eigen::VectorXd xv(7), uv(2);
    const double psi = 2.0 * val(rng);
    xv << val(rng), val(rng), std::cos(psi), std::sin(psi), 1.2 * val(rng),
        0.8 * val(rng), 0.6 * val(rng);
    uv << 150.0 * (val(rng) + 1.0), 0.6 * val(rng);
    check_rhs_jacobian(vessel, xv, uv);
  }
}

}  // namespace
}  // namespace triplan

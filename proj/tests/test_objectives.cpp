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
#include <random>

#include <gtest/gtest.h>

namespace triplan {
namespace {

TEST(Objectives, TimeCostIsOne) {
  VesselModel vessel;
  const Objective obj = Objective::time(vessel);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(7);
  x(2) = 1.0;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
  EXPECT_DOUBLE_EQ(obj.cost(vessel, x, u), 1.0);
}

TEST(Objectives, DistanceCostThreeFourFive) {
  VesselModel vessel;
  const Objective obj = Objective::distance(vessel, 1e-12);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(7);
  x(2) = 1.0;
  x(4) = 3.0;  // exceeds the model box, irrelevant for the integrand test
  x(5) = 4.0;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
  EXPECT_NEAR(obj.cost(vessel, x, u), 5.0, 1e-9);
}

TEST(Objectives, CarDistanceCostIsExactlyOne) {
  CarModel car;
  const Objective obj = Objective::distance(car);
  Eigen::VectorXd x(3), u(1);
  x << 2.0, -1.0, 0.3;
  u << 0.5;
  EXPECT_DOUBLE_EQ(obj.cost(car, x, u), 1.0);
}

TEST(Objectives, EnergyCostAbsolutePower) {
  VesselModel vessel;
  const Objective obj = Objective::energy(vessel, 1e-12, 1200.0);
  // tau = (10, 0, 0) needs u1 = 10, u2 = 0; with u = 2 power is 20 W.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(7);
  x(2) = 1.0;
  x(4) = 2.0;
  Eigen::VectorXd u(2);
  u << 10.0, 0.0;
  EXPECT_NEAR(obj.cost(vessel, x, u), 20.0, 1e-5);
}

TEST(Objectives, EnergyRejectedForCar) {
  CarModel car;
  EXPECT_THROW(Objective::energy(car), InputError);
}

TEST(Objectives, Heuristics) {
  VesselModel vessel;
  Objective time = Objective::time(vessel);
  time.u_max = 5.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(7);
  x(2) = 1.0;
  EXPECT_NEAR(time.heuristic(vessel, x, {3.0, 4.0}), 1.0, 1e-12);

  const Objective dist = Objective::distance(vessel);
  EXPECT_NEAR(dist.heuristic(vessel, x, {3.0, 4.0}), 5.0, 1e-12);

  const Objective energy = Objective::energy(vessel);
  EXPECT_DOUBLE_EQ(energy.heuristic(vessel, x, {3.0, 4.0}), 0.0);
}

TEST(Objectives, TimeHeuristicUsesModelMaxSpeed) {
  VesselModel vessel;
  const Objective obj = Objective::time(vessel);
  EXPECT_DOUBLE_EQ(obj.u_max, vessel.max_speed());
}

TEST(Objectives, NonNegativityRandomized) {
  VesselModel vessel;
  const Objective objs[] = {Objective::time(vessel),
                            Objective::distance(vessel),
                            Objective::energy(vessel)};
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Eigen::VectorXd x(7), u(2);
  for (int k = 0; k < 10000; ++k) {
    const double psi = 3.0 * val(rng);
    x << 10 * val(rng), 10 * val(rng), std::cos(psi), std::sin(psi),
        2.0 * val(rng), 1.5 * val(rng), val(rng);
    u << 200.0 * (val(rng) + 1.0), 0.78 * val(rng);
    for (const Objective& o : objs) {
      ASSERT_GE(o.cost(vessel, x, u), 0.0);
    }
  }
}

TEST(Objectives, SmoothingBiasBound) {
  const double eps = 1e-6;
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> val(-100.0, 100.0);
  for (int k = 0; k < 10000; ++k) {
    const double a = val(rng);
    const double bias = std::sqrt(a * a + eps) - std::abs(a);
    ASSERT_GE(bias, 0.0);
    ASSERT_LE(bias, std::sqrt(eps));
  }
}

TEST(Objectives, GradientsMatchFiniteDifferences) {
  VesselModel vessel;
  const Objective objs[] = {Objective::distance(vessel),
                            Objective::energy(vessel)};
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> val(-0.8, 0.8);
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd x(7), u(2);
    const double psi = 2.0 * val(rng);
    x << val(rng), val(rng), std::cos(psi), std::sin(psi), 1.5 * val(rng),
        val(rng), val(rng);
    u << 150.0 * (val(rng) + 1.1), 0.5 * val(rng);
    for (const Objective& o : objs) {
      Eigen::VectorXd dx, du;
      o.cost_gradient(vessel, x, u, dx, du);
      Eigen::VectorXd xp = x, up = u;
      for (int i = 0; i < 7; ++i) {
        xp(i) = x(i) + h;
        const double fp = o.cost(vessel, xp, u);
        xp(i) = x(i) - h;
        const double fm = o.cost(vessel, xp, u);
        xp(i) = x(i);
        ASSERT_NEAR(dx(i), (fp - fm) / (2 * h), 2e-5);
      }
      for (int i = 0; i < 2; ++i) {
        up(i) = u(i) + h;
        const double fp = o.cost(vessel, x, up);
        up(i) = u(i) - h;
        const double fm = o.cost(vessel, x, up);
        up(i) = u(i);
        ASSERT_NEAR(du(i), (fp - fm) / (2 * h), 2e-5);
      }
    }
  }
}

}  // namespace
}  // namespace triplan

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

#include "triplan/nlp.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace triplan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Small helper base with dense-ish plumbing for hand-written problems.
class TestProblem : public NlpProblem {
 public:
  int num_vars() const override { return n_; }
  int num_constraints() const override { return m_; }
  void var_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const override {
    lo = wl_;
    hi = wu_;
  }
  void constraint_bounds(Eigen::VectorXd& lo,
                         Eigen::VectorXd& hi) const override {
    lo = cl_;
    hi = cu_;
  }
  const std::vector<std::pair<int, int>>& jacobian_sparsity() const override {
    return sparsity_;
  }

 protected:
  int n_ = 0, m_ = 0;
  Eigen::VectorXd wl_, wu_, cl_, cu_;
  std::vector<std::pair<int, int>> sparsity_;
};

// min (w - 3)^2, unconstrained.
class Quadratic1D : public TestProblem {
 public:
  Quadratic1D() {
    n_ = 1;
    m_ = 0;
    wl_ = Eigen::VectorXd::Constant(1, -kInf);
    wu_ = Eigen::VectorXd::Constant(1, kInf);
    cl_.resize(0);
    cu_.resize(0);
  }
  double objective(const Eigen::VectorXd& w) const override {
    return (w(0) - 3.0) * (w(0) - 3.0);
  }
  void objective_gradient(const Eigen::VectorXd& w,
                          Eigen::VectorXd& g) const override {
    g(0) = 2.0 * (w(0) - 3.0);
  }
  void constraints(const Eigen::VectorXd&, Eigen::VectorXd&) const override {}
  void jacobian_values(const Eigen::VectorXd&,
                       Eigen::VectorXd&) const override {}
};

// min w1 + w2  s.t.  w1^2 + w2^2 = 1.
class CircleEquality : public TestProblem {
 public:
  CircleEquality() {
    n_ = 2;
    m_ = 1;
    wl_ = Eigen::VectorXd::Constant(2, -kInf);
    wu_ = Eigen::VectorXd::Constant(2, kInf);
    cl_ = Eigen::VectorXd::Constant(1, 1.0);
    cu_ = Eigen::VectorXd::Constant(1, 1.0);
    sparsity_ = {{0, 0}, {0, 1}};
  }
  double objective(const Eigen::VectorXd& w) const override {
    return w(0) + w(1);
  }
  void objective_gradient(const Eigen::VectorXd&,
                          Eigen::VectorXd& g) const override {
    g.setOnes();
  }
  void constraints(const Eigen::VectorXd& w,
                   Eigen::VectorXd& c) const override {
    c(0) = w(0) * w(0) + w(1) * w(1);
  }
  void jacobian_values(const Eigen::VectorXd& w,
                       Eigen::VectorXd& v) const override {
    v(0) = 2.0 * w(0);
    v(1) = 2.0 * w(1);
  }
};

// min -w  s.t.  w <= 5 (bound only).
class ActiveBound : public TestProblem {
 public:
  ActiveBound() {
    n_ = 1;
    m_ = 0;
    wl_ = Eigen::VectorXd::Constant(1, -kInf);
    wu_ = Eigen::VectorXd::Constant(1, 5.0);
    cl_.resize(0);
    cu_.resize(0);
  }
  double objective(const Eigen::VectorXd& w) const override { return -w(0); }
  void objective_gradient(const Eigen::VectorXd&,
                          Eigen::VectorXd& g) const override {
    g(0) = -1.0;
  }
  void constraints(const Eigen::VectorXd&, Eigen::VectorXd&) const override {}
  void jacobian_values(const Eigen::VectorXd&,
                       Eigen::VectorXd&) const override {}
};

// Rosenbrock with an inequality band: min rosenbrock s.t. w1 + w2 <= 1.5.
class RosenbrockBand : public TestProblem {
 public:
  RosenbrockBand() {
    n_ = 2;
    m_ = 1;
    wl_ = Eigen::VectorXd::Constant(2, -10.0);
    wu_ = Eigen::VectorXd::Constant(2, 10.0);
    cl_ = Eigen::VectorXd::Constant(1, -kInf);
    cu_ = Eigen::VectorXd::Constant(1, 1.5);
    sparsity_ = {{0, 0}, {0, 1}};
  }
  double objective(const Eigen::VectorXd& w) const override {
    const double a = 1.0 - w(0);
    const double b = w(1) - w(0) * w(0);
    return a * a + 100.0 * b * b;
  }
  void objective_gradient(const Eigen::VectorXd& w,
                          Eigen::VectorXd& g) const override {
    const double b = w(1) - w(0) * w(0);
    g(0) = -2.0 * (1.0 - w(0)) - 400.0 * w(0) * b;
    g(1) = 200.0 * b;
  }
  void constraints(const Eigen::VectorXd& w,
                   Eigen::VectorXd& c) const override {
    c(0) = w(0) + w(1);
  }
  void jacobian_values(const Eigen::VectorXd&,
                       Eigen::VectorXd& v) const override {
    v(0) = 1.0;
    v(1) = 1.0;
  }
};

// Infeasible: w^2 <= -1.
class ImpossibleProblem : public TestProblem {
 public:
  ImpossibleProblem() {
    n_ = 1;
    m_ = 1;
    wl_ = Eigen::VectorXd::Constant(1, -10.0);
    wu_ = Eigen::VectorXd::Constant(1, 10.0);
    cl_ = Eigen::VectorXd::Constant(1, -kInf);
    cu_ = Eigen::VectorXd::Constant(1, -1.0);
    sparsity_ = {{0, 0}};
  }
  double objective(const Eigen::VectorXd& w) const override {
    return w(0) * w(0);
  }
  void objective_gradient(const Eigen::VectorXd& w,
                          Eigen::VectorXd& g) const override {
    g(0) = 2.0 * w(0);
  }
  void constraints(const Eigen::VectorXd& w,
                   Eigen::VectorXd& c) const override {
    c(0) = w(0) * w(0);
  }
  void jacobian_values(const Eigen::VectorXd& w,
                       Eigen::VectorXd& v) const override {
    v(0) = 2.0 * w(0);
  }
};

TEST(Nlp, UnconstrainedQuadratic) {
  Quadratic1D p;
  const SolveReport rep = solve(p, Eigen::VectorXd::Zero(1));
  ASSERT_EQ(rep.status, NlpStatus::Optimal);
  EXPECT_NEAR(rep.primal(0), 3.0, 1e-5);
  EXPECT_LE(rep.kkt_residual, 1e-5);
}

TEST(Nlp, EqualityCircle) {
  CircleEquality p;
  Eigen::VectorXd w0(2);
  w0 << -0.5, -0.8;
  const SolveReport rep = solve(p, w0);
  ASSERT_EQ(rep.status, NlpStatus::Optimal);
  const double s = -std::sqrt(0.5);
  EXPECT_NEAR(rep.primal(0), s, 1e-4);
  EXPECT_NEAR(rep.primal(1), s, 1e-4);
  EXPECT_LE(rep.constraint_violation, 1e-6);
}

TEST(Nlp, ActiveUpperBound) {
  ActiveBound p;
  const SolveReport rep = solve(p, Eigen::VectorXd::Zero(1));
  ASSERT_EQ(rep.status, NlpStatus::Optimal);
  EXPECT_NEAR(rep.primal(0), 5.0, 1e-5);
}

TEST(Nlp, InequalityRosenbrock) {
  RosenbrockBand p;
  Eigen::VectorXd w0(2);
  w0 << -1.0, 2.0;
  const SolveReport rep = solve(p, w0);
  ASSERT_EQ(rep.status, NlpStatus::Optimal);
  // Unconstrained optimum (1, 1) violates the band; the solution sits on it.
  EXPECT_NEAR(rep.primal(0) + rep.primal(1), 1.5, 1e-4);
}

TEST(Nlp, InfeasibleDetected) {
  ImpossibleProblem p;
  const SolveReport rep = solve(p, Eigen::VectorXd::Zero(1));
  EXPECT_EQ(rep.status, NlpStatus::Infeasible);
  EXPECT_GT(rep.constraint_violation, 0.5);
}

TEST(Nlp, DeterministicIterates) {
  CircleEquality p;
  Eigen::VectorXd w0(2);
  w0 << 0.3, -0.9;
  const SolveReport a = solve(p, w0);
  const SolveReport b = solve(p, w0);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.iterate_hash, b.iterate_hash);
  EXPECT_EQ(std::memcmp(a.primal.data(), b.primal.data(),
                        sizeof(double) * a.primal.size()),
            0);
}

TEST(Nlp, FeasibilityCertificateReverified) {
  CircleEquality p;
  Eigen::VectorXd w0(2);
  w0 << -0.5, -0.8;
  const SolveReport rep = solve(p, w0);
  ASSERT_EQ(rep.status, NlpStatus::Optimal);
  Eigen::VectorXd c(1);
  p.constraints(rep.primal, c);
  EXPECT_NEAR(c(0), 1.0, 1e-6);
  EXPECT_LE(std::abs(c(0) - 1.0), rep.constraint_violation + 1e-12);
}

TEST(Nlp, DerivativeCheckerQuadratic) {
  CircleEquality p;
  Eigen::VectorXd w(2);
  w << 0.4, -1.3;
  EXPECT_LE(check_derivatives(p, w), 1e-9);
}

TEST(Nlp, DerivativeCheckerFlagsWrongGradient) {
  class Wrong : public Quadratic1D {
   public:
    void objective_gradient(const Eigen::VectorXd& w,
                            Eigen::VectorXd& g) const override {
      g(0) = 2.0 * (w(0) - 3.0) + 0.5;  // off by 0.5
    }
  };
  Wrong p;
  EXPECT_GT(check_derivatives(p, Eigen::VectorXd::Zero(1)), 0.05);
}

}  // namespace
}  // namespace triplan

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

#ifndef TRIPLAN_NLP_HPP_
#define TRIPLAN_NLP_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace triplan {

/// Sparse nonlinear program
///   minimize F(w)  subject to  cl <= c(w) <= cu,  wl <= w <= wu,
/// with equality rows expressed as cl == cu. Evaluators must be pure; the
/// solver supplies analytic first derivatives only.
class NlpProblem {
 public:
  virtual ~NlpProblem() = default;

  virtual int num_vars() const = 0;
  virtual int num_constraints() const = 0;

  virtual void var_bounds(Eigen::VectorXd& lower,
                          Eigen::VectorXd& upper) const = 0;
  virtual void constraint_bounds(Eigen::VectorXd& lower,
                                 Eigen::VectorXd& upper) const = 0;

  virtual double objective(const Eigen::VectorXd& w) const = 0;
  virtual void objective_gradient(const Eigen::VectorXd& w,
                                  Eigen::VectorXd& grad) const = 0;
  virtual void constraints(const Eigen::VectorXd& w,
                           Eigen::VectorXd& c) const = 0;

  /// Fixed sparsity pattern (row, col) of the constraint Jacobian; a superset
  /// of the true nonzeros is allowed.
  virtual const std::vector<std::pair<int, int>>& jacobian_sparsity()
      const = 0;
  /// Values aligned with jacobian_sparsity().
  virtual void jacobian_values(const Eigen::VectorXd& w,
                               Eigen::VectorXd& values) const = 0;

  /// Variable ranges (offset, length) treated as independent quasi-Newton
  /// blocks. Defaults to one dense block.
  virtual std::vector<std::pair<int, int>> hessian_blocks() const {
    return {{0, num_vars()}};
  }
};

enum class NlpStatus { Optimal, MaxIter, Infeasible, Diverged };

struct SolveReport {
  NlpStatus status = NlpStatus::MaxIter;
  double objective = 0.0;
  Eigen::VectorXd primal;
  double constraint_violation = 0.0;  // inf-norm at the returned point
  double kkt_residual = 0.0;          // scaled dual infeasibility
  int iterations = 0;
  double wall_time_s = 0.0;
  std::uint64_t iterate_hash = 0;  // digest of the iterate sequence
};

struct NlpOptions {
  double feas_tol = 1e-6;
  double opt_tol = 1e-5;
  int max_iter = 500;
  double mu_init = 0.1;
  bool verbose = false;
};

/// Interior-point solve with filter line search over a sparse symmetric
/// KKT system; deterministic for identical inputs.
SolveReport solve(const NlpProblem& problem, const Eigen::VectorXd& w0,
                  const NlpOptions& options = {});

/// Compares analytic derivatives against central differences; returns the
/// maximum relative error over gradient and Jacobian entries.
double check_derivatives(const NlpProblem& problem, const Eigen::VectorXd& w);

const char* to_string(NlpStatus status);

}  // namespace triplan

#endif  // TRIPLAN_NLP_HPP_

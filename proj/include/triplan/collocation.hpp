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

#ifndef TRIPLAN_COLLOCATION_HPP_
#define TRIPLAN_COLLOCATION_HPP_

#include <Eigen/Dense>

namespace triplan {

/// Legendre-Gauss-Radau collocation basis on the unit interval.
///
/// States are interpolated over d+1 points {0, tau_1, ..., tau_d} with
/// tau_d = 1; controls over the d collocation points {tau_1, ..., tau_d}.
struct CollocationBasis {
  int degree = 0;                 // d
  Eigen::VectorXd nodes;          // tau_1..tau_d, last entry exactly 1
  Eigen::VectorXd state_points;   // 0, tau_1..tau_d (size d+1)
  Eigen::MatrixXd diff;           // d x (d+1): xdot(tau_j) = sum_k diff(j-1,k) x_k
  Eigen::VectorXd quad_weights;   // d: integral_0^1 of Lagrange basis over nodes

  /// Builds a basis of the given degree (1 <= degree <= 9).
  static CollocationBasis radau(int degree);
};

/// Lagrange interpolation weights at tau over given points:
/// p(tau) = sum_k weight(k) * value_k.
Eigen::VectorXd lagrange_weights(const Eigen::VectorXd& points, double tau);

/// Converts values at interpolation points to monomial coefficients
/// c_0 + c_1 tau + ... (one column of values per sample point row-wise).
/// values: n_comp x n_points; returns n_comp x n_points coefficient matrix.
Eigen::MatrixXd values_to_monomial(const Eigen::VectorXd& points,
                                   const Eigen::MatrixXd& values);

}  // namespace triplan

#endif  // TRIPLAN_COLLOCATION_HPP_

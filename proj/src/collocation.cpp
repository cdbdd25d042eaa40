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

#include "triplan/collocation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace triplan {

namespace {

// P_d(x) - P_{d-1}(x); its roots in (-1, 1] are the Radau points with the
// right endpoint included.
double radau_poly(int d, double x) {
  double p_prev = 1.0;  // P_0
  double p = x;         // P_1
  if (d == 1) return p - p_prev;
  for (int k = 2; k <= d; ++k) {
    const double p_next = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k;
    p_prev = p;
    p = p_next;
  }
  return p - p_prev;
}

double radau_poly_deriv(int d, double x) {
  const double h = 1e-7;
  return (radau_poly(d, x + h) - radau_poly(d, x - h)) / (2.0 * h);
}

// Roots of the Radau polynomial strictly inside (-1, 1), found by scanning
// for sign changes and polishing with bisection + Newton.
std::vector<double> interior_roots(int d) {
  std::vector<double> roots;
  const int n_scan = 20000;
  const double hi = 1.0 - 1e-9;  // exclude the known root at x = 1
  double x_prev = -1.0;
  double f_prev = radau_poly(d, x_prev);
  for (int i = 1; i <= n_scan; ++i) {
    const double x = -1.0 + (hi + 1.0) * i / n_scan;
    const double f = radau_poly(d, x);
    if (f_prev == 0.0) {
      roots.push_back(x_prev);
    } else if (f_prev * f < 0.0) {
      double a = x_prev, b = x;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = radau_poly(d, m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (radau_poly(d, a) * fm < 0.0) {
          b = m;
        } else {
          a = m;
        }
      }
      double r = 0.5 * (a + b);
      for (int it = 0; it < 4; ++it) {
        const double fr = radau_poly(d, r);
        const double dfr = radau_poly_deriv(d, r);
        if (dfr == 0.0) break;
        r -= fr / dfr;
      }
      roots.push_back(r);
    }
    x_prev = x;
    f_prev = f;
  }
  return roots;
}

}  // namespace

CollocationBasis CollocationBasis::radau(int degree) {
  if (degree < 1 || degree > 9) {
    throw std::invalid_argument("collocation degree must be in [1, 9]");
  }
  CollocationBasis basis;
  basis.degree = degree;

  const std::vector<double> interior = interior_roots(degree);
  if (static_cast<int>(interior.size()) != degree - 1) {
    throw std::runtime_error("radau root search failed");
  }
  basis.nodes.resize(degree);
  for (int i = 0; i < degree - 1; ++i) {
    basis.nodes(i) = 0.5 * (interior[i] + 1.0);  // map [-1,1] -> [0,1]
  }
  basis.nodes(degree - 1) = 1.0;

  basis.state_points.resize(degree + 1);
  basis.state_points(0) = 0.0;
  basis.state_points.tail(degree) = basis.nodes;

  // Differentiation matrix via barycentric Lagrange derivatives.
  const int n = degree + 1;
  Eigen::VectorXd bary(n);
  for (int k = 0; k < n; ++k) {
    double w = 1.0;
    for (int m = 0; m < n; ++m) {
      if (m != k) w *= (basis.state_points(k) - basis.state_points(m));
    }
    bary(k) = 1.0 / w;
  }
  basis.diff.resize(degree, n);
  for (int j = 1; j <= degree; ++j) {
    double diag = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const double entry = (bary(k) / bary(j)) /
                           (basis.state_points(j) - basis.state_points(k));
      basis.diff(j - 1, k) = entry;
      diag -= entry;
    }
    basis.diff(j - 1, j) = diag;
  }

  // Quadrature weights from the moment equations
  // sum_j w_j tau_j^k = 1/(k+1), k = 0..d-1.
  Eigen::MatrixXd vm(degree, degree);
  Eigen::VectorXd rhs(degree);
  for (int k = 0; k < degree; ++k) {
    for (int j = 0; j < degree; ++j) {
      vm(k, j) = std::pow(basis.nodes(j), k);
    }
    rhs(k) = 1.0 / (k + 1);
  }
  basis.quad_weights = vm.fullPivLu().solve(rhs);
  return basis;
}

Eigen::VectorXd lagrange_weights(const Eigen::VectorXd& points, double tau) {
  const int n = static_cast<int>(points.size());
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) {
    double v = 1.0;
    for (int m = 0; m < n; ++m) {
      if (m != k) v *= (tau - points(m)) / (points(k) - points(m));
    }
    w(k) = v;
  }
  return w;
}

Eigen::MatrixXd values_to_monomial(const Eigen::VectorXd& points,
                                   const Eigen::MatrixXd& values) {
  const int n = static_cast<int>(points.size());
  Eigen::MatrixXd vm(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      vm(i, k) = std::pow(points(i), k);
    }
  }
  // Solve V * C^T = values^T for the coefficient rows.
  return vm.fullPivLu().solve(values.transpose()).transpose();
}

}  // namespace triplan

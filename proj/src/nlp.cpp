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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace triplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Filter line-search parameters.
constexpr double kGammaTheta = 1e-5;
constexpr double kGammaPhi = 1e-5;
constexpr double kDeltaSwitch = 1.0;
constexpr double kSTheta = 1.1;
constexpr double kSPhi = 2.3;
constexpr double kEtaPhi = 1e-8;
constexpr int kMaxBacktracks = 30;

// Barrier schedule.
constexpr double kKappaEps = 10.0;
constexpr double kKappaMu = 0.2;
constexpr double kThetaMu = 1.5;

constexpr double kKappaSigma = 1e10;  // bound-multiplier safeguard

std::uint64_t fnv1a(std::uint64_t h, const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

struct FilterEntry {
  double theta;
  double phi;
};

class IpmSolver {
 public:
  IpmSolver(const NlpProblem& p, const NlpOptions& opts)
      : p_(p), opts_(opts) {}

  SolveReport run(const Eigen::VectorXd& w0);
  void debug_dump() const;

 private:
  enum class RowKind { Equality, Inequality, Skip };

  void setup();
  void initialize(const Eigen::VectorXd& w0);
  bool evaluate(const Eigen::VectorXd& x, double* f, Eigen::VectorXd* resid,
                Eigen::VectorXd* c_raw) const;
  void eval_derivatives(const Eigen::VectorXd& x);
  double barrier(const Eigen::VectorXd& x, double f) const;
  Eigen::VectorXd barrier_gradient(const Eigen::VectorXd& x) const;
  double theta1(const Eigen::VectorXd& resid) const {
    return resid.size() ? resid.lpNorm<1>() : 0.0;
  }
  double theta_inf(const Eigen::VectorXd& resid) const {
    return resid.size() ? resid.lpNorm<Eigen::Infinity>() : 0.0;
  }
  void build_jacobian();  // from cached jvals_
  double dual_infeasibility() const;
  double complementarity(double mu) const;
  double scaled_error(double mu) const;
  bool solve_kkt(const Eigen::VectorXd& rhs_x, const Eigen::VectorXd& rhs_c,
                 Eigen::VectorXd* dx, Eigen::VectorXd* dlam);
  bool filter_acceptable(double theta, double phi) const;
  bool restore_feasibility();
  void estimate_multipliers();
  void update_bfgs(const Eigen::VectorXd& x_old,
                   const Eigen::VectorXd& grad_old_w,
                   const Eigen::VectorXd& jac_old_vals);
  SolveReport make_report(NlpStatus status) const;

  const NlpProblem& p_;
  NlpOptions opts_;

  int nw_ = 0;  // problem variables
  int ns_ = 0;  // slacks
  int n_ = 0;   // nw + ns
  int m_ = 0;   // active constraint rows

  std::vector<RowKind> row_kind_;
  std::vector<int> row_active_;   // original row -> active index or -1
  std::vector<int> row_slack_;    // original row -> slack x-index or -1
  std::vector<int> active_rows_;  // active index -> original row

  Eigen::VectorXd xl_, xu_;  // bounds over x = [w; s]
  std::vector<bool> has_lb_, has_ub_;
  Eigen::VectorXd cl_, cu_;  // original constraint bounds

  std::vector<std::pair<int, int>> jac_pattern_;  // problem (row, col)
  std::vector<std::pair<int, int>> hess_blocks_;
  std::vector<Eigen::MatrixXd> bfgs_;
  std::vector<bool> bfgs_initialized_;

  // Iterate state.
  Eigen::VectorXd x_, lam_, zl_, zu_;
  double f_ = 0.0;
  Eigen::VectorXd resid_, c_raw_;
  Eigen::VectorXd grad_;   // objective gradient over w
  Eigen::VectorXd jvals_;  // jacobian values aligned with jac_pattern_
  Eigen::SparseMatrix<double> A_;  // m_ x n_

  double mu_ = 0.1;
  double tau_ = 0.99;
  std::vector<FilterEntry> filter_;
  double theta_min_ = 0.0, theta_max_ = kInf;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt_;
  bool pattern_analyzed_ = false;
  double delta_w_last_ = 0.0;

  int iter_ = 0;
  std::uint64_t hash_ = 1469598103934665603ULL;
  int restorations_ = 0;
  int stall_resets_ = 0;
  bool nan_seen_ = false;
  double best_dual_seen_ = kInf;
  double best_theta_seen_ = kInf;
};

void IpmSolver::setup() {
  nw_ = p_.num_vars();
  const int m_all = p_.num_constraints();

  Eigen::VectorXd wl(nw_), wu(nw_);
  p_.var_bounds(wl, wu);
  cl_.resize(m_all);
  cu_.resize(m_all);
  p_.constraint_bounds(cl_, cu_);

  row_kind_.assign(m_all, RowKind::Skip);
  row_active_.assign(m_all, -1);
  row_slack_.assign(m_all, -1);
  ns_ = 0;
  for (int i = 0; i < m_all; ++i) {
    const bool lo = std::isfinite(cl_(i));
    const bool hi = std::isfinite(cu_(i));
    if (!lo && !hi) continue;
    if (lo && hi && cu_(i) - cl_(i) <= 0.0) {
      row_kind_[i] = RowKind::Equality;
    } else {
      row_kind_[i] = RowKind::Inequality;
      row_slack_[i] = nw_ + ns_;
      ++ns_;
    }
    row_active_[i] = static_cast<int>(active_rows_.size());
    active_rows_.push_back(i);
  }
  m_ = static_cast<int>(active_rows_.size());
  n_ = nw_ + ns_;

  xl_.resize(n_);
  xu_.resize(n_);
  xl_.head(nw_) = wl;
  xu_.head(nw_) = wu;
  for (int i = 0; i < m_all; ++i) {
    if (row_slack_[i] >= 0) {
      xl_(row_slack_[i]) = cl_(i);
      xu_(row_slack_[i]) = cu_(i);
    }
  }
  // Slight bound relaxation keeps the barrier benign when the optimum sits
  // exactly on a bound.
  has_lb_.assign(n_, false);
  has_ub_.assign(n_, false);
  for (int i = 0; i < n_; ++i) {
    if (std::isfinite(xl_(i))) {
      xl_(i) -= 1e-8 * std::max(1.0, std::abs(xl_(i)));
      has_lb_[i] = true;
    }
    if (std::isfinite(xu_(i))) {
      xu_(i) += 1e-8 * std::max(1.0, std::abs(xu_(i)));
      has_ub_[i] = true;
    }
  }

  jac_pattern_ = p_.jacobian_sparsity();
  hess_blocks_ = p_.hessian_blocks();
  bfgs_.clear();
  bfgs_initialized_.clear();
  for (const auto& [off, len] : hess_blocks_) {
    bfgs_.push_back(Eigen::MatrixXd::Identity(len, len));
    bfgs_initialized_.push_back(false);
  }
}

void IpmSolver::initialize(const Eigen::VectorXd& w0) {
  x_.resize(n_);
  x_.head(nw_) = w0;

  Eigen::VectorXd c0(p_.num_constraints());
  p_.constraints(x_.head(nw_), c0);
  for (int i = 0; i < p_.num_constraints(); ++i) {
    if (row_slack_[i] >= 0) x_(row_slack_[i]) = c0(i);
  }

  // Push into the strict interior.
  const double k1 = 1e-2, k2 = 1e-2;
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i] && has_ub_[i]) {
      const double gap = xu_(i) - xl_(i);
      const double pl = std::min(k1 * std::max(1.0, std::abs(xl_(i))),
                                 k2 * gap);
      const double pu = std::min(k1 * std::max(1.0, std::abs(xu_(i))),
                                 k2 * gap);
      x_(i) = std::clamp(x_(i), xl_(i) + pl, xu_(i) - pu);
    } else if (has_lb_[i]) {
      x_(i) = std::max(x_(i), xl_(i) + k1 * std::max(1.0, std::abs(xl_(i))));
    } else if (has_ub_[i]) {
      x_(i) = std::min(x_(i), xu_(i) - k1 * std::max(1.0, std::abs(xu_(i))));
    }
  }

  lam_ = Eigen::VectorXd::Zero(m_);
  zl_ = Eigen::VectorXd::Zero(n_);
  zu_ = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i]) zl_(i) = 1.0;
    if (has_ub_[i]) zu_(i) = 1.0;
  }

  mu_ = opts_.mu_init;
  tau_ = std::max(0.99, 1.0 - mu_);
}

bool IpmSolver::evaluate(const Eigen::VectorXd& x, double* f,
                         Eigen::VectorXd* resid,
                         Eigen::VectorXd* c_raw) const {
  const Eigen::VectorXd w = x.head(nw_);
  const double fv = p_.objective(w);
  Eigen::VectorXd c(p_.num_constraints());
  p_.constraints(w, c);
  if (!std::isfinite(fv) || !c.allFinite()) return false;
  *f = fv;
  if (c_raw) *c_raw = c;
  resid->resize(m_);
  for (int k = 0; k < m_; ++k) {
    const int i = active_rows_[k];
    if (row_kind_[i] == RowKind::Equality) {
      (*resid)(k) = c(i) - cl_(i);
    } else {
      (*resid)(k) = c(i) - x(row_slack_[i]);
    }
  }
  return true;
}

void IpmSolver::eval_derivatives(const Eigen::VectorXd& x) {
  grad_.resize(nw_);
  p_.objective_gradient(x.head(nw_), grad_);
  jvals_.resize(static_cast<int>(jac_pattern_.size()));
  p_.jacobian_values(x.head(nw_), jvals_);
  build_jacobian();
}

void IpmSolver::build_jacobian() {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(jac_pattern_.size() + ns_);
  for (size_t e = 0; e < jac_pattern_.size(); ++e) {
    const auto [row, col] = jac_pattern_[e];
    const int k = row_active_[row];
    if (k < 0) continue;
    trips.emplace_back(k, col, jvals_(static_cast<int>(e)));
  }
  for (int i = 0; i < p_.num_constraints(); ++i) {
    if (row_slack_[i] >= 0) {
      trips.emplace_back(row_active_[i], row_slack_[i], -1.0);
    }
  }
  A_.resize(m_, n_);
  A_.setFromTriplets(trips.begin(), trips.end());
}

double IpmSolver::barrier(const Eigen::VectorXd& x, double f) const {
  double b = f;
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i]) {
      const double g = x(i) - xl_(i);
      if (g <= 0.0) return kInf;
      b -= mu_ * std::log(g);
    }
    if (has_ub_[i]) {
      const double g = xu_(i) - x(i);
      if (g <= 0.0) return kInf;
      b -= mu_ * std::log(g);
    }
  }
  return b;
}

Eigen::VectorXd IpmSolver::barrier_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n_);
  g.head(nw_) = grad_;
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i]) g(i) -= mu_ / (x(i) - xl_(i));
    if (has_ub_[i]) g(i) += mu_ / (xu_(i) - x(i));
  }
  return g;
}

double IpmSolver::dual_infeasibility() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
  d.head(nw_) = grad_;
  d.noalias() += A_.transpose() * lam_;
  d -= zl_;
  d += zu_;
  return d.size() ? d.lpNorm<Eigen::Infinity>() : 0.0;
}

double IpmSolver::complementarity(double mu) const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i]) {
      worst = std::max(worst, std::abs((x_(i) - xl_(i)) * zl_(i) - mu));
    }
    if (has_ub_[i]) {
      worst = std::max(worst, std::abs((xu_(i) - x_(i)) * zu_(i) - mu));
    }
  }
  return worst;
}

double IpmSolver::scaled_error(double mu) const {
  const double s_max = 100.0;
  double z_sum = 0.0;
  int z_count = 0;
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i]) {
      z_sum += std::abs(zl_(i));
      ++z_count;
    }
    if (has_ub_[i]) {
      z_sum += std::abs(zu_(i));
      ++z_count;
    }
  }
  const double lam_sum = m_ ? lam_.lpNorm<1>() : 0.0;
  const double denom_d = std::max(1, m_ + z_count);
  const double s_d = std::max(s_max, (lam_sum + z_sum) / denom_d) / s_max;
  const double s_c =
      z_count ? std::max(s_max, z_sum / z_count) / s_max : 1.0;
  return std::max({dual_infeasibility() / s_d, theta_inf(resid_),
                   complementarity(mu) / s_c});
}

bool IpmSolver::solve_kkt(const Eigen::VectorXd& rhs_x,
                          const Eigen::VectorXd& rhs_c, Eigen::VectorXd* dx,
                          Eigen::VectorXd* dlam) {
  const int dim = n_ + m_;

  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i]) sigma(i) += zl_(i) / (x_(i) - xl_(i));
    if (has_ub_[i]) sigma(i) += zu_(i) / (xu_(i) - x_(i));
  }

  // Dependent-but-consistent constraint rows need a visible dual
  // regularization before any primal one; otherwise the inertia test reads
  // roundoff-sign pivots and inflates delta_w until the step dies.
  double delta_w = 0.0;
  double delta_c = 1e-8;
  for (int attempt = 0; attempt < 40; ++attempt) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(jac_pattern_.size() + 4 * n_ + m_ + 512);
    for (int i = 0; i < n_; ++i) {
      trips.emplace_back(i, i, sigma(i) + delta_w);
    }
    for (size_t bi = 0; bi < hess_blocks_.size(); ++bi) {
      const auto [off, len] = hess_blocks_[bi];
      const Eigen::MatrixXd& B = bfgs_[bi];
      for (int r = 0; r < len; ++r) {
        for (int c = 0; c <= r; ++c) {
          trips.emplace_back(off + r, off + c, B(r, c));
        }
      }
    }
    for (int k = 0; k < A_.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A_, k); it; ++it) {
        trips.emplace_back(n_ + static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
      }
    }
    for (int k = 0; k < m_; ++k) {
      trips.emplace_back(n_ + k, n_ + k, -delta_c);
    }
    Eigen::SparseMatrix<double> K(dim, dim);
    K.setFromTriplets(trips.begin(), trips.end());

    if (!pattern_analyzed_) {
      ldlt_.analyzePattern(K);
      pattern_analyzed_ = true;
    }
    ldlt_.factorize(K);
    bool ok = (ldlt_.info() == Eigen::Success);
    if (ok) {
      const auto& D = ldlt_.vectorD();
      int pos = 0, neg = 0, zero = 0;
      for (int i = 0; i < D.size(); ++i) {
        if (D(i) > 0.0) {
          ++pos;
        } else if (D(i) < 0.0) {
          ++neg;
        } else {
          ++zero;
        }
      }
      ok = (zero == 0 && pos == n_ && neg == m_);
    }
    if (ok) {
      Eigen::VectorXd rhs(dim);
      rhs.head(n_) = rhs_x;
      rhs.tail(m_) = rhs_c;
      const Eigen::VectorXd sol = ldlt_.solve(rhs);
      if (sol.allFinite()) {
        *dx = sol.head(n_);
        *dlam = sol.tail(m_);
        delta_w_last_ = delta_w;
        return true;
      }
    }
    if (opts_.verbose) {
      const auto& D = ldlt_.vectorD();
      int pos = 0, neg = 0, zero = 0;
      for (int i = 0; i < D.size(); ++i) {
        if (D(i) > 0.0) ++pos;
        else if (D(i) < 0.0) ++neg;
        else ++zero;
      }
      std::cout << "kkt attempt " << attempt << " dw=" << delta_w
                << " dc=" << delta_c << " info=" << int(ldlt_.info())
                << " pos=" << pos << "/" << n_ << " neg=" << neg << "/" << m_
                << " zero=" << zero << "\n";
    }
    if (attempt == 0) {
      delta_c = 1e-6;  // second try: stronger dual regularization only
    } else {
      delta_w = (delta_w == 0.0)
                    ? std::max(1e-20, (delta_w_last_ == 0.0)
                                          ? 1e-4
                                          : delta_w_last_ / 3.0)
                    : delta_w * 8.0;
      if (delta_w > 1e12) break;
    }
  }
  return false;
}

bool IpmSolver::filter_acceptable(double theta, double phi) const {
  if (theta >= theta_max_) return false;
  // Once the iterates have been nearly feasible, do not wander far back.
  const double cap =
      std::max(1e4 * best_theta_seen_, 10.0 * opts_.feas_tol);
  if (theta > cap) return false;
  for (const FilterEntry& e : filter_) {
    const bool improves_theta = theta <= (1.0 - kGammaTheta) * e.theta;
    const bool improves_phi = phi <= e.phi - kGammaPhi * e.theta;
    if (!improves_theta && !improves_phi) return false;
  }
  return true;
}

// Least-squares multipliers minimizing the dual residual at the current
// point; used at startup and after restoration jumps.
void IpmSolver::estimate_multipliers() {
  if (m_ == 0) return;
  Eigen::VectorXd dual_rhs = Eigen::VectorXd::Zero(n_);
  dual_rhs.head(nw_) = grad_;
  dual_rhs -= zl_;
  dual_rhs += zu_;
  Eigen::SparseMatrix<double> aat(m_, m_);
  aat = Eigen::SparseMatrix<double>(A_ * A_.transpose());
  for (int i = 0; i < m_; ++i) aat.coeffRef(i, i) += 1e-8;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(aat);
  if (chol.info() != Eigen::Success) return;
  const Eigen::VectorXd lam = chol.solve(-(A_ * dual_rhs));
  if (lam.allFinite() && lam.lpNorm<Eigen::Infinity>() < 1e8) lam_ = lam;
}

// Levenberg-Marquardt descent on 0.5 * ||resid||^2 used as a simple
// feasibility restoration. Near-feasible entries act as soft resets (fresh
// multipliers, curvature, filter) and do not count against the cap.
bool IpmSolver::restore_feasibility() {
  const double theta_enter = theta_inf(resid_);
  if (theta_enter > 10.0 * opts_.feas_tol) ++restorations_;
  double rho = 1e-3;
  for (int k = 0; k < 25; ++k) {
    eval_derivatives(x_);
    const Eigen::VectorXd g = A_.transpose() * resid_;
    Eigen::SparseMatrix<double> AtA(n_, n_);
    AtA = Eigen::SparseMatrix<double>(A_.transpose() * A_);
    for (int i = 0; i < n_; ++i) AtA.coeffRef(i, i) += rho;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(AtA);
    if (chol.info() != Eigen::Success) {
      rho *= 10.0;
      continue;
    }
    Eigen::VectorXd step = chol.solve(-g);
    Eigen::VectorXd x_try = x_ + step;
    for (int i = 0; i < n_; ++i) {
      // Keep a real interior margin; grazing the bounds here stalls the
      // barrier iteration afterwards.
      if (has_lb_[i] && has_ub_[i]) {
        const double pad = 1e-3 * (xu_(i) - xl_(i));
        x_try(i) = std::clamp(x_try(i), xl_(i) + pad, xu_(i) - pad);
      } else if (has_lb_[i]) {
        x_try(i) = std::max(x_try(i),
                            xl_(i) + 1e-3 * std::max(1.0, std::abs(xl_(i))));
      } else if (has_ub_[i]) {
        x_try(i) = std::min(x_try(i),
                            xu_(i) - 1e-3 * std::max(1.0, std::abs(xu_(i))));
      }
    }
    double f_try;
    Eigen::VectorXd resid_try, craw_try;
    if (!evaluate(x_try, &f_try, &resid_try, &craw_try)) {
      rho *= 10.0;
      continue;
    }
    if (theta_inf(resid_try) <= 0.95 * theta_inf(resid_)) {
      x_ = x_try;
      f_ = f_try;
      resid_ = resid_try;
      c_raw_ = craw_try;
      rho = std::max(rho / 3.0, 1e-10);
      if (theta_inf(resid_) <=
          std::max(0.01 * theta_enter, 0.5 * opts_.feas_tol)) {
        break;
      }
    } else {
      rho *= 6.0;
      if (rho > 1e10) break;
    }
  }
  eval_derivatives(x_);
  filter_.clear();
  // Re-seed bound multipliers consistently with the barrier at the new point
  // and drop stale curvature accumulated before the jump.
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i]) {
      zl_(i) = std::clamp(mu_ / (x_(i) - xl_(i)), 1e-8, 1e8);
    }
    if (has_ub_[i]) {
      zu_(i) = std::clamp(mu_ / (xu_(i) - x_(i)), 1e-8, 1e8);
    }
  }
  for (size_t bi = 0; bi < bfgs_.size(); ++bi) {
    bfgs_[bi].setIdentity();
    bfgs_initialized_[bi] = false;
  }
  estimate_multipliers();
  return theta_inf(resid_) < 0.5 * theta_enter ||
         theta_inf(resid_) <= 10.0 * opts_.feas_tol;
}

void IpmSolver::update_bfgs(const Eigen::VectorXd& x_old,
                            const Eigen::VectorXd& grad_old_w,
                            const Eigen::VectorXd& jac_old_vals) {
  // Lagrangian gradients wrt w at old/new points, both with the new lam.
  Eigen::VectorXd gl_new = Eigen::VectorXd::Zero(nw_);
  gl_new = grad_;
  Eigen::VectorXd gl_old = grad_old_w;
  for (size_t e = 0; e < jac_pattern_.size(); ++e) {
    const auto [row, col] = jac_pattern_[e];
    const int k = row_active_[row];
    if (k < 0) continue;
    gl_new(col) += jvals_(static_cast<int>(e)) * lam_(k);
    gl_old(col) += jac_old_vals(static_cast<int>(e)) * lam_(k);
  }

  for (size_t bi = 0; bi < hess_blocks_.size(); ++bi) {
    const auto [off, len] = hess_blocks_[bi];
    const Eigen::VectorXd s = x_.segment(off, len) - x_old.segment(off, len);
    Eigen::VectorXd y = gl_new.segment(off, len) - gl_old.segment(off, len);
    const double s_norm = s.norm();
    if (s_norm < 1e-13 * (1.0 + x_.segment(off, len).norm())) continue;

    Eigen::MatrixXd& B = bfgs_[bi];
    if (!bfgs_initialized_[bi]) {
      const double sy = s.dot(y);
      if (sy > 1e-12) {
        const double scale = y.squaredNorm() / sy;
        if (std::isfinite(scale) && scale > 1e-8 && scale < 1e8) {
          B = scale * Eigen::MatrixXd::Identity(len, len);
        }
      }
      bfgs_initialized_[bi] = true;
    }

    const Eigen::VectorXd Bs = B * s;
    const double sBs = s.dot(Bs);
    if (sBs <= 0.0 || !std::isfinite(sBs)) continue;
    double sy = s.dot(y);
    if (sy < 0.2 * sBs) {
      const double theta = 0.8 * sBs / (sBs - sy);
      y = theta * y + (1.0 - theta) * Bs;
      sy = s.dot(y);
    }
    if (sy <= 1e-16 * sBs) continue;
    B -= (Bs * Bs.transpose()) / sBs;
    B += (y * y.transpose()) / sy;
    // Accumulated updates can degrade numerically; a poisoned block defeats
    // the inertia correction, so flush it.
    if (!B.allFinite() || B.cwiseAbs().maxCoeff() > 1e8) {
      B.setIdentity();
      bfgs_initialized_[bi] = false;
    }
  }
}

SolveReport IpmSolver::make_report(NlpStatus status) const {
  SolveReport rep;
  rep.status = status;
  rep.objective = f_;
  rep.primal = x_.head(nw_);
  rep.constraint_violation = theta_inf(resid_);
  const double s_max = 100.0;
  double z_sum = 0.0;
  int z_count = 0;
  for (int i = 0; i < n_; ++i) {
    if (has_lb_[i]) {
      z_sum += std::abs(zl_(i));
      ++z_count;
    }
    if (has_ub_[i]) {
      z_sum += std::abs(zu_(i));
      ++z_count;
    }
  }
  const double lam_sum = m_ ? lam_.lpNorm<1>() : 0.0;
  const double s_d =
      std::max(s_max, (lam_sum + z_sum) / std::max(1, m_ + z_count)) / s_max;
  rep.kkt_residual = dual_infeasibility() / s_d;
  rep.iterations = iter_;
  rep.iterate_hash = hash_;
  return rep;
}

SolveReport IpmSolver::run(const Eigen::VectorXd& w0) {
  const auto t_start = std::chrono::steady_clock::now();
  auto finish = [&](NlpStatus st) {
    if (opts_.verbose) debug_dump();
    SolveReport rep = make_report(st);
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return rep;
  };

  setup();
  initialize(w0);

  if (!evaluate(x_, &f_, &resid_, &c_raw_)) {
    resid_ = Eigen::VectorXd::Zero(m_);
    return finish(NlpStatus::Diverged);
  }
  eval_derivatives(x_);
  estimate_multipliers();

  theta_min_ = 1e-4 * std::max(1.0, theta1(resid_));
  theta_max_ = 1e4 * std::max(1.0, theta1(resid_));

  for (iter_ = 0; iter_ < opts_.max_iter; ++iter_) {
    best_theta_seen_ = std::min(best_theta_seen_, theta1(resid_));
    // Convergence test for the original problem.
    if (scaled_error(0.0) <= opts_.opt_tol &&
        theta_inf(resid_) <= opts_.feas_tol) {
      return finish(NlpStatus::Optimal);
    }

    // Barrier parameter update.
    const double mu_final = std::min(opts_.opt_tol / 10.0, 1e-6);
    while (mu_ > mu_final && scaled_error(mu_) <= kKappaEps * mu_) {
      mu_ = std::max(mu_final, std::min(kKappaMu * mu_, std::pow(mu_, kThetaMu)));
      tau_ = std::max(0.99, 1.0 - mu_);
      filter_.clear();
    }

    // Search direction.
    const Eigen::VectorXd grad_phi = barrier_gradient(x_);
    Eigen::VectorXd rhs_x = -(grad_phi + A_.transpose() * lam_);
    Eigen::VectorXd rhs_c = -resid_;
    Eigen::VectorXd dx, dlam;
    if (!solve_kkt(rhs_x, rhs_c, &dx, &dlam)) {
      return finish(NlpStatus::Diverged);
    }

    // Bound-multiplier directions.
    Eigen::VectorXd dzl = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd dzu = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < n_; ++i) {
      if (has_lb_[i]) {
        dzl(i) = mu_ / (x_(i) - xl_(i)) - zl_(i) -
                 zl_(i) / (x_(i) - xl_(i)) * dx(i);
      }
      if (has_ub_[i]) {
        dzu(i) = mu_ / (xu_(i) - x_(i)) - zu_(i) +
                 zu_(i) / (xu_(i) - x_(i)) * dx(i);
      }
    }

    // Fraction-to-boundary limits.
    double alpha_max = 1.0;
    for (int i = 0; i < n_; ++i) {
      if (has_lb_[i] && dx(i) < 0.0) {
        alpha_max =
            std::min(alpha_max, -tau_ * (x_(i) - xl_(i)) / dx(i));
      }
      if (has_ub_[i] && dx(i) > 0.0) {
        alpha_max = std::min(alpha_max, tau_ * (xu_(i) - x_(i)) / dx(i));
      }
    }
    double alpha_z = 1.0;
    for (int i = 0; i < n_; ++i) {
      if (has_lb_[i] && dzl(i) < 0.0) {
        alpha_z = std::min(alpha_z, -tau_ * zl_(i) / dzl(i));
      }
      if (has_ub_[i] && dzu(i) < 0.0) {
        alpha_z = std::min(alpha_z, -tau_ * zu_(i) / dzu(i));
      }
    }

    // Filter line search with one second-order correction attempt.
    const double theta_cur = theta1(resid_);
    const double phi_cur = barrier(x_, f_);
    const double m_dir = grad_phi.dot(dx);

    auto acceptable = [&](double theta_try, double phi_try, double alpha_try,
                          bool* f_type) {
      if (!filter_acceptable(theta_try, phi_try)) return false;
      const bool switching =
          m_dir < 0.0 && alpha_try * std::pow(-m_dir, kSPhi) >
                             kDeltaSwitch * std::pow(theta_cur, kSTheta);
      if (switching && theta_cur <= theta_min_) {
        if (phi_try <= phi_cur + kEtaPhi * alpha_try * m_dir) {
          *f_type = true;
          return true;
        }
        return false;
      }
      return theta_try <= (1.0 - kGammaTheta) * theta_cur ||
             phi_try <= phi_cur - kGammaPhi * theta_cur;
    };

    double alpha = alpha_max;
    bool accepted = false;
    bool f_type_step = false;
    double f_new = 0.0;
    Eigen::VectorXd x_new, resid_new, craw_new;
    bool nan_in_search = false;
    bool soc_tried = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      x_new = x_ + alpha * dx;
      double f_try;
      Eigen::VectorXd resid_try, craw_try;
      if (!evaluate(x_new, &f_try, &resid_try, &craw_try)) {
        nan_in_search = true;
        alpha *= 0.5;
        continue;
      }
      double theta_try = theta1(resid_try);
      const double phi_try = barrier(x_new, f_try);
      if (std::isfinite(phi_try) &&
          acceptable(theta_try, phi_try, alpha, &f_type_step)) {
        accepted = true;
      }

      // Second-order correction: re-center the constraints after the first
      // rejected full step that increased the violation.
      if (!accepted && !soc_tried && bt == 0 && theta_try >= theta_cur &&
          std::isfinite(phi_try)) {
        soc_tried = true;
        const Eigen::VectorXd c_soc = alpha * resid_ + resid_try;
        Eigen::VectorXd dx_soc, dlam_soc;
        if (solve_kkt(rhs_x, -c_soc, &dx_soc, &dlam_soc)) {
          Eigen::VectorXd step = alpha * dx + dx_soc;
          double beta = 1.0;
          for (int i = 0; i < n_; ++i) {
            if (has_lb_[i] && step(i) < 0.0) {
              beta = std::min(beta, -tau_ * (x_(i) - xl_(i)) / step(i));
            }
            if (has_ub_[i] && step(i) > 0.0) {
              beta = std::min(beta, tau_ * (xu_(i) - x_(i)) / step(i));
            }
          }
          const Eigen::VectorXd x_soc = x_ + beta * step;
          double f_soc;
          Eigen::VectorXd resid_soc, craw_soc;
          if (evaluate(x_soc, &f_soc, &resid_soc, &craw_soc)) {
            const double theta_s = theta1(resid_soc);
            const double phi_s = barrier(x_soc, f_soc);
            bool f_type_soc = false;
            if (std::isfinite(phi_s) &&
                acceptable(theta_s, phi_s, alpha, &f_type_soc)) {
              accepted = true;
              f_type_step = f_type_soc;
              x_new = x_soc;
              f_try = f_soc;
              resid_try = resid_soc;
              craw_try = craw_soc;
            }
          }
        }
      }

      if (accepted) {
        f_new = f_try;
        resid_new = resid_try;
        craw_new = craw_try;
        break;
      }
      alpha *= 0.5;
    }

    if (!accepted) {
      if (nan_in_search) {
        nan_seen_ = true;
        return finish(NlpStatus::Diverged);
      }
      // A stall with a near-feasible iterate is lack of progress, not
      // infeasibility; only a stuck restoration with a clearly violated
      // constraint certifies the latter.
      const double infeas_tol = std::max(100.0 * opts_.feas_tol, 1e-8);
      ++stall_resets_;
      if (restorations_ >= 5 || stall_resets_ >= 25) {
        return finish(theta_inf(resid_) > infeas_tol ? NlpStatus::Infeasible
                                                     : NlpStatus::MaxIter);
      }
      if (!restore_feasibility()) {
        return finish(theta_inf(resid_) > infeas_tol ? NlpStatus::Infeasible
                                                     : NlpStatus::MaxIter);
      }
      continue;
    }

    if (!f_type_step) {
      filter_.push_back({(1.0 - kGammaTheta) * theta_cur,
                         phi_cur - kGammaPhi * theta_cur});
    }

    // Commit the step.
    const Eigen::VectorXd x_old = x_;
    const Eigen::VectorXd grad_old = grad_;
    const Eigen::VectorXd jvals_old = jvals_;
    x_ = x_new;
    f_ = f_new;
    resid_ = resid_new;
    c_raw_ = craw_new;
    lam_ += alpha * dlam;
    zl_ += alpha_z * dzl;
    zu_ += alpha_z * dzu;
    for (int i = 0; i < n_; ++i) {
      if (has_lb_[i]) {
        const double gap = x_(i) - xl_(i);
        zl_(i) = std::clamp(zl_(i), mu_ / (kKappaSigma * gap),
                            kKappaSigma * mu_ / gap);
      }
      if (has_ub_[i]) {
        const double gap = xu_(i) - x_(i);
        zu_(i) = std::clamp(zu_(i), mu_ / (kKappaSigma * gap),
                            kKappaSigma * mu_ / gap);
      }
    }

    eval_derivatives(x_);
    update_bfgs(x_old, grad_old, jvals_old);
    hash_ = fnv1a(hash_, x_.data(), sizeof(double) * x_.size());

    // Heal multiplier drift along near-dependent constraint rows: when the
    // dual residual has deteriorated well past its best, replace lambda by
    // its regularized least-squares estimate.
    const double dual_now = dual_infeasibility();
    best_dual_seen_ = std::min(best_dual_seen_, dual_now);
    if (iter_ > 5 && dual_now > 10.0 * std::max(best_dual_seen_, 1.0)) {
      estimate_multipliers();
      best_dual_seen_ = dual_infeasibility();
    }

    if (opts_.verbose) {
      std::cout << "iter " << iter_ << " f=" << f_
                << " theta=" << theta_inf(resid_) << " mu=" << mu_
                << " alpha=" << alpha << " amax=" << alpha_max
                << " dual=" << dual_infeasibility()
                << " comp=" << complementarity(mu_) << " dw=" << delta_w_last_
                << "\n";
    }
  }
  return finish(NlpStatus::MaxIter);
}

void IpmSolver::debug_dump() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
  d.head(nw_) = grad_;
  d.noalias() += A_.transpose() * lam_;
  d -= zl_;
  d += zu_;
  std::cout << "top |lambda| rows:";
  std::vector<int> idx(m_);
  for (int i = 0; i < m_; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(lam_(a)) > std::abs(lam_(b));
  });
  for (int k = 0; k < std::min(6, m_); ++k) {
    std::cout << " (row " << active_rows_[idx[k]] << " lam=" << lam_(idx[k])
              << " r=" << resid_(idx[k]) << ")";
  }
  std::cout << "\ntop |resid| rows:";
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(resid_(a)) > std::abs(resid_(b));
  });
  for (int k = 0; k < std::min(6, m_); ++k) {
    std::cout << " (row " << active_rows_[idx[k]] << " r=" << resid_(idx[k])
              << ")";
  }
  std::cout << "\ntop dual-inf vars:";
  std::vector<int> vdx(n_);
  for (int i = 0; i < n_; ++i) vdx[i] = i;
  std::sort(vdx.begin(), vdx.end(), [&](int a, int b) {
    return std::abs(d(a)) > std::abs(d(b));
  });
  for (int k = 0; k < std::min(6, n_); ++k) {
    std::cout << " (x" << vdx[k] << " d=" << d(vdx[k]) << " x=" << x_(vdx[k])
              << ")";
  }
  std::cout << "\n";
}

}  // namespace

SolveReport solve(const NlpProblem& problem, const Eigen::VectorXd& w0,
                  const NlpOptions& options) {
  IpmSolver solver(problem, options);
  return solver.run(w0);
}

double check_derivatives(const NlpProblem& problem, const Eigen::VectorXd& w) {
  const int n = problem.num_vars();
  const int m = problem.num_constraints();

  Eigen::VectorXd grad(n);
  problem.objective_gradient(w, grad);
  const auto& pattern = problem.jacobian_sparsity();
  Eigen::VectorXd jvals(static_cast<int>(pattern.size()));
  problem.jacobian_values(w, jvals);

  Eigen::MatrixXd jac_dense = Eigen::MatrixXd::Zero(m, n);
  for (size_t e = 0; e < pattern.size(); ++e) {
    jac_dense(pattern[e].first, pattern[e].second) +=
        jvals(static_cast<int>(e));
  }

  double max_err = 0.0;
  Eigen::VectorXd wp = w;
  Eigen::VectorXd c_plus(m), c_minus(m);
  for (int i = 0; i < n; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(w(i)));
    wp(i) = w(i) + h;
    const double f_plus = problem.objective(wp);
    problem.constraints(wp, c_plus);
    wp(i) = w(i) - h;
    const double f_minus = problem.objective(wp);
    problem.constraints(wp, c_minus);
    wp(i) = w(i);

    const double g_fd = (f_plus - f_minus) / (2.0 * h);
    max_err = std::max(max_err, std::abs(g_fd - grad(i)) /
                                    std::max({1.0, std::abs(g_fd),
                                              std::abs(grad(i))}));
    for (int r = 0; r < m; ++r) {
      const double j_fd = (c_plus(r) - c_minus(r)) / (2.0 * h);
      max_err = std::max(max_err, std::abs(j_fd - jac_dense(r, i)) /
                                      std::max({1.0, std::abs(j_fd),
                                                std::abs(jac_dense(r, i))}));
    }
  }
  return max_err;
}

const char* to_string(NlpStatus status) {
  switch (status) {
    case NlpStatus::Optimal:
      return "Optimal";
    case NlpStatus::MaxIter:
      return "MaxIter";
    case NlpStatus::Infeasible:
      return "Infeasible";
    case NlpStatus::Diverged:
      return "Diverged";
  }
  return "Unknown";
}

}  // namespace triplan

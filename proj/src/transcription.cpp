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

#include "triplan/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace triplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMembershipTol = 1e-9;

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

Eigen::VectorXd eval_poly(const Eigen::MatrixXd& coef, double tau) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coef.rows());
  for (int k = static_cast<int>(coef.cols()) - 1; k >= 0; --k) {
    out = out * tau + coef.col(k);
  }
  return out;
}

Eigen::VectorXd eval_poly_derivative(const Eigen::MatrixXd& coef, double tau,
                                     int order) {
  const int n = static_cast<int>(coef.cols());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coef.rows());
  for (int k = n - 1; k >= order; --k) {
    double factor = 1.0;
    for (int o = 0; o < order; ++o) factor *= (k - o);
    out = out * tau + factor * coef.col(k);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SequenceGeometry / BoundaryState

SequenceGeometry make_sequence_geometry(const Triangulation& t,
                                        const std::vector<int>& sequence) {
  if (sequence.empty()) {
    throw StructuralError("empty triangle sequence");
  }
  SequenceGeometry g;
  for (const int id : sequence) {
    if (id < 0 || id >= static_cast<int>(t.triangles.size())) {
      throw StructuralError("triangle id out of range");
    }
    CorridorTriangle ct;
    ct.id = id;
    ct.tri = t.triangle(id);
    ct.frame = local_frame(ct.tri);
    ct.halfspaces = halfspaces_of(ct.tri);
    g.triangles.push_back(std::move(ct));
  }
  for (size_t s = 0; s + 1 < sequence.size(); ++s) {
    const auto& a = t.triangles[sequence[s]];
    const auto& b = t.triangles[sequence[s + 1]];
    std::vector<int> shared;
    for (const int v : a) {
      if (std::count(b.begin(), b.end(), v)) shared.push_back(v);
    }
    if (shared.size() != 2) {
      std::ostringstream os;
      os << "triangles " << sequence[s] << " and " << sequence[s + 1]
         << " are not edge-adjacent";
      throw StructuralError(os.str());
    }
    g.shared_edges.push_back({t.vertices[shared[0]], t.vertices[shared[1]]});
  }
  return g;
}

BoundaryState BoundaryState::all(const Eigen::VectorXd& x) {
  BoundaryState b;
  b.value = x;
  b.pinned.assign(x.size(), 1);
  return b;
}

BoundaryState BoundaryState::position(const DynamicsModel& model,
                                      const Point2& p) {
  BoundaryState b;
  b.value = Eigen::VectorXd::Zero(model.state_dim());
  b.value(0) = p.x;
  b.value(1) = p.y;
  b.pinned.assign(model.state_dim(), 0);
  b.pinned[0] = 1;
  b.pinned[1] = 1;
  // Velocities rest at zero; orientation stays free.
  if (model.state_dim() == 3) {
    // Heading free for the planar car.
  } else if (model.state_dim() == 7) {
    b.value(2) = 1.0;  // placeholder orientation, unpinned
    for (int c = 4; c < 7; ++c) b.pinned[c] = 1;
  }
  return b;
}

// ---------------------------------------------------------------------------
// TrajectorySpline

double TrajectorySpline::total_time() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

int TrajectorySpline::find_segment(double t, double* tau) const {
  double start = t0;
  for (size_t s = 0; s < segments.size(); ++s) {
    const double end = start + segments[s].duration;
    if (t <= end || s + 1 == segments.size()) {
      *tau = std::clamp((t - start) / segments[s].duration, 0.0, 1.0);
      return static_cast<int>(s);
    }
    start = end;
  }
  *tau = 0.0;
  return 0;
}

Eigen::VectorXd TrajectorySpline::state(double t) const {
  double tau;
  const int s = find_segment(t, &tau);
  return eval_poly(segments[s].state_coef, tau);
}

Eigen::VectorXd TrajectorySpline::control(double t) const {
  double tau;
  const int s = find_segment(t, &tau);
  return eval_poly(segments[s].control_coef, tau);
}

Eigen::VectorXd TrajectorySpline::state_derivative(double t, int order) const {
  double tau;
  const int s = find_segment(t, &tau);
  const double rate = 1.0 / segments[s].duration;
  return eval_poly_derivative(segments[s].state_coef, tau, order) *
         std::pow(rate, order);
}

double TrajectorySpline::max_continuity_gap() const {
  double gap = 0.0;
  for (size_t s = 0; s + 1 < segments.size(); ++s) {
    const Eigen::VectorXd end = eval_poly(segments[s].state_coef, 1.0);
    const Eigen::VectorXd next = eval_poly(segments[s + 1].state_coef, 0.0);
    gap = std::max(gap, (end - next).lpNorm<Eigen::Infinity>());
  }
  return gap;
}

std::vector<TrajectorySample> sample(const TrajectorySpline& spline, int n) {
  if (n < 2) throw StructuralError("need at least 2 samples per segment");
  std::vector<TrajectorySample> out;
  double start = spline.t0;
  for (size_t s = 0; s < spline.segments.size(); ++s) {
    const auto& seg = spline.segments[s];
    for (int j = (s == 0) ? 0 : 1; j < n; ++j) {
      const double tau = static_cast<double>(j) / (n - 1);
      TrajectorySample smp;
      smp.t = start + tau * seg.duration;
      smp.state = eval_poly(seg.state_coef, tau);
      smp.control = eval_poly(seg.control_coef, tau);
      out.push_back(std::move(smp));
    }
    start += seg.duration;
  }
  return out;
}

double membership_audit(const TrajectorySpline& spline,
                        const SequenceGeometry& geometry,
                        int samples_per_segment) {
  double worst = 0.0;
  for (size_t s = 0; s < spline.segments.size(); ++s) {
    const auto& hs = geometry.triangles[s].halfspaces;
    Eigen::Matrix<double, 3, 2> a_unit = hs.A;
    Eigen::Vector3d b_unit = hs.b;
    for (int r = 0; r < 3; ++r) {
      const double n = hs.A.row(r).norm();
      a_unit.row(r) /= n;
      b_unit(r) /= n;
    }
    for (int j = 0; j <= samples_per_segment; ++j) {
      const double tau = static_cast<double>(j) / samples_per_segment;
      const Eigen::VectorXd x = eval_poly(spline.segments[s].state_coef, tau);
      const Eigen::Vector3d viol =
          a_unit * x.head<2>() - b_unit;  // signed distances
      worst = std::max(worst, viol.maxCoeff());
    }
  }
  return std::max(worst, 0.0);
}

// ---------------------------------------------------------------------------
// TrajectoryNlp

TrajectoryNlp::TrajectoryNlp(const DynamicsModel& model,
                             const Objective& objective,
                             SequenceGeometry geometry,
                             const BoundaryState& start, EndpointMode mode,
                             std::optional<BoundaryState> goal,
                             const TranscriptionConfig& config)
    : model_(model),
      objective_fn_(objective),
      geometry_(std::move(geometry)),
      start_(start),
      mode_(mode),
      goal_(std::move(goal)),
      config_(config),
      basis_(CollocationBasis::radau(config.degree)) {
  nx_ = model_.state_dim();
  nu_ = model_.control_dim();
  segs_ = static_cast<int>(geometry_.triangles.size());
  const int d = config_.degree;
  block_ = (d + 1) * nx_ + d * nu_ + 1;
  n_vars_ = segs_ * block_;

  // Control decision variables are scaled to O(1).
  const Eigen::VectorXd clo = model_.control_lower();
  const Eigen::VectorXd chi = model_.control_upper();
  control_scale_.resize(nu_);
  for (int m = 0; m < nu_; ++m) {
    control_scale_(m) = std::max({1.0, std::abs(clo(m)), std::abs(chi(m))});
  }

  if (static_cast<int>(start_.value.size()) != nx_) {
    throw StructuralError("start state dimension mismatch");
  }
  if (!contains(geometry_.triangles.front().halfspaces,
                start_.position_point(), kMembershipTol)) {
    throw InputError("start position outside the first triangle");
  }
  if (mode_ == EndpointMode::Fixed) {
    if (!goal_ || static_cast<int>(goal_->value.size()) != nx_) {
      throw StructuralError("fixed endpoint requires a goal state");
    }
    if (!contains(geometry_.triangles.back().halfspaces,
                  goal_->position_point(), kMembershipTol)) {
      throw InputError("goal position outside the last triangle");
    }
  }

  // The algebraic constraints are anchored once, at the first node, and
  // propagate along the trajectory through the collocation dynamics (which
  // preserve them to discretization error; see the post-solve audit).
  // Repeating them per segment makes those rows dependent on straight
  // segments and wrecks the KKT conditioning. The anchor row is only needed
  // when the start pin does not already fix the involved components.
  if (model_.path_constraint_dim() > 0) {
    node0_path_rows_ = false;
    for (const int c : model_.path_constraint_components()) {
      if (!start_.is_pinned(c)) node0_path_rows_ = true;
    }
  }

  // Junction nodes lie on the shared edge. Classify the edge in each
  // adjacent frame: 0 -> p'2 = 0, 1 -> p'1 = 1, 2 -> p'2 = p'1.
  membership_.assign(segs_, std::vector<NodeMembership>(d + 1));
  auto edge_side = [](const LocalFrame& fr, const Point2& a,
                      const Point2& b) {
    const Point2 la = to_local(fr, a);
    const Point2 lb = to_local(fr, b);
    const double tol = 1e-7;
    if (std::abs(la.y) < tol && std::abs(lb.y) < tol) return 0;
    if (std::abs(la.x - 1.0) < tol && std::abs(lb.x - 1.0) < tol) return 1;
    if (std::abs(la.y - la.x) < tol && std::abs(lb.y - lb.x) < tol) return 2;
    throw StructuralError("shared edge is not an edge of the triangle");
  };
  for (int s = 0; s + 1 < segs_; ++s) {
    const auto& [ea, eb] = geometry_.shared_edges[s];
    NodeMembership& prev = membership_[s][d];
    switch (edge_side(geometry_.triangles[s].frame, ea, eb)) {
      case 0:
        prev.lo2 = -0.25;
        break;
      case 1:
        prev.hi1 = 1.25;
        break;
      case 2:
        prev.ineq = false;
        break;
    }
    NodeMembership& next = membership_[s + 1][0];
    switch (edge_side(geometry_.triangles[s + 1].frame, ea, eb)) {
      case 0:
        next.lo2 = -0.25;
        next.pin_coord = 1;
        next.pin_value = 0.0;
        break;
      case 1:
        next.hi1 = 1.25;
        next.pin_coord = 0;
        next.pin_value = 1.0;
        break;
      case 2:
        next.ineq_equality = true;
        break;
    }
  }

  // Count constraint rows in emission order.
  int rows = 0;
  for (int c = 0; c < nx_; ++c) rows += start_.is_pinned(c) ? 1 : 0;
  rows += segs_ * d * nx_;        // collocation
  for (int s = 0; s < segs_; ++s) {
    for (int k = 0; k <= d; ++k) {
      rows += membership_[s][k].ineq ? 1 : 0;
      rows += membership_[s][k].pin_coord >= 0 ? 1 : 0;
    }
  }
  rows += (segs_ - 1) * nx_;      // continuity
  rows += segs_ * model_.path_constraint_dim();  // segment-end bands
  if (node0_path_rows_) rows += model_.path_constraint_dim();
  if (mode_ == EndpointMode::Fixed) {
    for (int c = 0; c < nx_; ++c) rows += goal_->is_pinned(c) ? 1 : 0;
  }
  if (objective_fn_.has_time_cap()) rows += 1;
  n_cons_ = rows;

  walk_jacobian(nullptr, [this](int row, int col, double) {
    sparsity_.push_back({row, col});
  });

  node_states_.assign(segs_, Eigen::MatrixXd(nx_, d + 1));
  node_controls_.assign(segs_, Eigen::MatrixXd(nu_, d));
}

double TrajectoryNlp::position_row_scale(int seg) const {
  const auto& C = geometry_.triangles[seg].frame.C;
  return 1.0 / std::max(1.0, C.cwiseAbs().maxCoeff());
}

int TrajectoryNlp::var_local(int seg, int node, int comp) const {
  return seg * block_ + 2 * node + comp;
}

int TrajectoryNlp::var_state(int seg, int node, int comp) const {
  const int d = config_.degree;
  return seg * block_ + 2 * (d + 1) + (nx_ - 2) * node + (comp - 2);
}

int TrajectoryNlp::var_control(int seg, int colloc, int comp) const {
  const int d = config_.degree;
  return seg * block_ + (d + 1) * nx_ + nu_ * colloc + comp;
}

int TrajectoryNlp::var_duration(int seg) const {
  const int d = config_.degree;
  return seg * block_ + (d + 1) * nx_ + nu_ * d;
}

void TrajectoryNlp::var_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
  lo.resize(n_vars_);
  hi.resize(n_vars_);
  const int d = config_.degree;
  const Eigen::VectorXd slo = model_.state_lower();
  const Eigen::VectorXd shi = model_.state_upper();
  const Eigen::VectorXd clo = model_.control_lower();
  const Eigen::VectorXd chi = model_.control_upper();
  for (int s = 0; s < segs_; ++s) {
    for (int k = 0; k <= d; ++k) {
      const NodeMembership& nm = membership_[s][k];
      lo(var_local(s, k, 0)) = nm.lo1;
      hi(var_local(s, k, 0)) = nm.hi1;
      lo(var_local(s, k, 1)) = nm.lo2;
      hi(var_local(s, k, 1)) = nm.hi2;
      for (int c = 2; c < nx_; ++c) {
        lo(var_state(s, k, c)) = slo(c);
        hi(var_state(s, k, c)) = shi(c);
      }
    }
    for (int j = 0; j < d; ++j) {
      for (int m = 0; m < nu_; ++m) {
        lo(var_control(s, j, m)) = clo(m) / control_scale_(m);
        hi(var_control(s, j, m)) = chi(m) / control_scale_(m);
      }
    }
    lo(var_duration(s)) = config_.dt_min;
    hi(var_duration(s)) = config_.dt_max;
  }
}

void TrajectoryNlp::constraint_bounds(Eigen::VectorXd& lo,
                                      Eigen::VectorXd& hi) const {
  lo.resize(n_cons_);
  hi.resize(n_cons_);
  int row = 0;
  for (int c = 0; c < nx_; ++c) {
    if (start_.is_pinned(c)) {
      lo(row) = hi(row) = 0.0;
      ++row;
    }
  }
  const int d = config_.degree;
  for (int s = 0; s < segs_; ++s) {
    for (int j = 0; j < d * nx_; ++j) {
      lo(row) = hi(row) = 0.0;
      ++row;
    }
  }
  for (int s = 0; s < segs_; ++s) {
    for (int k = 0; k <= d; ++k) {
      const NodeMembership& nm = membership_[s][k];
      if (nm.ineq) {
        lo(row) = nm.ineq_equality ? 0.0 : -kInf;
        hi(row) = 0.0;
        ++row;
      }
      if (nm.pin_coord >= 0) {
        lo(row) = hi(row) = nm.pin_value;
        ++row;
      }
    }
  }
  for (int s = 0; s + 1 < segs_; ++s) {
    for (int c = 0; c < nx_; ++c) {
      lo(row) = hi(row) = 0.0;
      ++row;
    }
  }
  for (int k = 0; k < segs_ * model_.path_constraint_dim(); ++k) {
    lo(row) = -config_.algebraic_band;
    hi(row) = config_.algebraic_band;
    ++row;
  }
  if (node0_path_rows_) {
    for (int k = 0; k < model_.path_constraint_dim(); ++k) {
      lo(row) = hi(row) = 0.0;
      ++row;
    }
  }
  if (mode_ == EndpointMode::Fixed) {
    for (int c = 0; c < nx_; ++c) {
      if (goal_->is_pinned(c)) {
        lo(row) = hi(row) = 0.0;
        ++row;
      }
    }
  }
  if (objective_fn_.has_time_cap()) {
    lo(row) = -kInf;
    hi(row) = objective_fn_.time_cap;
    ++row;
  }
}

void TrajectoryNlp::eval_nodes(const Eigen::VectorXd& w) const {
  const int d = config_.degree;
  for (int s = 0; s < segs_; ++s) {
    const auto& fr = geometry_.triangles[s].frame;
    for (int k = 0; k <= d; ++k) {
      const Eigen::Vector2d local(w(var_local(s, k, 0)), w(var_local(s, k, 1)));
      node_states_[s].col(k).head<2>() = fr.C * local + fr.d.vec();
      for (int c = 2; c < nx_; ++c) {
        node_states_[s](c, k) = w(var_state(s, k, c));
      }
    }
    for (int j = 0; j < d; ++j) {
      for (int m = 0; m < nu_; ++m) {
        node_controls_[s](m, j) = control_scale_(m) * w(var_control(s, j, m));
      }
    }
  }
}

double TrajectoryNlp::objective(const Eigen::VectorXd& w) const {
  eval_nodes(w);
  const int d = config_.degree;
  double total = 0.0;
  for (int s = 0; s < segs_; ++s) {
    const double dt = w(var_duration(s));
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      acc += basis_.quad_weights(j) *
             objective_fn_.cost(model_, node_states_[s].col(j + 1),
                                node_controls_[s].col(j));
    }
    total += dt * acc;
  }
  return total;
}

void TrajectoryNlp::objective_gradient(const Eigen::VectorXd& w,
                                       Eigen::VectorXd& grad) const {
  eval_nodes(w);
  grad.setZero(n_vars_);
  const int d = config_.degree;
  Eigen::VectorXd dJdx, dJdu;
  for (int s = 0; s < segs_; ++s) {
    const double dt = w(var_duration(s));
    const auto& fr = geometry_.triangles[s].frame;
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      const auto x = node_states_[s].col(j + 1);
      const auto u = node_controls_[s].col(j);
      const double cost = objective_fn_.cost(model_, x, u);
      objective_fn_.cost_gradient(model_, x, u, dJdx, dJdu);
      const double wq = basis_.quad_weights(j);
      acc += wq * cost;
      for (int m = 0; m < 2; ++m) {
        grad(var_local(s, j + 1, m)) +=
            dt * wq * (dJdx(0) * fr.C(0, m) + dJdx(1) * fr.C(1, m));
      }
      for (int c = 2; c < nx_; ++c) {
        grad(var_state(s, j + 1, c)) += dt * wq * dJdx(c);
      }
      for (int m = 0; m < nu_; ++m) {
        grad(var_control(s, j, m)) += dt * wq * dJdu(m) * control_scale_(m);
      }
    }
    grad(var_duration(s)) += acc;
  }
}

void TrajectoryNlp::constraints(const Eigen::VectorXd& w,
                                Eigen::VectorXd& c) const {
  eval_nodes(w);
  c.resize(n_cons_);
  int row = 0;
  const int d = config_.degree;

  {
    const double ps = position_row_scale(0);
    for (int comp = 0; comp < nx_; ++comp) {
      if (start_.is_pinned(comp)) {
        const double scale = comp < 2 ? ps : 1.0;
        c(row++) = scale * (node_states_[0](comp, 0) - start_.value(comp));
      }
    }
  }

  Eigen::VectorXd f;
  for (int s = 0; s < segs_; ++s) {
    const double dt = w(var_duration(s));
    const auto& fr = geometry_.triangles[s].frame;
    for (int j = 1; j <= d; ++j) {
      model_.rhs(node_states_[s].col(j), node_controls_[s].col(j - 1), f);
      // Position dynamics are written in local triangle coordinates, which
      // keeps these rows at the scale of the remaining constraints.
      const Eigen::Vector2d f_local = fr.C_inv * f.head<2>();
      for (int comp = 0; comp < nx_; ++comp) {
        double deriv = 0.0;
        if (comp < 2) {
          for (int k = 0; k <= d; ++k) {
            deriv += basis_.diff(j - 1, k) * w(var_local(s, k, comp));
          }
          c(row++) = deriv - dt * f_local(comp);
        } else {
          for (int k = 0; k <= d; ++k) {
            deriv += basis_.diff(j - 1, k) * node_states_[s](comp, k);
          }
          c(row++) = deriv - dt * f(comp);
        }
      }
    }
  }

  for (int s = 0; s < segs_; ++s) {
    for (int k = 0; k <= d; ++k) {
      const NodeMembership& nm = membership_[s][k];
      if (nm.ineq) {
        c(row++) = w(var_local(s, k, 1)) - w(var_local(s, k, 0));
      }
      if (nm.pin_coord >= 0) {
        c(row++) = w(var_local(s, k, nm.pin_coord));
      }
    }
  }

  for (int s = 0; s + 1 < segs_; ++s) {
    const double ps = position_row_scale(s);
    for (int comp = 0; comp < nx_; ++comp) {
      const double scale = comp < 2 ? ps : 1.0;
      c(row++) =
          scale * (node_states_[s](comp, d) - node_states_[s + 1](comp, 0));
    }
  }

  if (model_.path_constraint_dim() > 0) {
    Eigen::VectorXd g;
    for (int s = 0; s < segs_; ++s) {
      model_.path_constraints(node_states_[s].col(d), g);
      for (int k = 0; k < model_.path_constraint_dim(); ++k) {
        c(row++) = g(k);
      }
    }
    if (node0_path_rows_) {
      model_.path_constraints(node_states_[0].col(0), g);
      for (int k = 0; k < model_.path_constraint_dim(); ++k) {
        c(row++) = g(k);
      }
    }
  }

  if (mode_ == EndpointMode::Fixed) {
    const double ps = position_row_scale(segs_ - 1);
    for (int comp = 0; comp < nx_; ++comp) {
      if (goal_->is_pinned(comp)) {
        const double scale = comp < 2 ? ps : 1.0;
        c(row++) =
            scale * (node_states_[segs_ - 1](comp, d) - goal_->value(comp));
      }
    }
  }

  if (objective_fn_.has_time_cap()) {
    double total = 0.0;
    for (int s = 0; s < segs_; ++s) total += w(var_duration(s));
    c(row++) = total;
  }
}

// Emits Jacobian entries in a fixed structural order. With w == nullptr the
// values are zero and only the pattern matters.
template <typename Emit>
void TrajectoryNlp::walk_jacobian(const Eigen::VectorXd* w,
                                  Emit&& emit) const {
  const int d = config_.degree;
  const bool live = (w != nullptr);
  if (live) eval_nodes(*w);

  int row = 0;

  // Start condition rows.
  {
    const auto& fr = geometry_.triangles[0].frame;
    const double ps = position_row_scale(0);
    for (int comp = 0; comp < nx_; ++comp) {
      if (!start_.is_pinned(comp)) continue;
      if (comp < 2) {
        emit(row, var_local(0, 0, 0), live ? ps * fr.C(comp, 0) : 0.0);
        emit(row, var_local(0, 0, 1), live ? ps * fr.C(comp, 1) : 0.0);
      } else {
        emit(row, var_state(0, 0, comp), live ? 1.0 : 0.0);
      }
      ++row;
    }
  }

  // Collocation rows; position components in local triangle coordinates.
  Eigen::VectorXd f;
  Eigen::MatrixXd dfdx, dfdu;
  Eigen::Vector2d f_local;
  Eigen::Matrix2d dloc_dlocal;          // C^-1 * dfdx[pos, pos] * C
  Eigen::Matrix<double, 2, Eigen::Dynamic> dloc_dstate, dloc_dcontrol;
  for (int s = 0; s < segs_; ++s) {
    const auto& fr = geometry_.triangles[s].frame;
    const double dt = live ? (*w)(var_duration(s)) : 0.0;
    for (int j = 1; j <= d; ++j) {
      if (live) {
        model_.rhs(node_states_[s].col(j), node_controls_[s].col(j - 1), f);
        model_.rhs_jacobian(node_states_[s].col(j),
                            node_controls_[s].col(j - 1), dfdx, dfdu);
        f_local = fr.C_inv * f.head<2>();
        dloc_dlocal = fr.C_inv * dfdx.topLeftCorner(2, 2) * fr.C;
        dloc_dstate = fr.C_inv * dfdx.topRightCorner(2, nx_ - 2);
        dloc_dcontrol = fr.C_inv * dfdu.topRows(2);
      }
      for (int comp = 0; comp < nx_; ++comp) {
        if (comp < 2) {
          for (int k = 0; k <= d; ++k) {
            const double dcoef = live ? basis_.diff(j - 1, k) : 0.0;
            if (k == j) {
              for (int m = 0; m < 2; ++m) {
                double v = live ? -dt * dloc_dlocal(comp, m) : 0.0;
                if (m == comp) v += dcoef;
                emit(row, var_local(s, k, m), v);
              }
            } else {
              emit(row, var_local(s, k, comp), dcoef);
            }
          }
          for (int c2 = 2; c2 < nx_; ++c2) {
            emit(row, var_state(s, j, c2),
                 live ? -dt * dloc_dstate(comp, c2 - 2) : 0.0);
          }
          for (int m = 0; m < nu_; ++m) {
            emit(row, var_control(s, j - 1, m),
                 live ? -dt * dloc_dcontrol(comp, m) * control_scale_(m)
                      : 0.0);
          }
          emit(row, var_duration(s), live ? -f_local(comp) : 0.0);
        } else {
          for (int m = 0; m < 2; ++m) {
            emit(row, var_local(s, j, m),
                 live ? -dt * (dfdx(comp, 0) * fr.C(0, m) +
                               dfdx(comp, 1) * fr.C(1, m))
                      : 0.0);
          }
          for (int k = 0; k <= d; ++k) {
            double v = live ? basis_.diff(j - 1, k) : 0.0;
            if (live && k == j) v -= dt * dfdx(comp, comp);
            emit(row, var_state(s, k, comp), v);
          }
          for (int c2 = 2; c2 < nx_; ++c2) {
            if (c2 == comp) continue;
            emit(row, var_state(s, j, c2), live ? -dt * dfdx(comp, c2) : 0.0);
          }
          for (int m = 0; m < nu_; ++m) {
            emit(row, var_control(s, j - 1, m),
                 live ? -dt * dfdu(comp, m) * control_scale_(m) : 0.0);
          }
          emit(row, var_duration(s), live ? -f(comp) : 0.0);
        }
        ++row;
      }
    }
  }

  // Membership rows.
  for (int s = 0; s < segs_; ++s) {
    for (int k = 0; k <= d; ++k) {
      const NodeMembership& nm = membership_[s][k];
      if (nm.ineq) {
        emit(row, var_local(s, k, 0), live ? -1.0 : 0.0);
        emit(row, var_local(s, k, 1), live ? 1.0 : 0.0);
        ++row;
      }
      if (nm.pin_coord >= 0) {
        emit(row, var_local(s, k, nm.pin_coord), live ? 1.0 : 0.0);
        ++row;
      }
    }
  }

  // Continuity rows.
  for (int s = 0; s + 1 < segs_; ++s) {
    const auto& fa = geometry_.triangles[s].frame;
    const auto& fb = geometry_.triangles[s + 1].frame;
    const double ps = position_row_scale(s);
    for (int comp = 0; comp < nx_; ++comp) {
      if (comp < 2) {
        emit(row, var_local(s, d, 0), live ? ps * fa.C(comp, 0) : 0.0);
        emit(row, var_local(s, d, 1), live ? ps * fa.C(comp, 1) : 0.0);
        emit(row, var_local(s + 1, 0, 0), live ? -ps * fb.C(comp, 0) : 0.0);
        emit(row, var_local(s + 1, 0, 1), live ? -ps * fb.C(comp, 1) : 0.0);
      } else {
        emit(row, var_state(s, d, comp), live ? 1.0 : 0.0);
        emit(row, var_state(s + 1, 0, comp), live ? -1.0 : 0.0);
      }
      ++row;
    }
  }

  // Algebraic rows: per-segment-end drift bands plus the anchor row.
  if (model_.path_constraint_dim() > 0) {
    const int np = model_.path_constraint_dim();
    Eigen::MatrixXd dgdx;
    const std::vector<int> comps = model_.path_constraint_components();
    auto emit_path = [&](int s, int node) {
      if (live) {
        model_.path_constraint_jacobian(node_states_[s].col(node), dgdx);
      }
      const auto& fr = geometry_.triangles[s].frame;
      for (int k = 0; k < np; ++k) {
        for (const int c : comps) {
          if (c < 2) {
            for (int m = 0; m < 2; ++m) {
              emit(row, var_local(s, node, m),
                   live ? dgdx(k, 0) * fr.C(0, m) + dgdx(k, 1) * fr.C(1, m)
                        : 0.0);
            }
          } else {
            emit(row, var_state(s, node, c), live ? dgdx(k, c) : 0.0);
          }
        }
        ++row;
      }
    };
    for (int s = 0; s < segs_; ++s) emit_path(s, d);
    if (node0_path_rows_) emit_path(0, 0);
  }

  // Terminal rows.
  if (mode_ == EndpointMode::Fixed) {
    const auto& fr = geometry_.triangles[segs_ - 1].frame;
    const double ps = position_row_scale(segs_ - 1);
    for (int comp = 0; comp < nx_; ++comp) {
      if (!goal_->is_pinned(comp)) continue;
      if (comp < 2) {
        emit(row, var_local(segs_ - 1, d, 0), live ? ps * fr.C(comp, 0) : 0.0);
        emit(row, var_local(segs_ - 1, d, 1), live ? ps * fr.C(comp, 1) : 0.0);
      } else {
        emit(row, var_state(segs_ - 1, d, comp), live ? 1.0 : 0.0);
      }
      ++row;
    }
  }

  // Time-cap row.
  if (objective_fn_.has_time_cap()) {
    for (int s = 0; s < segs_; ++s) {
      emit(row, var_duration(s), live ? 1.0 : 0.0);
    }
    ++row;
  }
}

const std::vector<std::pair<int, int>>& TrajectoryNlp::jacobian_sparsity()
    const {
  return sparsity_;
}

void TrajectoryNlp::jacobian_values(const Eigen::VectorXd& w,
                                    Eigen::VectorXd& values) const {
  values.resize(static_cast<int>(sparsity_.size()));
  int idx = 0;
  walk_jacobian(&w, [&values, &idx](int, int, double v) { values(idx++) = v; });
}

std::vector<std::pair<int, int>> TrajectoryNlp::hessian_blocks() const {
  std::vector<std::pair<int, int>> blocks;
  blocks.reserve(segs_);
  for (int s = 0; s < segs_; ++s) blocks.push_back({s * block_, block_});
  return blocks;
}

// ---------------------------------------------------------------------------
// Initial guesses

std::vector<Point2> TrajectoryNlp::default_waypoints() const {
  std::vector<Point2> w;
  w.push_back(start_.position_point());
  for (const auto& edge : geometry_.shared_edges) {
    w.push_back((edge.first + edge.second) * 0.5);
  }
  if (mode_ == EndpointMode::Fixed) {
    w.push_back(goal_->position_point());
  } else {
    w.push_back(geometry_.triangles.back().tri.centroid());
  }
  return w;
}

Eigen::VectorXd TrajectoryNlp::guess_from_polyline(
    const std::vector<Point2>& waypoints) const {
  const int d = config_.degree;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n_vars_);
  double heading = 0.0;
  bool have_heading = false;
  if (start_.is_pinned(2) && nx_ == 3) {
    heading = start_.value(2);
    have_heading = true;
  }
  for (int s = 0; s < segs_; ++s) {
    const Point2 a = waypoints[s];
    const Point2 b = waypoints[s + 1];
    const Point2 dir = b - a;
    const double len = dir.norm();
    if (len > 1e-9) {
      heading = std::atan2(dir.y, dir.x);
      have_heading = true;
    } else if (!have_heading) {
      heading = 0.0;
    }
    const auto& fr = geometry_.triangles[s].frame;
    for (int k = 0; k <= d; ++k) {
      const double tau = basis_.state_points(k);
      const Point2 pos = a + dir * tau;
      const Eigen::VectorXd xs =
          model_.guess_state(pos, heading, model_.nominal_speed());
      const Point2 local = to_local(fr, pos);
      w(var_local(s, k, 0)) = std::clamp(local.x, 0.0, 1.0);
      w(var_local(s, k, 1)) = std::clamp(local.y, 0.0, std::min(local.x, 1.0));
      for (int c = 2; c < nx_; ++c) w(var_state(s, k, c)) = xs(c);
    }
    const Eigen::VectorXd uc = model_.guess_control();
    for (int j = 0; j < d; ++j) {
      for (int m = 0; m < nu_; ++m) {
        w(var_control(s, j, m)) = uc(m) / control_scale_(m);
      }
    }
    w(var_duration(s)) = std::max(len / model_.nominal_speed(),
                                  10.0 * config_.dt_min);
  }
  // Respect pinned start components where the layout stores them directly.
  for (int c = 2; c < nx_; ++c) {
    if (start_.is_pinned(c)) w(var_state(0, 0, c)) = start_.value(c);
  }
  return w;
}

Eigen::VectorXd TrajectoryNlp::initial_guess() const {
  return guess_from_polyline(default_waypoints());
}

std::vector<Eigen::VectorXd> TrajectoryNlp::start_variants(
    const TrajectorySpline* warm) const {
  std::vector<Eigen::VectorXd> starts;
  const int d = config_.degree;

  if (warm != nullptr && static_cast<int>(warm->segments.size()) == segs_) {
    // Same corridor: lift the spline into the decision vector directly.
    Eigen::VectorXd w = initial_guess();
    for (int s = 0; s < segs_; ++s) {
      const auto& seg = warm->segments[s];
      const auto& fr = geometry_.triangles[s].frame;
      for (int k = 0; k <= d; ++k) {
        const Eigen::VectorXd xs =
            eval_poly(seg.state_coef, basis_.state_points(k));
        const Point2 local = to_local(fr, {xs(0), xs(1)});
        w(var_local(s, k, 0)) = std::clamp(local.x, 0.0, 1.0);
        w(var_local(s, k, 1)) =
            std::clamp(local.y, 0.0, std::min(local.x, 1.0));
        for (int c = 2; c < nx_; ++c) w(var_state(s, k, c)) = xs(c);
      }
      for (int j = 0; j < d; ++j) {
        const Eigen::VectorXd us = eval_poly(seg.control_coef, basis_.nodes(j));
        for (int m = 0; m < nu_; ++m) {
          w(var_control(s, j, m)) = us(m) / control_scale_(m);
        }
      }
      w(var_duration(s)) = std::max(seg.duration, config_.dt_min);
    }
    starts.push_back(std::move(w));
  }

  if (warm != nullptr &&
      static_cast<int>(warm->segments.size()) + 1 == segs_) {
    // Reuse the parent's segments and extend into the new triangle through
    // the shared-edge midpoint.
    Eigen::VectorXd w = initial_guess();
    for (int s = 0; s + 1 < segs_; ++s) {
      const auto& seg = warm->segments[s];
      const auto& fr = geometry_.triangles[s].frame;
      for (int k = 0; k <= d; ++k) {
        const Eigen::VectorXd xs = eval_poly(seg.state_coef,
                                             basis_.state_points(k));
        const Point2 local = to_local(fr, {xs(0), xs(1)});
        w(var_local(s, k, 0)) = std::clamp(local.x, 0.0, 1.0);
        w(var_local(s, k, 1)) =
            std::clamp(local.y, 0.0, std::min(local.x, 1.0));
        for (int c = 2; c < nx_; ++c) w(var_state(s, k, c)) = xs(c);
      }
      for (int j = 0; j < d; ++j) {
        const Eigen::VectorXd us =
            eval_poly(seg.control_coef, basis_.nodes(j));
        for (int m = 0; m < nu_; ++m) {
          w(var_control(s, j, m)) = us(m) / control_scale_(m);
        }
      }
      w(var_duration(s)) = std::max(seg.duration, config_.dt_min);
    }
    // New final segment: parent endpoint -> edge midpoint -> target.
    const Eigen::VectorXd xe = eval_poly(warm->segments.back().state_coef, 1.0);
    const Point2 p_end{xe(0), xe(1)};
    const auto& edge = geometry_.shared_edges.back();
    const Point2 mid = (edge.first + edge.second) * 0.5;
    const Point2 target = (mode_ == EndpointMode::Fixed)
                              ? goal_->position_point()
                              : geometry_.triangles.back().tri.centroid();
    const int s = segs_ - 1;
    const auto& fr = geometry_.triangles[s].frame;
    const double len1 = (mid - p_end).norm();
    const double len2 = (target - mid).norm();
    const double total = std::max(len1 + len2, 1e-9);
    for (int k = 0; k <= d; ++k) {
      const double tau = basis_.state_points(k);
      const double arc = tau * total;
      Point2 pos;
      double heading;
      if (arc <= len1 && len1 > 1e-12) {
        pos = p_end + (mid - p_end) * (arc / len1);
        heading = std::atan2(mid.y - p_end.y, mid.x - p_end.x);
      } else if (len2 > 1e-12) {
        const double a2 = std::clamp((arc - len1) / len2, 0.0, 1.0);
        pos = mid + (target - mid) * a2;
        heading = std::atan2(target.y - mid.y, target.x - mid.x);
      } else {
        pos = mid;
        heading = std::atan2(mid.y - p_end.y, mid.x - p_end.x);
      }
      Eigen::VectorXd xs = model_.guess_state(pos, heading,
                                              model_.nominal_speed());
      if (k == 0) xs = xe;  // exact continuity with the parent
      const Point2 local = to_local(fr, {xs(0), xs(1)});
      w(var_local(s, k, 0)) = std::clamp(local.x, 0.0, 1.0);
      w(var_local(s, k, 1)) = std::clamp(local.y, 0.0, std::min(local.x, 1.0));
      for (int c = 2; c < nx_; ++c) w(var_state(s, k, c)) = xs(c);
    }
    const Eigen::VectorXd uc = model_.guess_control();
    for (int j = 0; j < d; ++j) {
      for (int m = 0; m < nu_; ++m) {
        w(var_control(s, j, m)) = uc(m) / control_scale_(m);
      }
    }
    w(var_duration(s)) =
        std::max(total / model_.nominal_speed(), 10.0 * config_.dt_min);
    starts.push_back(std::move(w));
  }

  starts.push_back(initial_guess());

  // Heading-unwrap variants for fixed-endpoint car problems; these seed the
  // two winding directions of turn-in-place style solutions.
  if (config_.multistart && mode_ == EndpointMode::Fixed && nx_ == 3 &&
      goal_->is_pinned(2)) {
    const double psi0 =
        start_.is_pinned(2) ? start_.value(2) : 0.0;
    const double base = wrap_angle(goal_->value(2) - psi0);
    for (const int wind : {0, 1, -1}) {
      Eigen::VectorXd w = initial_guess();
      const double target = psi0 + base + 2.0 * M_PI * wind;
      for (int s = 0; s < segs_; ++s) {
        for (int k = 0; k <= d; ++k) {
          const double rho = (s + basis_.state_points(k)) / segs_;
          w(var_state(s, k, 2)) = psi0 + rho * (target - psi0);
        }
      }
      starts.push_back(std::move(w));
    }
  }
  return starts;
}

TrajectorySpline TrajectoryNlp::spline_from(const Eigen::VectorXd& w) const {
  eval_nodes(w);
  TrajectorySpline spline;
  spline.segments.resize(segs_);
  Eigen::VectorXd col;
  for (int s = 0; s < segs_; ++s) {
    // Gauge repair: the solver holds algebraic invariants within the band;
    // the reported states carry them exactly. The models are invariant-
    // neutral, so this changes nothing observable.
    Eigen::MatrixXd states = node_states_[s];
    for (int k = 0; k <= config_.degree; ++k) {
      col = states.col(k);
      model_.normalize_state(col);
      states.col(k) = col;
    }
    spline.segments[s].duration = w(var_duration(s));
    spline.segments[s].state_coef =
        values_to_monomial(basis_.state_points, states);
    spline.segments[s].control_coef =
        values_to_monomial(basis_.nodes, node_controls_[s]);
  }
  return spline;
}

Eigen::VectorXd TrajectoryNlp::endpoint_from(const Eigen::VectorXd& w) const {
  eval_nodes(w);
  Eigen::VectorXd x = node_states_[segs_ - 1].col(config_.degree);
  model_.normalize_state(x);
  return x;
}

// ---------------------------------------------------------------------------
// Solve drivers

namespace {

RefinementResult run_solves(const DynamicsModel& model,
                            const TrajectoryNlp& problem,
                            const SequenceGeometry& geometry,
                            const TranscriptionConfig& config,
                            const TrajectorySpline* warm) {
  const std::vector<Eigen::VectorXd> starts = problem.start_variants(warm);
  RefinementResult best;
  bool have = false;
  bool any_infeasible = false;
  bool all_infeasible = true;
  for (const Eigen::VectorXd& w0 : starts) {
    const SolveReport rep = solve(problem, w0, config.nlp);
    any_infeasible |= (rep.status == NlpStatus::Infeasible);
    all_infeasible &= (rep.status == NlpStatus::Infeasible);
    if (rep.status != NlpStatus::Optimal) continue;
    if (!have || rep.objective < best.value) {
      best.status = NlpStatus::Optimal;
      best.value = rep.objective;
      best.spline = problem.spline_from(rep.primal);
      best.endpoint = problem.endpoint_from(rep.primal);
      best.report = rep;
      have = true;
    }
  }
  (void)0;
  if (!have) {
    best.status = all_infeasible
                      ? NlpStatus::Infeasible
                      : (any_infeasible ? NlpStatus::Infeasible
                                        : NlpStatus::MaxIter);
    best.value = 0.0;
    return best;
  }
  best.membership_violation = membership_audit(best.spline, geometry);
  if (model.path_constraint_dim() > 0) {
    Eigen::VectorXd g;
    for (const auto& seg : best.spline.segments) {
      for (int j = 0; j <= 32; ++j) {
        const Eigen::VectorXd x = eval_poly(seg.state_coef, j / 32.0);
        model.path_constraints(x, g);
        best.path_violation =
            std::max(best.path_violation, g.lpNorm<Eigen::Infinity>());
      }
    }
  }
  return best;
}

}  // namespace

RefinementResult solve_v(const DynamicsModel& model, const Objective& obj,
                         const SequenceGeometry& geometry,
                         const BoundaryState& x0,
                         const TranscriptionConfig& config,
                         const TrajectorySpline* warm) {
  TrajectoryNlp problem(model, obj, geometry, x0, EndpointMode::Free,
                        std::nullopt, config);
  return run_solves(model, problem, geometry, config, warm);
}

RefinementResult solve_q(const DynamicsModel& model, const Objective& obj,
                         const SequenceGeometry& geometry,
                         const BoundaryState& x0, const BoundaryState& xf,
                         const TranscriptionConfig& config,
                         const TrajectorySpline* warm) {
  TrajectoryNlp problem(model, obj, geometry, x0, EndpointMode::Fixed, xf,
                        config);
  return run_solves(model, problem, geometry, config, warm);
}

}  // namespace triplan

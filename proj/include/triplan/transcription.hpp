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

#ifndef TRIPLAN_TRANSCRIPTION_HPP_
#define TRIPLAN_TRANSCRIPTION_HPP_

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "triplan/cdt.hpp"
#include "triplan/collocation.hpp"
#include "triplan/dynamics.hpp"
#include "triplan/errors.hpp"
#include "triplan/geometry.hpp"
#include "triplan/nlp.hpp"
#include "triplan/objectives.hpp"

namespace triplan {

/// One triangle of a corridor, with cached frames.
struct CorridorTriangle {
  int id = -1;
  Triangle tri;
  LocalFrame frame;
  HalfSpaces halfspaces;
};

/// Geometry of an adjacent triangle sequence. Shared edge s connects
/// triangle s and s+1.
struct SequenceGeometry {
  std::vector<CorridorTriangle> triangles;
  std::vector<std::pair<Point2, Point2>> shared_edges;
  std::vector<int> ids() const {
    std::vector<int> out;
    out.reserve(triangles.size());
    for (const auto& t : triangles) out.push_back(t.id);
    return out;
  }
};

/// Builds corridor geometry from triangle ids, validating adjacency.
SequenceGeometry make_sequence_geometry(const Triangulation& t,
                                        const std::vector<int>& sequence);

/// Boundary state with a per-component pin mask.
struct BoundaryState {
  Eigen::VectorXd value;
  std::vector<std::uint8_t> pinned;

  static BoundaryState all(const Eigen::VectorXd& x);
  /// Position pinned; remaining components per the model's convention
  /// (velocities pinned to zero, orientation free).
  static BoundaryState position(const DynamicsModel& model, const Point2& p);

  bool is_pinned(int comp) const { return pinned[comp] != 0; }
  Point2 position_point() const { return {value(0), value(1)}; }
};

struct TranscriptionConfig {
  int degree = 3;
  double dt_min = 1e-3;
  double dt_max = 1e4;
  // Allowed drift of algebraic path constraints at segment ends. A band
  // instead of an equality keeps those rows from degenerating on straight
  // segments; the models are gauge-neutral off the constraint manifold, so
  // the band only guards pathological iterates and stays inactive at the
  // solution (post-hoc audits verify the tighter invariant).
  double algebraic_band = 1e-4;
  NlpOptions nlp = [] {
    NlpOptions o;
    o.max_iter = 3000;  // minimum-time vessel refinements converge slowly
    return o;
  }();
  bool multistart = true;  // extra heading-unwrap starts for fixed endpoints
};

/// Piecewise-polynomial trajectory; one segment per triangle. Coefficients
/// are monomial in the normalized segment time tau in [0, 1].
struct TrajectorySpline {
  struct Segment {
    double duration = 0.0;
    Eigen::MatrixXd state_coef;    // nx x (d+1)
    Eigen::MatrixXd control_coef;  // nu x d
  };
  double t0 = 0.0;
  std::vector<Segment> segments;

  double total_time() const;
  int find_segment(double t, double* tau) const;
  Eigen::VectorXd state(double t) const;
  Eigen::VectorXd control(double t) const;
  /// d^order x / dt^order, order in {1, 2}.
  Eigen::VectorXd state_derivative(double t, int order) const;
  /// Largest state jump across segment junctions.
  double max_continuity_gap() const;
};

struct TrajectorySample {
  double t;
  Eigen::VectorXd state;
  Eigen::VectorXd control;
};

/// Dense samples: per segment, n points at tau = j/(n-1) with duplicate
/// junction points dropped. Requires n >= 2.
std::vector<TrajectorySample> sample(const TrajectorySpline& spline, int n);

enum class EndpointMode { Free, Fixed };

/// Direct transcription of the corridor refinement problem as a sparse NLP.
class TrajectoryNlp : public NlpProblem {
 public:
  TrajectoryNlp(const DynamicsModel& model, const Objective& objective,
                SequenceGeometry geometry, const BoundaryState& start,
                EndpointMode mode, std::optional<BoundaryState> goal,
                const TranscriptionConfig& config);

  int num_vars() const override { return n_vars_; }
  int num_constraints() const override { return n_cons_; }
  void var_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const override;
  void constraint_bounds(Eigen::VectorXd& lo,
                         Eigen::VectorXd& hi) const override;
  double objective(const Eigen::VectorXd& w) const override;
  void objective_gradient(const Eigen::VectorXd& w,
                          Eigen::VectorXd& grad) const override;
  void constraints(const Eigen::VectorXd& w,
                   Eigen::VectorXd& c) const override;
  const std::vector<std::pair<int, int>>& jacobian_sparsity() const override;
  void jacobian_values(const Eigen::VectorXd& w,
                       Eigen::VectorXd& values) const override;
  std::vector<std::pair<int, int>> hessian_blocks() const override;

  // Decision-vector plumbing shared with the solve drivers.
  int segments() const { return segs_; }
  const CollocationBasis& basis() const { return basis_; }
  const SequenceGeometry& geometry() const { return geometry_; }
  Eigen::VectorXd initial_guess() const;
  Eigen::VectorXd guess_from_polyline(
      const std::vector<Point2>& waypoints) const;
  std::vector<Eigen::VectorXd> start_variants(
      const TrajectorySpline* warm) const;
  TrajectorySpline spline_from(const Eigen::VectorXd& w) const;
  Eigen::VectorXd endpoint_from(const Eigen::VectorXd& w) const;

  double position_row_scale(int seg) const;
  int var_local(int seg, int node, int comp) const;   // p' coordinates
  int var_state(int seg, int node, int comp) const;   // comps >= 2
  int var_control(int seg, int colloc, int comp) const;
  int var_duration(int seg) const;

 private:
  template <typename Emit>
  void walk_jacobian(const Eigen::VectorXd* w, Emit&& emit) const;
  void eval_nodes(const Eigen::VectorXd& w) const;
  std::vector<Point2> default_waypoints() const;

  const DynamicsModel& model_;
  Objective objective_fn_;
  SequenceGeometry geometry_;
  BoundaryState start_;
  EndpointMode mode_;
  std::optional<BoundaryState> goal_;
  TranscriptionConfig config_;
  CollocationBasis basis_;

  // Membership handling per (segment, node). Junction nodes sit exactly on
  // the shared edge; the entering side pins that edge as an equality and the
  // leaving side drops its then-dependent constraint, which keeps the active
  // constraint gradients independent.
  struct NodeMembership {
    bool ineq = true;          // p'2 - p'1 <= 0 row present
    bool ineq_equality = false;  // row bounds [0, 0] instead of (-inf, 0]
    double lo1 = 0.0, hi1 = 1.0, lo2 = 0.0, hi2 = 1.0;
    int pin_coord = -1;        // extra row: p'[pin_coord] == pin_value
    double pin_value = 0.0;
  };

  int nx_, nu_, segs_, block_, n_vars_, n_cons_;
  bool node0_path_rows_ = false;
  Eigen::VectorXd control_scale_;
  std::vector<std::vector<NodeMembership>> membership_;
  std::vector<std::pair<int, int>> sparsity_;

  // Scratch reused across evaluations (one solve per instance).
  mutable std::vector<Eigen::MatrixXd> node_states_;    // nx x (d+1)
  mutable std::vector<Eigen::MatrixXd> node_controls_;  // nu x d
};

/// Search-facing refinement result.
struct RefinementResult {
  NlpStatus status = NlpStatus::Diverged;
  double value = 0.0;
  TrajectorySpline spline;
  Eigen::VectorXd endpoint;
  double membership_violation = 0.0;  // dense post-solve audit, meters
  double path_violation = 0.0;  // max algebraic-constraint drift on samples
  SolveReport report;

  bool optimal() const { return status == NlpStatus::Optimal; }
};

/// Free-endpoint refinement (value V).
RefinementResult solve_v(const DynamicsModel& model, const Objective& obj,
                         const SequenceGeometry& geometry,
                         const BoundaryState& x0,
                         const TranscriptionConfig& config,
                         const TrajectorySpline* warm = nullptr);

/// Fixed-endpoint refinement (value Q).
RefinementResult solve_q(const DynamicsModel& model, const Objective& obj,
                         const SequenceGeometry& geometry,
                         const BoundaryState& x0, const BoundaryState& xf,
                         const TranscriptionConfig& config,
                         const TrajectorySpline* warm = nullptr);

/// Max distance (meters) by which sampled positions leave their triangles.
double membership_audit(const TrajectorySpline& spline,
                        const SequenceGeometry& geometry,
                        int samples_per_segment = 64);

}  // namespace triplan

#endif  // TRIPLAN_TRANSCRIPTION_HPP_

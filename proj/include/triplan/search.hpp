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

#ifndef TRIPLAN_SEARCH_HPP_
#define TRIPLAN_SEARCH_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "triplan/cdt.hpp"
#include "triplan/objectives.hpp"
#include "triplan/transcription.hpp"

namespace triplan {

/// Best-first exploration over triangle sequences ordered by the value lower
/// bound (free-endpoint value plus admissible heuristic).
struct PlannerConfig {
  TranscriptionConfig transcription;
  // Pruning: reject a new node when an admitted node ends in the same
  // triangle with weighted endpoint distance <= prune_eps and a value no
  // larger. Weight defaults to identity over positions padded with 1e-6.
  double prune_eps = 1e-2;
  Eigen::MatrixXd prune_weight;  // empty -> default
  int workers = 1;
  bool audit_lower_bounds = true;
};

struct SearchStats {
  int nodes_expanded = 0;    // nodes popped or completed
  int nodes_admitted = 0;    // children placed on the open list
  int nodes_pruned = 0;      // rejected by endpoint dominance
  int dead_ends = 0;         // children whose refinement failed
  int dead_cache_hits = 0;
  int completions = 0;       // fixed-endpoint refinements attempted
  int solver_calls = 0;      // NLP solves, including start variants
  int lemma_violations = 0;  // lower-bound audit failures on completions
  double wall_time_s = 0.0;
};

struct TraceEvent {
  enum class Kind { Expand, Admit, Prune, DeadEnd, Incumbent, Terminate };
  Kind kind;
  std::vector<int> sequence;
  double value = 0.0;  // V of the node, or Q for incumbents
  double qbar = 0.0;
};

/// A node left on the open list when the search stopped (still incomplete).
struct OpenRemnant {
  std::vector<int> sequence;
  double value = 0.0;  // V
  double qbar = 0.0;
  Eigen::VectorXd endpoint;
};

struct PlanResult {
  bool found = false;
  std::vector<int> sequence;
  double value = 0.0;  // Q of the returned plan
  TrajectorySpline spline;
  SearchStats stats;
  std::vector<TraceEvent> trace;
  std::vector<OpenRemnant> remnants;
};

struct PlanContext {
  const Triangulation& triangulation;
  const AdjacencyGraph& graph;
  const DynamicsModel& model;
  const Objective& objective;
};

/// Sequential best-first plan; deterministic.
PlanResult plan(const PlanContext& ctx, const BoundaryState& x0,
                const BoundaryState& xf, const PlannerConfig& config);

/// Same contract with worker-parallel node expansion; the returned value
/// matches the sequential one (tie-broken sequences may differ).
PlanResult parallel_plan(const PlanContext& ctx, const BoundaryState& x0,
                         const BoundaryState& xf, const PlannerConfig& config);

/// Default endpoint weight: identity on position components, 1e-6 elsewhere.
Eigen::MatrixXd default_prune_weight(int state_dim);

}  // namespace triplan

#endif  // TRIPLAN_SEARCH_HPP_
